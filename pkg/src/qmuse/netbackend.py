"""Circuit execution over TCP, one JSON object per line.

Request:  {"circuit": {num_qubits, initial_code, gates: [...], measured_qubits},
           "shots": int, "seed": int}
Response: {"counts": {bitstring: n, ...}, "shots": int}  or  {"error": "message"}
"""

from __future__ import annotations

import json
import logging
import os
import socket
import socketserver
import threading
from dataclasses import dataclass

from .qsim import Backend, Circuit, Counts, LocalBackend

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 7117
DEFAULT_TIMEOUT = 30.0
ENDPOINT_ENV = "QMUSE_ENDPOINT"

log = logging.getLogger(__name__)


class TransportError(ConnectionError):
    """Could not reach the server or the connection broke mid-request."""


class RemoteError(RuntimeError):
    """The server answered with an error line."""


def parse_endpoint(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not host:
        raise ValueError(f"endpoint must look like HOST:PORT, got {text!r}")
    return host, int(port)


def default_endpoint() -> tuple[str, int]:
    env = os.environ.get(ENDPOINT_ENV)
    return parse_endpoint(env) if env else (DEFAULT_HOST, DEFAULT_PORT)


def encode_request(circuit: Circuit, shots: int, seed: int) -> bytes:
    msg = {"circuit": circuit.to_dict(), "shots": shots, "seed": seed}
    return (json.dumps(msg, separators=(",", ":")) + "\n").encode("utf-8")


def handle_request(line: bytes, backend: Backend) -> dict:
    """Turn one request line into a response object; never raises."""
    try:
        msg = json.loads(line.decode("utf-8"))
        if not isinstance(msg, dict):
            raise ValueError("request must be a JSON object")
        shots = msg.get("shots")
        if not isinstance(shots, int) or isinstance(shots, bool) or shots < 1:
            return {"error": "invalid shots"}
        seed = msg.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            return {"error": "invalid seed"}
        circuit = Circuit.from_dict(msg["circuit"])
    except (ValueError, KeyError, TypeError) as exc:
        return {"error": f"malformed request: {exc}"}
    try:
        counts = backend.execute(circuit, shots, seed)
    except Exception as exc:
        log.exception("backend failure")
        return {"error": f"execution failed: {exc}"}
    return {"counts": dict(counts), "shots": shots}


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        for line in self.rfile:
            if not line.strip():
                continue
            reply = handle_request(line, self.server.backend)
            self.wfile.write((json.dumps(reply, separators=(",", ":")) + "\n").encode("utf-8"))
            self.wfile.flush()


class CircuitServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, endpoint: tuple[str, int], backend: Backend | None = None):
        self.backend = backend or LocalBackend()
        super().__init__(endpoint, _Handler)

    @property
    def endpoint(self) -> tuple[str, int]:
        host, port = self.server_address[:2]
        return host, port


def serve(endpoint: tuple[str, int] | None = None, backend: Backend | None = None) -> None:
    """Serve until interrupted."""
    with CircuitServer(endpoint or default_endpoint(), backend) as server:
        log.info("serving circuits on %s:%d", *server.endpoint)
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass


def start_background(endpoint: tuple[str, int] = (DEFAULT_HOST, 0), backend: Backend | None = None) -> CircuitServer:
    """Start a server on a daemon thread; port 0 picks a free port.  Call ``shutdown()`` to stop."""
    server = CircuitServer(endpoint, backend)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    return server


class RemoteBackend:
    """Backend that forwards every execution to a circuit server.

    One TCP connection is kept open and reused; requests on it are serialised.
    """

    def __init__(self, endpoint: tuple[str, int] | None = None, timeout: float = DEFAULT_TIMEOUT):
        self.endpoint = endpoint or default_endpoint()
        self.timeout = timeout
        self._sock: socket.socket | None = None
        self._reader = None
        self._lock = threading.Lock()

    def _connect(self):
        try:
            self._sock = socket.create_connection(self.endpoint, timeout=self.timeout)
        except OSError as exc:
            raise TransportError(f"cannot reach {self.endpoint[0]}:{self.endpoint[1]}: {exc}") from exc
        self._reader = self._sock.makefile("rb")

    def close(self):
        if self._sock is not None:
            self._reader.close()
            self._sock.close()
            self._sock = self._reader = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def execute(self, circuit: Circuit, shots: int, seed: int) -> Counts:
        with self._lock:
            if self._sock is None:
                self._connect()
            try:
                self._sock.sendall(encode_request(circuit, shots, seed))
                line = self._reader.readline()
            except OSError as exc:
                self.close()
                raise TransportError(str(exc)) from exc
            if not line:
                self.close()
                raise TransportError("server closed the connection")
        reply = json.loads(line.decode("utf-8"))
        if "error" in reply:
            raise RemoteError(reply["error"])
        return Counts(sorted(reply["counts"].items()))


def remote_execute(
    endpoint: tuple[str, int], circuit: Circuit, shots: int, seed: int, timeout: float = DEFAULT_TIMEOUT
) -> Counts:
    with RemoteBackend(endpoint, timeout) as backend:
        return backend.execute(circuit, shots, seed)


@dataclass
class EndpointSpec:
    """Parsed ``--backend`` value: ``local`` or ``remote[:HOST:PORT]``."""

    kind: str
    endpoint: tuple[str, int] | None = None

    @classmethod
    def parse(cls, text: str) -> "EndpointSpec":
        if text == "local":
            return cls("local")
        if text == "remote":
            return cls("remote", default_endpoint())
        if text.startswith("remote:"):
            return cls("remote", parse_endpoint(text[len("remote:"):]))
        raise ValueError(f"backend must be 'local' or 'remote[:HOST:PORT]', got {text!r}")

    def make(self, timeout: float = DEFAULT_TIMEOUT) -> Backend:
        if self.kind == "local":
            return LocalBackend()
        return RemoteBackend(self.endpoint, timeout)
