"""Dense state-vector simulation of small quantum circuits.

Basis index convention: qubit ``q_i`` carries bit weight ``2**i``.  Every
bitstring crossing this module's boundary (initial codes, count keys) is
written most-significant qubit first, so ``"10"`` on two qubits means
``q1 = 1, q0 = 0``.

Randomness comes from numpy's PCG64 bit generator seeded with the caller's
integer seed; seed 0 is valid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

MAX_QUBITS = 12

SINGLE_QUBIT_KINDS = ("X", "H", "RX", "RY", "RZ")
ROTATIONS = ("RX", "RY", "RZ")
N_CONTROLS = {"X": 0, "H": 0, "RX": 0, "RY": 0, "RZ": 0, "CX": 1, "CCX": 2}

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def make_rng(seed: int) -> np.random.Generator:
    """The one PRNG used across the package (PCG64, 64-bit state)."""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int
    controls: tuple[int, ...] = ()
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in N_CONTROLS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        if len(self.controls) != N_CONTROLS[self.kind]:
            raise ValueError(
                f"{self.kind} takes {N_CONTROLS[self.kind]} control(s), got {len(self.controls)}"
            )
        if self.kind in ROTATIONS:
            if self.theta is None or not np.isfinite(self.theta):
                raise ValueError(f"{self.kind} needs a finite angle")
        elif self.theta is not None:
            raise ValueError(f"{self.kind} takes no angle")
        wires = (self.target, *self.controls)
        if len(set(wires)) != len(wires):
            raise ValueError("duplicate control/target qubit")
        if min(wires) < 0:
            raise ValueError("negative qubit index")

    @property
    def wires(self) -> tuple[int, ...]:
        return (self.target, *self.controls)

    def matrix(self) -> np.ndarray:
        """2x2 unitary applied to the target when all controls are 1."""
        return base_matrix(self.kind, self.theta)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "target": self.target, "controls": list(self.controls)}
        if self.theta is not None:
            d["theta"] = self.theta
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Gate":
        theta = d.get("theta")
        return cls(
            kind=str(d["kind"]).upper(),
            target=int(d["target"]),
            controls=tuple(d.get("controls", ())),
            theta=None if theta is None else float(theta),
        )


# Convenience constructors
def X(q: int) -> Gate:
    return Gate("X", q)


def H(q: int) -> Gate:
    return Gate("H", q)


def RX(theta: float, q: int) -> Gate:
    return Gate("RX", q, theta=theta)


def RY(theta: float, q: int) -> Gate:
    return Gate("RY", q, theta=theta)


def RZ(theta: float, q: int) -> Gate:
    return Gate("RZ", q, theta=theta)


def CX(control: int, target: int) -> Gate:
    return Gate("CX", target, (control,))


def CCX(c1: int, c2: int, target: int) -> Gate:
    return Gate("CCX", target, (c1, c2))


def base_matrix(kind: str, theta: float | None = None) -> np.ndarray:
    if kind in ("X", "CX", "CCX"):
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "H":
        return _INV_SQRT2 * np.array([[1, 1], [1, -1]], dtype=complex)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)
    raise ValueError(f"unknown gate kind {kind!r}")


def _check_code(code: str, num_qubits: int) -> None:
    if len(code) != num_qubits:
        raise ValueError(f"code {code!r} has length {len(code)}, expected {num_qubits}")
    if set(code) - {"0", "1"}:
        raise ValueError(f"code {code!r} must contain only 0/1")


def _check_width(num_qubits: int) -> None:
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(f"num_qubits must be in 1..{MAX_QUBITS}, got {num_qubits}")


@dataclass(frozen=True)
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_width(self.num_qubits)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.num_qubits,):
            raise ValueError(f"expected {2**self.num_qubits} amplitudes, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        if abs(np.vdot(amps, amps).real - 1.0) > 1e-10:
            raise ValueError("state is not normalised")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sum(self.probabilities()))


def prepare_basis(num_qubits: int, code: str) -> StateVector:
    """Basis state for ``code`` written MSB (highest qubit) first."""
    _check_width(num_qubits)
    _check_code(code, num_qubits)
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[int(code, 2)] = 1.0
    return StateVector(num_qubits, amps)


def _apply_inplace(amps: np.ndarray, n: int, gate: Gate) -> None:
    # Axis k of the (2,)*n view addresses qubit n-1-k.
    psi = amps.reshape((2,) * n)
    idx: list = [slice(None)] * n
    for c in gate.controls:
        idx[n - 1 - c] = 1
    t = n - 1 - gate.target
    i0, i1 = list(idx), list(idx)
    i0[t], i1[t] = 0, 1
    i0, i1 = tuple(i0), tuple(i1)
    a, b = psi[i0].copy(), psi[i1].copy()
    m = gate.matrix()
    psi[i0] = m[0, 0] * a + m[0, 1] * b
    psi[i1] = m[1, 0] * a + m[1, 1] * b


def _check_gate(gate: Gate, num_qubits: int) -> None:
    if max(gate.wires) >= num_qubits:
        raise ValueError(f"gate {gate.kind} addresses qubit outside 0..{num_qubits - 1}")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    _check_gate(gate, state.num_qubits)
    amps = state.amplitudes.copy()
    _apply_inplace(amps, state.num_qubits, gate)
    return StateVector(state.num_qubits, amps)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()
    measured_qubits: tuple[int, ...] = ()
    initial_code: str = ""

    def __post_init__(self):
        _check_width(self.num_qubits)
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "measured_qubits", tuple(int(q) for q in self.measured_qubits))
        if not self.initial_code:
            object.__setattr__(self, "initial_code", "0" * self.num_qubits)
        _check_code(self.initial_code, self.num_qubits)
        for g in self.gates:
            _check_gate(g, self.num_qubits)
        mq = self.measured_qubits
        if any(not 0 <= q < self.num_qubits for q in mq):
            raise ValueError("measured qubit out of range")
        if len(set(mq)) != len(mq):
            raise ValueError("measured qubits must be distinct")

    def statevector(self) -> StateVector:
        """Final pre-measurement state."""
        amps = prepare_basis(self.num_qubits, self.initial_code).amplitudes.copy()
        for g in self.gates:
            _apply_inplace(amps, self.num_qubits, g)
        return StateVector(self.num_qubits, amps)

    def outcome_probabilities(self) -> dict[str, float]:
        """Exact distribution over measured bitstrings (zero entries omitted)."""
        probs = self.statevector().probabilities()
        out: dict[str, float] = {}
        for i in np.flatnonzero(probs > 0):
            k = _outcome_key(int(i), self.measured_qubits)
            out[k] = out.get(k, 0.0) + float(probs[i])
        return out

    def to_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "initial_code": self.initial_code,
            "gates": [g.to_dict() for g in self.gates],
            "measured_qubits": list(self.measured_qubits),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Circuit":
        return cls(
            num_qubits=int(d["num_qubits"]),
            gates=tuple(Gate.from_dict(g) for g in d.get("gates", ())),
            measured_qubits=tuple(d.get("measured_qubits", ())),
            initial_code=str(d.get("initial_code", "")),
        )


def _outcome_key(index: int, measured: tuple[int, ...]) -> str:
    # Key lists measured_qubits last-to-first, so ascending lists read MSB first.
    return "".join("1" if (index >> q) & 1 else "0" for q in reversed(measured))


class Counts(dict):
    """Shot histogram: measured bitstring -> occurrences."""

    @property
    def total_shots(self) -> int:
        return sum(self.values())


def run_circuit(circuit: Circuit, shots: int, seed: int) -> Counts:
    """Sample ``shots`` terminal measurements of ``circuit``.

    Every shot prepares, evolves and measures independently.  The evolution is
    deterministic, so it is computed once and the shots are drawn by
    inverse-CDF sampling of the final probabilities.
    """
    if not isinstance(shots, (int, np.integer)) or isinstance(shots, bool) or shots < 1:
        raise ValueError("invalid shots")
    if not circuit.measured_qubits:
        raise ValueError("circuit measures no qubits")
    probs = circuit.statevector().probabilities()
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    draws = make_rng(seed).random(int(shots))
    basis = np.searchsorted(cdf, draws, side="right")
    counts = Counts()
    for b, c in zip(*np.unique(basis, return_counts=True)):
        k = _outcome_key(int(b), circuit.measured_qubits)
        counts[k] = counts.get(k, 0) + int(c)
    return Counts(sorted(counts.items()))


def most_frequent(counts: dict[str, int]) -> str:
    """Key with the highest count; ties go to the lexicographically smallest key."""
    if not counts:
        raise ValueError("empty counts")
    return min(counts, key=lambda k: (-counts[k], k))


class Backend(Protocol):
    def execute(self, circuit: Circuit, shots: int, seed: int) -> Counts: ...


@dataclass
class LocalBackend:
    """In-process simulator backend."""

    name: str = field(default="local")

    def execute(self, circuit: Circuit, shots: int, seed: int) -> Counts:
        return run_circuit(circuit, shots, seed)


def truth_table(kind: str) -> list[tuple[str, str]]:
    """Basis-state truth table for CX (2 qubits) or CCX (3 qubits).

    ``q0`` (rightmost written bit) is the target and the higher qubits are
    the controls, so ``10 -> 11`` and ``110 -> 111``.
    """
    if kind == "CX":
        n, gate = 2, CX(1, 0)
    elif kind == "CCX":
        n, gate = 3, CCX(2, 1, 0)
    else:
        raise ValueError(f"no truth table for {kind!r}")
    rows = []
    for i in range(2**n):
        code = format(i, f"0{n}b")
        out = apply_gate(prepare_basis(n, code), gate)
        (j,) = np.flatnonzero(np.abs(out.amplitudes) > 0.5)
        rows.append((code, format(int(j), f"0{n}b")))
    return rows
