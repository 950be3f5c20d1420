"""``qmuse`` command-line entry point."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import hyperdie, markov, netbackend, qwalk, score, voice
from .config import FileConfig, load_config, markov_matrix, walk_kwargs
from .qsim import make_rng, truth_table

log = logging.getLogger("qmuse")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be >= 0")
    return value


def _code(text: str) -> str:
    try:
        return qwalk.check_code(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _backend(text: str) -> netbackend.EndpointSpec:
    try:
        return netbackend.EndpointSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config file")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument(
        "--backend", type=_backend, default=netbackend.EndpointSpec("local"),
        help="'local' (default) or 'remote[:HOST:PORT]'",
    )
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="qmuse", description="Quantum-driven voice synthesis and note sequencing.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("die", parents=[common], help="roll the 9-qubit hyper-die and decode a parameter set")

    p = sub.add_parser("voice", parents=[common], help="render hyper-die voice patches to WAV")
    p.add_argument("--sounds", type=_positive_int, default=1, help="number of sounds to synthesise")
    p.add_argument("--out", type=Path, default=Path("voice.wav"))
    p.add_argument("--concat", action="store_true", help="write all sounds into one file")
    p.add_argument("--sample-rate", type=_positive_int)

    p = sub.add_parser("walk", parents=[common], help="quantum-walk note sequence to MIDI")
    p.add_argument("--steps", type=_positive_int)
    p.add_argument("--shots", type=_positive_int)
    p.add_argument("--pitch", type=_code, help="initial pitch code (q0q1q2)")
    p.add_argument("--duration", type=_code, help="initial duration code (q0q1q2)")
    p.add_argument("--out", type=Path, default=Path("walk.mid"))
    p.add_argument("--tpq", type=_positive_int, default=480)
    p.add_argument("--tempo", type=float)

    p = sub.add_parser("markov", parents=[common], help="classical Markov-chain melody")
    p.add_argument("--chain", help="'rules', 'walk' (or a matrix in the config file)")
    p.add_argument("--start")
    p.add_argument("--length", type=_positive_int)
    p.add_argument("--out", type=Path, default=Path("markov.mid"))
    p.add_argument("--interactive", action="store_true", help="answer one note label per input line")
    p.add_argument("--tpq", type=_positive_int, default=480)
    p.add_argument("--tempo", type=float, default=120.0)

    p = sub.add_parser("serve", parents=[common], help="run the circuit server")
    p.add_argument("--host")
    p.add_argument("--port", type=int)

    sub.add_parser("gates", parents=[common], help="print the CX and Toffoli truth tables")
    return parser


def format_truth_tables() -> str:
    lines = []
    for kind, title in (("CX", "CX gate table"), ("CCX", "Toffoli gate table")):
        lines.append(title)
        lines.append("Input\tResult")
        lines.extend(f"|{a}>\t|{b}>" for a, b in truth_table(kind))
        lines.append("")
    return "\n".join(lines)


def format_die(meas: hyperdie.DieMeasurement, cfg: FileConfig) -> str:
    params = hyperdie.retrieve_parameters(meas, cfg.bank, cfg.rules)
    lines = [f"measurement [C8..C0]: {list(meas.bits)}", "Code\tBinary\tDecimal\tParameter\tValue"]
    for rule in cfg.rules:
        code = hyperdie.assemble_code(meas, rule.triple)
        written = "".join(f"C{i}" for i in rule.triple)
        lines.append(f"({written})\t{code:03b}\t{code}\t{rule.parameter_key}\t{params[rule.parameter_key]:g}")
    return "\n".join(lines)


def cmd_die(args, cfg: FileConfig) -> None:
    backend = args.backend.make()
    meas = hyperdie.roll_die(backend, args.seed)
    print(format_die(meas, cfg))


def _numbered(path: Path, i: int, n: int) -> Path:
    return path if n == 1 else path.with_name(f"{path.stem}_{i + 1}{path.suffix}")


def cmd_voice(args, cfg: FileConfig) -> None:
    backend = args.backend.make()
    settings = voice.RenderSettings(args.sample_rate) if args.sample_rate else cfg.render
    seeds = make_rng(args.seed).integers(0, 2**63, size=args.sounds)
    patches = []
    for s in seeds:
        meas = hyperdie.roll_die(backend, int(s))
        patches.append(hyperdie.retrieve_patch(meas, cfg.bank, cfg.rules, cfg.patch))
        log.info("roll %s -> fnd %.1f Hz, dur %.2f s", meas, patches[-1].fnds, patches[-1].dur)
    if args.concat:
        voice.write_wav(voice.render_sequence(patches, settings), args.out)
        print(args.out)
        return
    for i, patch in enumerate(patches):
        path = _numbered(args.out, i, len(patches))
        voice.write_wav(voice.render_voice(patch, settings), path)
        print(path)


def cmd_walk(args, cfg: FileConfig) -> None:
    kw = walk_kwargs(cfg.walk)
    for flag, key in (("steps", "steps"), ("shots", "shots"), ("pitch", "initial_pitch_code"),
                      ("duration", "initial_duration_code"), ("tempo", "tempo_bpm")):
        if getattr(args, flag) is not None:
            kw[key] = getattr(args, flag)
    kw["seed"] = args.seed
    result = qwalk.generate_sequence(qwalk.WalkConfig(**kw), args.backend.make())
    score.write_midi(result.sequence, args.out, args.tpq)
    print(qwalk.format_table(result))
    print(args.out)


def cmd_markov(args, cfg: FileConfig) -> None:
    section = cfg.markov
    matrix = markov_matrix(args.chain or section.get("matrix", "rules"))
    rng = make_rng(args.seed)
    if args.interactive:
        for line in sys.stdin:
            heard = line.strip()
            if not heard:
                continue
            try:
                print(markov.respond(matrix, heard, rng), flush=True)
            except ValueError as exc:
                print(f"error: {exc}", file=sys.stderr, flush=True)
        return
    start = args.start or section.get("start", matrix.labels[0])
    length = args.length or int(section.get("length", 16))
    notes = markov.generate(matrix, start, length, rng)
    seq = markov.to_sequence(notes, float(section.get("duration", 1.0)), args.tempo)
    score.write_midi(seq, args.out, args.tpq)
    print(" ".join(notes))
    print(args.out)


def cmd_serve(args, cfg: FileConfig) -> None:
    host, port = netbackend.default_endpoint()
    netbackend.serve((args.host or host, args.port if args.port is not None else port))


def cmd_gates(args, cfg: FileConfig) -> None:
    print(format_truth_tables(), end="")


COMMANDS = {
    "die": cmd_die, "voice": cmd_voice, "walk": cmd_walk,
    "markov": cmd_markov, "serve": cmd_serve, "gates": cmd_gates,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config)
        COMMANDS[args.command](args, cfg)
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"qmuse: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
