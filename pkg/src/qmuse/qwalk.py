"""Quantum walk over the vertices of a cube, used as a note sequencer.

Qubits q0..q2 hold the vertex (written ``"q0q1q2"``); q3 and q4 are the die.
After Hadamards on the die, doubly controlled inversions move the walker:

    (q3, q4) = (0, 1) -> invert q0
    (q3, q4) = (0, 0) -> invert q1
    (q3, q4) = (1, 1) -> invert q2
    (q3, q4) = (1, 0) -> stay put

Only q0..q2 are measured; the most frequent outcome over the shots becomes
the next vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .qsim import CCX, Backend, Circuit, H, X, make_rng, most_frequent
from .score import NoteEvent, Sequence

CODES = tuple(format(i, "03b") for i in range(8))

# Written code -> MIDI note; bit weights q0:+1, q1:+3, q2:+8 above C4.
DEFAULT_PITCHES = {
    "000": 60, "100": 61, "010": 63, "001": 68,
    "110": 64, "101": 69, "011": 71, "111": 72,
}

# Written code -> (quarter-note units, is_pause)
DEFAULT_DURATIONS = {
    "000": (1.0, False), "011": (0.5, False), "100": (2.0, False), "110": (4.0, False),
    "001": (1.0, True), "010": (0.5, True), "101": (2.0, True), "111": (4.0, True),
}

DIE_FLIPS = {(0, 1): 0, (0, 0): 1, (1, 1): 2, (1, 0): None}


def check_code(code: str) -> str:
    if len(code) != 3 or set(code) - {"0", "1"}:
        raise ValueError(f"cube code must be 3 bits, got {code!r}")
    return code


def hamming(a: str, b: str) -> int:
    return sum(x != y for x, y in zip(a, b))


def apply_die(code: str, die: tuple[int, int]) -> str:
    """Classical model of one walk step for a known die outcome ``(q3, q4)``."""
    check_code(code)
    q = DIE_FLIPS[tuple(die)]
    if q is None:
        return code
    bits = list(code)
    bits[q] = "1" if bits[q] == "0" else "0"
    return "".join(bits)


def neighbours(code: str) -> set[str]:
    """Codes reachable in one step (cube edges plus staying put)."""
    return {apply_die(code, d) for d in DIE_FLIPS}


def _register_code(code: str, die: str = "00") -> str:
    # Circuit initial codes are written q4 q3 q2 q1 q0.
    return die + code[::-1]


def build_walk_circuit(code: str, die: tuple[int, int] | None = None) -> Circuit:
    """Walk circuit armed at ``code``.

    Passing ``die`` replaces the Hadamards with a fixed basis preparation of
    q3/q4, which turns the circuit deterministic (used to check the wiring).
    """
    check_code(code)
    if die is None:
        init = _register_code(code)
        gates = [H(3), H(4)]
    else:
        init = _register_code(code, f"{die[1]}{die[0]}")
        gates = []
    gates += [
        X(3), CCX(3, 4, 0), X(3),
        X(3), X(4), CCX(3, 4, 1), X(4), X(3),
        CCX(3, 4, 2),
    ]
    return Circuit(5, gates, (0, 1, 2), init)


def key_to_code(key: str) -> str:
    """Count keys read q2q1q0; cube codes are written q0q1q2."""
    return key[::-1]


def walk_distribution(code: str) -> dict[str, float]:
    """Exact outcome probabilities keyed by written cube code."""
    probs = build_walk_circuit(code).outcome_probabilities()
    return {key_to_code(k): p for k, p in probs.items()}


def walk_step(backend: Backend, code: str, shots: int, seed: int) -> str:
    counts = backend.execute(build_walk_circuit(code), shots, seed)
    tally = {key_to_code(k): v for k, v in counts.items()}
    return most_frequent(tally)


def _check_dicts(pitches: dict, durations: dict) -> None:
    if set(pitches) != set(CODES) or set(durations) != set(CODES):
        raise ValueError("dictionaries must cover all 8 cube codes")
    for p in pitches.values():
        if not 0 <= int(p) <= 127:
            raise ValueError(f"pitch {p} outside MIDI range")
    for d, _ in durations.values():
        if not d > 0:
            raise ValueError("durations must be positive")


@dataclass
class DictionarySwitch:
    """From event ``step`` (0-based) onward, use these dictionaries."""

    step: int
    pitches: dict[str, int] | None = None
    durations: dict[str, tuple[float, bool]] | None = None


@dataclass
class WalkConfig:
    steps: int = 24
    shots: int = 500
    initial_pitch_code: str = "110"
    initial_duration_code: str = "100"
    pitches: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_PITCHES))
    durations: dict[str, tuple[float, bool]] = field(default_factory=lambda: dict(DEFAULT_DURATIONS))
    seed: int = 0
    schedule: list[DictionarySwitch] = field(default_factory=list)
    velocity: int = 96
    tempo_bpm: float = 120.0

    def __post_init__(self):
        if self.steps < 1 or self.shots < 1:
            raise ValueError("steps and shots must be >= 1")
        check_code(self.initial_pitch_code)
        check_code(self.initial_duration_code)
        self.durations = {k: (float(v[0]), bool(v[1])) for k, v in self.durations.items()}
        _check_dicts(self.pitches, self.durations)
        for sw in self.schedule:
            _check_dicts(sw.pitches or self.pitches, sw.durations or self.durations)

    def dictionaries_at(self, step: int):
        pitches, durations = self.pitches, self.durations
        for sw in sorted(self.schedule, key=lambda s: s.step):
            if sw.step <= step:
                pitches = sw.pitches or pitches
                durations = sw.durations or durations
        return pitches, durations


def decode_note(pitch_code: str, duration_code: str, pitches=None, durations=None, velocity: int = 96) -> NoteEvent:
    pitches = DEFAULT_PITCHES if pitches is None else pitches
    durations = DEFAULT_DURATIONS if durations is None else durations
    length, pause = durations[check_code(duration_code)]
    if pause:
        return NoteEvent(None, length, velocity)
    return NoteEvent(int(pitches[check_code(pitch_code)]), length, velocity)


@dataclass
class WalkResult:
    sequence: Sequence
    pitch_codes: list[str]
    duration_codes: list[str]


def generate_sequence(config: WalkConfig, backend: Backend) -> WalkResult:
    """Run the walk for ``config.steps`` events.

    The first event is the initial (pitch, duration) pair; each later event
    walks both codes one step.  The pitch walk keeps advancing under pauses.
    """
    seeds = make_rng(config.seed).integers(0, 2**63, size=(config.steps, 2))
    pitch_codes = [config.initial_pitch_code]
    duration_codes = [config.initial_duration_code]
    for i in range(1, config.steps):
        pitch_codes.append(walk_step(backend, pitch_codes[-1], config.shots, int(seeds[i, 0])))
        duration_codes.append(walk_step(backend, duration_codes[-1], config.shots, int(seeds[i, 1])))
    events = []
    for i, (pc, dc) in enumerate(zip(pitch_codes, duration_codes)):
        pitches, durations = config.dictionaries_at(i)
        events.append(decode_note(pc, dc, pitches, durations, config.velocity))
    return WalkResult(Sequence(events, config.tempo_bpm), pitch_codes, duration_codes)


def format_table(result: WalkResult) -> str:
    lines = ["Step\tPitch\tDuration\tEvent"]
    for i, (p, d, ev) in enumerate(zip(result.pitch_codes, result.duration_codes, result.sequence), 1):
        lines.append(f"{i}\t{p}\t{d}\t{ev}")
    return "\n".join(lines)
