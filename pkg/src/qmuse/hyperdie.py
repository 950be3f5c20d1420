"""Nine-qubit "hyper-die" and the code -> synthesis-parameter lookup."""

from __future__ import annotations

from dataclasses import dataclass, fields

from .qsim import Backend, Circuit, H
from .voice import VoicePatch

NUM_QUBITS = 9

FAMILIES = ("fnd", "dur", "fq1", "fq2", "fq3", "amp1", "amp2", "amp3", "bw1", "bw2", "bw3")


@dataclass(frozen=True)
class ParameterBank:
    """Eight candidate values per parameter family, indexed by a 3-bit code."""

    fnd: tuple[float, ...] = (277.2, 185.0, 207.6, 415.3, 155.6, 311.2, 369.9, 233.1)
    dur: tuple[float, ...] = (3.25, 2.0, 2.75, 4.0, 1.5, 3.75, 2.5, 4.5)
    fq1: tuple[float, ...] = (310.0, 270.0, 290.0, 350.0, 650.0, 400.0, 430.0, 470.0)
    fq2: tuple[float, ...] = (600.0, 1150.0, 800.0, 1870.0, 1080.0, 1620.0, 1700.0, 1040.0)
    fq3: tuple[float, ...] = (2250.0, 2100.0, 2800.0, 2650.0, 2500.0, 2900.0, 2600.0, 2750.0)
    amp1: tuple[float, ...] = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    amp2: tuple[float, ...] = (-15, -7, -11, -6, -14, -9, -20, -30)
    amp3: tuple[float, ...] = (-9, -21, -12, -32, -17, -16, -10, -18)
    bw1: tuple[float, ...] = (35, 60, 45, 70, 80, 75, 58, 85)
    bw2: tuple[float, ...] = (65, 70, 90, 75, 83, 95, 60, 87)
    bw3: tuple[float, ...] = (128, 115, 110, 112, 98, 104, 124, 120)

    def __post_init__(self):
        for f in fields(self):
            values = tuple(getattr(self, f.name))
            object.__setattr__(self, f.name, values)
            if len(values) != 8:
                raise ValueError(f"family {f.name} needs 8 values, got {len(values)}")
            if f.name.startswith("amp"):
                if any(v > 0 for v in values):
                    raise ValueError(f"{f.name} values are attenuations and must be <= 0 dB")
            elif any(v <= 0 for v in values):
                raise ValueError(f"{f.name} values must be positive")

    def family(self, name: str) -> tuple[float, ...]:
        if name not in FAMILIES:
            raise KeyError(name)
        return getattr(self, name)

    @classmethod
    def from_dict(cls, d: dict) -> "ParameterBank":
        unknown = set(d) - set(FAMILIES)
        if unknown:
            raise ValueError(f"unknown parameter families: {sorted(unknown)}")
        return cls(**{k: tuple(v) for k, v in d.items()})


@dataclass(frozen=True)
class CodeRule:
    parameter_key: str
    triple: tuple[int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "triple", tuple(int(i) for i in self.triple))
        if len(self.triple) != 3 or any(not 0 <= i < NUM_QUBITS for i in self.triple):
            raise ValueError(f"bad triple {self.triple} for {self.parameter_key}")

    @property
    def family(self) -> str:
        """``fq2e`` -> ``fq2``; ``dur`` -> ``dur``."""
        key = self.parameter_key
        if key == "dur":
            return key
        return key[:-1] if key[-1] in "se" else key


# Written triples (leftmost = most significant bit) for each parameter.
CANONICAL_RULES = (
    CodeRule("fq1s", (8, 7, 6)),
    CodeRule("fq1e", (6, 7, 8)),
    CodeRule("fq2s", (5, 4, 3)),
    CodeRule("fq2e", (3, 4, 5)),
    CodeRule("fq3s", (2, 1, 0)),
    CodeRule("fq3e", (0, 1, 2)),
    CodeRule("amp1s", (7, 6, 5)),
    CodeRule("amp1e", (5, 6, 7)),
    CodeRule("amp2s", (4, 3, 2)),
    CodeRule("amp2e", (2, 3, 4)),
    CodeRule("amp3s", (8, 5, 2)),
    CodeRule("amp3e", (2, 5, 8)),
    CodeRule("bw1s", (7, 4, 3)),
    CodeRule("bw1e", (3, 4, 7)),
    CodeRule("bw2s", (6, 3, 0)),
    CodeRule("bw2e", (0, 3, 6)),
    CodeRule("bw3s", (8, 7, 0)),
    CodeRule("bw3e", (0, 7, 8)),
    CodeRule("fnds", (8, 1, 0)),
    CodeRule("fnde", (0, 1, 8)),
    CodeRule("dur", (5, 3, 1)),
)


@dataclass(frozen=True)
class DieMeasurement:
    """Nine classical bits, stored in the order ``[C8, C7, ..., C0]``."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if len(bits) != NUM_QUBITS or any(b not in (0, 1) for b in bits):
            raise ValueError(f"a die measurement is 9 bits, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    def c(self, i: int) -> int:
        """Bit ``C_i``."""
        return self.bits[NUM_QUBITS - 1 - i]

    @classmethod
    def from_key(cls, key: str) -> "DieMeasurement":
        return cls(tuple(int(ch) for ch in key))

    def __str__(self):
        return "".join(map(str, self.bits))


def die_circuit(hadamards: bool = True) -> Circuit:
    """All nine qubits through H, all measured.  ``hadamards=False`` is a test harness."""
    gates = [H(q) for q in range(NUM_QUBITS)] if hadamards else []
    return Circuit(NUM_QUBITS, gates, tuple(range(NUM_QUBITS)))


def roll_die(backend: Backend, seed: int, circuit: Circuit | None = None) -> DieMeasurement:
    """One shot of the die; a die that sampled many shots would stop being random."""
    counts = backend.execute(circuit or die_circuit(), 1, seed)
    (key,) = counts
    return DieMeasurement.from_key(key)


def assemble_code(meas: DieMeasurement, triple: tuple[int, int, int]) -> int:
    if len(triple) != 3 or any(not 0 <= i < NUM_QUBITS for i in triple):
        raise ValueError(f"triple indices must lie in 0..8, got {triple!r}")
    i, j, k = triple
    return 4 * meas.c(i) + 2 * meas.c(j) + meas.c(k)


def retrieve_parameters(
    meas: DieMeasurement,
    bank: ParameterBank | None = None,
    rules: tuple[CodeRule, ...] = CANONICAL_RULES,
) -> dict[str, float]:
    bank = bank or ParameterBank()
    out = {}
    for rule in rules:
        try:
            values = bank.family(rule.family)
        except KeyError:
            raise KeyError(f"rule {rule.parameter_key!r} maps to no parameter family") from None
        out[rule.parameter_key] = values[assemble_code(meas, rule.triple)]
    return out


def retrieve_patch(
    meas: DieMeasurement,
    bank: ParameterBank | None = None,
    rules: tuple[CodeRule, ...] = CANONICAL_RULES,
    base: VoicePatch | None = None,
) -> VoicePatch:
    """Fill a VoicePatch from the die; fields no rule selects keep ``base`` values."""
    params = retrieve_parameters(meas, bank, rules)
    unknown = set(params) - {f.name for f in fields(VoicePatch)}
    if unknown:
        raise KeyError(f"rules select unknown patch fields: {sorted(unknown)}")
    return (base or VoicePatch()).replace(**params)


def rules_from_config(items: list[dict]) -> tuple[CodeRule, ...]:
    rules = tuple(CodeRule(str(d["parameter"]), tuple(d["triple"])) for d in items)
    keys = [r.parameter_key for r in rules]
    if len(keys) != len(set(keys)):
        raise ValueError("parameter keys must be unique within a rule set")
    return rules
