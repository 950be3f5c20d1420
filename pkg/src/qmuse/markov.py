"""First-order Markov-chain note generators over the C major scale C4..C5."""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass

import numpy as np

from .score import NoteEvent, Sequence, note_to_midi

SCALE = ("C4", "D4", "E4", "F4", "G4", "A4", "B4", "C5")

T = 1.0 / 3.0

# Rows list successors in SCALE order.  The D4/F4 rows print as 0.33 in the
# source table; exact thirds keep the rows stochastic.
RULES_MATRIX = (
    (0.2, 0.2, 0.2, 0.0, 0.2, 0.0, 0.0, 0.2),
    (T, 0.0, T, 0.0, T, 0.0, 0.0, 0.0),
    (0.0, 0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0),
    (T, 0.0, T, 0.0, T, 0.0, 0.0, 0.0),
    (0.25, 0.0, 0.0, 0.25, 0.25, 0.25, 0.0, 0.0),
    (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0),
    (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0),
    (0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.0),
)

RANDOM_WALK_MATRIX = (
    (0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    (0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0),
    (0.0, 0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0),
    (0.0, 0.0, 0.5, 0.0, 0.5, 0.0, 0.0, 0.0),
    (0.0, 0.0, 0.0, 0.5, 0.0, 0.5, 0.0, 0.0),
    (0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.5, 0.0),
    (0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.5),
    (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0),
)

ROW_SUM_TOL = 1e-9


class DegenerateStateError(ValueError):
    """The current note has no outgoing transitions."""


@dataclass(frozen=True)
class TransitionMatrix:
    labels: tuple[str, ...]
    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        object.__setattr__(self, "labels", tuple(self.labels))
        n = len(self.labels)
        if rows.shape != (n, n):
            raise ValueError(f"matrix shape {rows.shape} does not match {n} labels")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_lookup", {label: i for i, label in enumerate(self.labels)})
        object.__setattr__(self, "_cdfs", [list(itertools.accumulate(r)) for r in rows.tolist()])

    def index(self, label: str) -> int:
        try:
            return self._lookup[label]
        except KeyError:
            raise ValueError(f"unknown note label {label!r}") from None

    def row(self, label: str) -> np.ndarray:
        return self.rows[self.index(label)]

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "rows": self.rows.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "TransitionMatrix":
        return cls(tuple(d.get("labels", SCALE)), d["rows"])


def rules_chain() -> TransitionMatrix:
    return TransitionMatrix(SCALE, RULES_MATRIX)


def random_walk_chain() -> TransitionMatrix:
    return TransitionMatrix(SCALE, RANDOM_WALK_MATRIX)


BUILTIN = {"rules": rules_chain, "walk": random_walk_chain}


@dataclass
class Violation:
    row: str
    reason: str


def validate_matrix(matrix: TransitionMatrix) -> list[Violation]:
    """Empty list means the matrix is row-stochastic."""
    problems = []
    for label, row in zip(matrix.labels, matrix.rows):
        if np.any(row < 0):
            problems.append(Violation(label, "negative entry"))
        if not np.all(np.isfinite(row)):
            problems.append(Violation(label, "non-finite entry"))
        s = float(np.sum(row))
        if abs(s - 1.0) > ROW_SUM_TOL:
            problems.append(Violation(label, f"row sums to {s:.12g}"))
    return problems


def next_note(matrix: TransitionMatrix, current: str, rng: np.random.Generator) -> str:
    # Inverse CDF in label order, exactly one uniform draw per call.
    k = matrix.index(current)
    cdf = matrix._cdfs[k]
    total = cdf[-1]
    if not total > 0:
        raise DegenerateStateError(f"no transitions out of {current!r}")
    i = bisect.bisect_right(cdf, rng.random() * total)
    # Never land on a zero-probability entry (rounding at the top of the CDF).
    while i >= len(cdf) or cdf[i] == (cdf[i - 1] if i else 0.0):
        i -= 1
    return matrix.labels[i]


def generate(matrix: TransitionMatrix, start: str, length: int, rng: np.random.Generator) -> list[str]:
    if length < 1:
        raise ValueError("length must be >= 1")
    matrix.index(start)
    notes = [start]
    for _ in range(length - 1):
        notes.append(next_note(matrix, notes[-1], rng))
    return notes


def to_sequence(notes: list[str], duration: float = 1.0, tempo_bpm: float = 120.0) -> Sequence:
    return Sequence([NoteEvent(note_to_midi(n), duration) for n in notes], tempo_bpm)


def respond(matrix: TransitionMatrix, heard: str, rng: np.random.Generator) -> str:
    """Interactive mode: answer a played note with a successor."""
    return next_note(matrix, heard.strip(), rng)
