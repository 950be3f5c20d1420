"""Compare empirical transition frequencies of a long Markov run with the matrix."""

import argparse

import numpy as np

from qmuse.markov import BUILTIN, generate
from qmuse.qsim import make_rng


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--chain", choices=sorted(BUILTIN), default="walk")
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--start", default="C4")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    m = BUILTIN[args.chain]()
    notes = generate(m, args.start, args.steps + 1, make_rng(args.seed))
    counts = np.zeros((8, 8))
    for a, b in zip(notes, notes[1:]):
        counts[m.index(a), m.index(b)] += 1
    visits = counts.sum(axis=1)
    with np.errstate(invalid="ignore"):
        freq = counts / visits[:, None]
    print("state\tvisits\tmax |freq - p|")
    for i, label in enumerate(m.labels):
        err = np.nanmax(np.abs(freq[i] - m.rows[i])) if visits[i] else float("nan")
        print(f"{label}\t{int(visits[i])}\t{err:.4f}")
    print("forbidden transitions seen:", int(counts[m.rows == 0].sum()))


if __name__ == "__main__":
    main()
