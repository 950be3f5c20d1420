"""Roll the 9-qubit die many times and report per-bit and per-outcome statistics."""

import argparse

import numpy as np
from scipy.stats import chisquare

from qmuse.hyperdie import die_circuit
from qmuse.qsim import run_circuit


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shots", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    counts = run_circuit(die_circuit(), args.shots, args.seed)
    observed = np.array([counts.get(format(i, "09b"), 0) for i in range(512)])
    expected = args.shots / 512
    sigma = np.sqrt(args.shots * (1 / 512) * (511 / 512))
    z = (observed - expected) / sigma

    bits = np.array([[(i >> q) & 1 for q in range(9)] for i in range(512)])
    ones = observed @ bits / args.shots
    print(f"shots {args.shots}, seed {args.seed}")
    print("P(q_i = 1):", " ".join(f"q{q}={p:.4f}" for q, p in enumerate(ones)))
    print(f"outcomes seen {np.count_nonzero(observed)}/512, max |z| {np.abs(z).max():.2f}")
    print(f"cells beyond 3 sigma: {int(np.sum(np.abs(z) > 3))} (about {512 * 0.0027:.1f} expected)")
    print(f"chi-square p-value: {chisquare(observed).pvalue:.3f}")


if __name__ == "__main__":
    main()
