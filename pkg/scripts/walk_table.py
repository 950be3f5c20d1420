"""Run the quantum-walk sequencer and print the step table, optionally for several seeds."""

import argparse
from collections import Counter

from qmuse.qsim import LocalBackend
from qmuse.qwalk import WalkConfig, format_table, generate_sequence
from qmuse.score import write_midi


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=24)
    ap.add_argument("--shots", type=int, default=500)
    ap.add_argument("--pitch", default="110")
    ap.add_argument("--duration", default="100")
    ap.add_argument("--seeds", type=int, default=1, help="number of seeds to run, starting at 0")
    ap.add_argument("--midi", help="write the seed-0 sequence here")
    args = ap.parse_args()

    backend = LocalBackend()
    visits = Counter()
    for seed in range(args.seeds):
        cfg = WalkConfig(args.steps, args.shots, args.pitch, args.duration, seed=seed)
        res = generate_sequence(cfg, backend)
        visits.update(res.pitch_codes)
        if seed == 0:
            print(format_table(res))
            if args.midi:
                write_midi(res.sequence, args.midi)
    if args.seeds > 1:
        total = sum(visits.values())
        print("\npitch-code occupancy over", args.seeds, "seeds")
        for code in sorted(visits):
            print(f"{code}\t{visits[code] / total:.3f}")


if __name__ == "__main__":
    main()
