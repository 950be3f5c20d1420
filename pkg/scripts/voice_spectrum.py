"""Render a hyper-die voice patch and list the strongest spectral peaks over time."""

import argparse

import numpy as np

from qmuse.hyperdie import DieMeasurement, retrieve_patch
from qmuse.voice import RenderSettings, ramp, render_voice, spectral_peaks, write_wav


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bits", default="000001001", help="die reading C8..C0")
    ap.add_argument("--window", type=float, default=0.1)
    ap.add_argument("--segment", type=float, default=0.004, help="analysis segment (s); short = formant envelope")
    ap.add_argument("--peaks", type=int, default=4)
    ap.add_argument("--wav", help="also write the rendered patch here")
    args = ap.parse_args()

    patch = retrieve_patch(DieMeasurement(tuple(int(b) for b in args.bits)))
    buf = render_voice(patch, RenderSettings())
    if args.wav:
        write_wav(buf, args.wav)

    print(f"dur {patch.dur} s, f0 {patch.fnds} -> {patch.fnde} Hz")
    print("t(s)\tf1\tf2\tf3\tpeaks (Hz @ dB)")
    for t in np.arange(0.25, patch.dur - args.window / 2, 0.25):
        centres = [ramp(getattr(patch, f"fq{k}s"), getattr(patch, f"fq{k}e"), t, patch.dur) for k in (1, 2, 3)]
        peaks = spectral_peaks(buf, t - args.window / 2, args.window, segment=args.segment)[: args.peaks]
        found = "  ".join(f"{f:.0f}@{db:.1f}" for f, db in peaks)
        print(f"{t:.2f}\t" + "\t".join(f"{c:.0f}" for c in centres) + f"\t{found}")


if __name__ == "__main__":
    main()
