"""Pullback box statistics along the radius towards 1 for the example maps."""

from __future__ import annotations

import argparse

from diskgeo.carleson import PullbackSampler
from diskgeo.selfmap import parse_map
from diskgeo.weight import build_weight


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--weight", default="exp:a=1,b=1")
    ap.add_argument("--delta", type=float, default=0.2)
    ap.add_argument("--samples", type=float, default=1e6)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    model = build_weight(args.weight)
    centers = (0.5, 0.7, 0.8, 0.9, 0.95, 0.97)
    print("map".ljust(16) + "".join(f"{c:>13}" for c in centers))
    for text in ("id", "scale:0.5", "affine:0.5,0.5", "moebius:0.5"):
        s = PullbackSampler(model, parse_map(text), int(args.samples), args.seed)
        row = []
        for c in centers:
            b = s.box(c, args.delta)
            row.append(f"{b.estimate:12.4g}{'*' if 'Clamped' in b.flags else ' '}")
        print(text.ljust(16) + "".join(row))
    print("* ratio clamped at the cap")


if __name__ == "__main__":
    main()
