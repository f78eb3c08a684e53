"""Boundedness, compactness, angular-derivative bands and F-sets for the
example maps on a chosen weight."""

from __future__ import annotations

import argparse
from collections import Counter

from diskgeo.criteria import DEFAULT, beta_classes, boundedness, compactness, f_set
from diskgeo.selfmap import parse_map
from diskgeo.weight import build_weight

MAPS = ("id", "scale:0.5", "affine:0.5,0.5", "moebius:0.5", "mono:2", "perturb:c=0.05,k=3",
        "convex:t=0.5(id)(scale:0.5)")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--weight", default="exp:a=1,b=1")
    ap.add_argument("--maps", nargs="*", default=MAPS)
    args = ap.parse_args()
    model = build_weight(args.weight)
    print(f"weight {model.spec}: c1={model.c1:.4f} c2={model.c2:.4f} m_tau={model.m_tau:.4f}")
    for text in args.maps:
        m = parse_map(text)
        b = boundedness(model, m)
        c = compactness(model, m)
        betas = Counter(x.beta_class for x in beta_classes(model, m, DEFAULT, DEFAULT.angles()))
        F = f_set(model, m)
        print(f"{text:28s} bounded={b.status.value:9s} compact={c.reason:17s} "
              f"|F|={F.members.size:2d} beta={dict(betas)}")


if __name__ == "__main__":
    main()
