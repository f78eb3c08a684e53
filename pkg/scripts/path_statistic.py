"""Per-ring growth of the path statistic sup |phi_t - phi_s| / tau(phi_u) / |t - s|
for convex combinations of two maps, at several truncation radii."""

from __future__ import annotations

import argparse

import numpy as np

from diskgeo.criteria import path_connectedness
from diskgeo.selfmap import parse_map
from diskgeo.weight import build_weight


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--phi", default="id")
    ap.add_argument("--psi", default="perturb:c=0.05,k=3")
    ap.add_argument("--step", type=float, default=0.1)
    args = ap.parse_args()
    phi, psi = parse_map(args.phi), parse_map(args.psi)
    t = np.linspace(0, 1, int(round(1 / args.step)) + 1)
    for r_max in (0.999, 0.99999, 1 - 1e-6):
        rep = path_connectedness(build_weight("exp:a=1,b=1", r_max=r_max), None, phi, psi, t)
        tail = ", ".join(f"{v:.3g}" for v in rep.ring_profile.values[-4:])
        print(f"r_max={r_max:<9.7g} lipschitz={rep.lipschitz:.4g} ring tail [{tail}] "
              f"trend={rep.ring_profile.trend.value} all_bounded={rep.all_bounded}")


if __name__ == "__main__":
    main()
