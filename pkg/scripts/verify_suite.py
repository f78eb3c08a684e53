"""Run the inequality checks and write the results as JSON."""

from __future__ import annotations

import argparse
import json
import time

from diskgeo.verify import SUITES, run_suite
from diskgeo.weight import build_weight


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--weight", default="exp:a=1,b=1")
    ap.add_argument("--suite", default="all", choices=("all",) + SUITES)
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    model = build_weight(args.weight)
    t = time.perf_counter()
    res = run_suite(model, args.suite, args.points, args.seed)
    for r in res:
        print(f"{r.name:26s} n={r.n_points:4d} violations={r.n_violations} worst={r.worst_ratio:.4g} "
              f"stability={r.stability:.3f} passed={r.passed}")
    print(f"{time.perf_counter() - t:.0f}s")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump([r.to_dict() for r in res], fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
