"""Mesh distances against radial closed forms, level by level."""

from __future__ import annotations

import argparse
import time

import numpy as np
from scipy.integrate import quad

from diskgeo.geometry import build_mesh, mesh_distance
from diskgeo.weight import build_weight


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-level", type=int, default=3)
    args = ap.parse_args()
    exp11 = build_weight("exp:a=1,b=1")
    proxy = build_weight("logproxy:alpha=0")
    cases = [
        ("logproxy d_tau(0, 0.9)", proxy, 0.9, "tau", np.log(10.0)),
        ("exp11 d_phi(0, 0.9)", exp11, 0.9, "phi", 9.0),
        ("exp11 d_tau(0, 0.5)", exp11, 0.5, "tau", quad(lambda t: 1 / exp11.tau(t), 0, 0.5, limit=200)[0]),
    ]
    print(f"{'case':26s} {'level':>5s} {'nodes':>8s} {'value':>12s} {'rel.err':>9s} {'sec':>6s}")
    for name, model, b, metric, ref in cases:
        for level in range(args.max_level + 1):
            t = time.perf_counter()
            mesh = build_mesh(model, level)
            v, _, _ = mesh_distance(mesh, 0, b, metric)
            dt = time.perf_counter() - t
            print(f"{name:26s} {level:5d} {mesh.n_nodes:8d} {v:12.6f} {abs(v / ref - 1):9.2e} {dt:6.1f}")


if __name__ == "__main__":
    main()
