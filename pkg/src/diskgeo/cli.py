"""Command line entry point: ``diskgeo <subcommand> ...``.

Every report is a JSON object with ``schema = "diskgeo/1"``, the tool
version, the full run configuration and the result. Exit codes: 0 on
Satisfied/pass, 2 on Violated/fail, 3 on Inconclusive, 1 on usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import subprocess
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DiskGeoError, HypothesisViolated
from .profiles import Trend

SCHEMA = "diskgeo/1"
EXIT = {"Satisfied": 0, "Violated": 2, "Inconclusive": 3}
COMMANDS = ("dist", "analyze", "diff", "sumdiff", "carleson", "verify", "path", "weight-validate")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a report."""

    command: str
    weight: str
    maps: dict = field(default_factory=dict)
    max_level: int = 9
    tol_rel: float = 0.01
    r_max: float = 1.0 - 1e-6
    seed: int = 0
    output: str | None = None
    csv: str | None = None
    heatmap: str | None = None
    eps_zero: float = 1e-4
    cap: float = 1e6
    eps_f: float = 1e-3
    n_angles: int = 64
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def tool_version() -> str:
    """``git describe`` of the source tree when available, else the package version."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent, capture_output=True, text=True, timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _clean(x):
    """JSON-safe copy: non-finite floats become strings, arrays become lists."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return x
    if isinstance(x, complex):
        return [_clean(x.real), _clean(x.imag)]
    if hasattr(x, "value") and isinstance(getattr(x, "value"), str):
        return x.value
    return x


def dumps(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


# -- parsing helpers ----------------------------------------------------------------------


def parse_point(text: str) -> complex:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"point {text!r} must be 'x,y'") from exc
    return complex(x, y)


def parse_tgrid(text: str) -> np.ndarray:
    try:
        a, b, h = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"t-grid {text!r} must be 'start:stop:step'") from exc
    if not (h > 0 and b > a):
        raise UsageError("t-grid needs stop > start and step > 0")
    n = int(round((b - a) / h))
    return np.linspace(a, b, n + 1)


_MAP_START = re.compile(r"^\s*(id\s*$|[A-Za-z]+\s*[:(])")


def split_maps(text: str) -> list[str]:
    """Split a comma list of map specs; commas inside a spec's own parameter
    list (``affine:0.5,0.5``) are kept. ``;`` is an unambiguous separator."""
    if ";" in text:
        return [t.strip() for t in text.split(";") if t.strip()]
    parts, depth, cur = [], 0, ""
    for ch in text:
        depth += ch == "("
        depth -= ch == ")"
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    out: list[str] = []
    for tok in parts:
        if out and not _MAP_START.match(tok):
            out[-1] += "," + tok
        else:
            out.append(tok)
    return [t.strip() for t in out if t.strip()]


def _cfg(cfg: RunConfig):
    from .criteria import CriteriaConfig

    return CriteriaConfig(n_angles=cfg.n_angles, eps_zero=cfg.eps_zero, cap=cfg.cap, eps_f=cfg.eps_f).validate()


def _map(text: str):
    from .selfmap import check_selfmap, parse_map

    try:
        m = parse_map(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    chk = check_selfmap(m, n_samples=20_000)
    if not chk.ok:
        raise UsageError(f"{text!r} is not a self-map of the disk: sup |m| = {chk.sup_modulus:.6g}")
    return m


# -- output ---------------------------------------------------------------------------------


def write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


def _profile_rows(profiles, angles):
    for a, p in zip(angles, profiles):
        for r, v in zip(p.radii, p.values):
            yield float(a), float(r), float(v), p.trend.value


def polar_raster(n_r: int = 24, n_theta: int = 64, r_hi: float = 0.99):
    edges = np.linspace(0.0, r_hi, n_r + 1)
    rc = 0.5 * (edges[1:] + edges[:-1])
    th = 2 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    return edges, rc, th


def write_heatmap(path: str, edges, values: np.ndarray, title: str) -> None:
    """Annular-sector raster with a linear colour scale; the scale bounds are
    embedded as text and as ``data-vmin``/``data-vmax`` attributes."""
    n_r, n_t = values.shape
    fin = values[np.isfinite(values)]
    vmin = float(fin.min()) if fin.size else 0.0
    vmax = float(fin.max()) if fin.size else 1.0
    span = vmax - vmin if vmax > vmin else 1.0
    R, c = 200.0, 220.0
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="560" height="470" '
        f'data-vmin="{vmin!r}" data-vmax="{vmax!r}" data-scale="linear">',
        f"<title>{title}</title>",
    ]
    dt = 2 * np.pi / n_t
    for i in range(n_r):
        r0, r1 = R * edges[i] / edges[-1], R * edges[i + 1] / edges[-1]
        for j in range(n_t):
            v = values[i, j]
            if np.isfinite(v):
                q = (v - vmin) / span
                col = f"rgb({int(255 * q)},{int(64 + 96 * (1 - abs(2 * q - 1)))},{int(255 * (1 - q))})"
            else:
                col = "rgb(200,200,200)"
            a0, a1 = j * dt, (j + 1) * dt
            p = [(c + r1 * np.cos(a0), c - r1 * np.sin(a0)), (c + r1 * np.cos(a1), c - r1 * np.sin(a1)),
                 (c + r0 * np.cos(a1), c - r0 * np.sin(a1)), (c + r0 * np.cos(a0), c - r0 * np.sin(a0))]
            d = (f"M{p[0][0]:.3f},{p[0][1]:.3f} A{r1:.3f},{r1:.3f} 0 0 0 {p[1][0]:.3f},{p[1][1]:.3f} "
                 f"L{p[2][0]:.3f},{p[2][1]:.3f} A{r0:.3f},{r0:.3f} 0 0 1 {p[3][0]:.3f},{p[3][1]:.3f} Z")
            out.append(f'<path d="{d}" fill="{col}" stroke="none"/>')
    for k in range(11):
        q = k / 10
        col = f"rgb({int(255 * q)},{int(64 + 96 * (1 - abs(2 * q - 1)))},{int(255 * (1 - q))})"
        out.append(f'<rect x="470" y="{420 - 38 * k}" width="20" height="38" fill="{col}"/>')
    out.append(f'<text x="495" y="440" font-size="11">{vmin:.4g}</text>')
    out.append(f'<text x="495" y="45" font-size="11">{vmax:.4g}</text>')
    out.append(f'<text x="10" y="460" font-size="12">{title} (linear scale {vmin:.4g} to {vmax:.4g})</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


# -- subcommands ----------------------------------------------------------------------------


def cmd_dist(args, cfg: RunConfig, model):
    from .geometry import dist_phi, dist_tau

    z, w = parse_point(args.from_), parse_point(args.to)
    f = dist_tau if args.metric == "tau" else dist_phi
    res = f(model, z, w, tol_rel=cfg.tol_rel, max_level=cfg.max_level)
    return res.to_dict(), 0 if res.converged else 3


def cmd_analyze(args, cfg: RunConfig, model):
    from .criteria import beta_classes, boundedness, compactness, f_set

    m = _map(args.map)
    c = _cfg(cfg)
    b = boundedness(model, m, c)
    k = compactness(model, m, c)
    verdict = k.reason if b.status.value != "Violated" else "Unbounded"
    res = {
        "map": str(m),
        "verdict": verdict,
        "boundedness": b.to_dict(with_profiles=False),
        "compactness": k.to_dict(with_profiles=False),
        "beta_classes": [{"class": x.beta_class, "tail": x.tail} for x in beta_classes(model, m, c, c.angles())],
        "f_set": f_set(model, m, None, c).to_dict(),
    }
    if cfg.csv:
        write_csv(cfg.csv, ["angle", "radius", "value", "trend"], _profile_rows(k.profiles, k.boundary_angles))
    return res, EXIT[k.status.value]


def cmd_diff(args, cfg: RunConfig, model):
    from .criteria import compact_difference, gamma_values

    phi, psi = _map(args.phi), _map(args.psi)
    v = compact_difference(model, None, phi, psi, _cfg(cfg), args.mode)
    res = {"phi": str(phi), "psi": str(psi), "verdict": v.to_dict()}
    if cfg.csv:
        write_csv(cfg.csv, ["angle", "radius", "gamma", "trend"], _profile_rows(v.profiles, v.boundary_angles))
    if cfg.heatmap:
        edges, rc, th = polar_raster()
        z = rc[:, None] * np.exp(1j * th)[None, :]
        g = gamma_values(model, phi, psi, z, "surrogate", cfg.cap)[0]
        write_heatmap(cfg.heatmap, edges, g, f"Gamma({phi}, {psi})")
    return res, EXIT[v.status.value]


def cmd_sumdiff(args, cfg: RunConfig, model):
    from .criteria import finite_sum_difference

    phi = _map(args.phi)
    parts = [_map(t) for t in split_maps(args.parts)]
    v = finite_sum_difference(model, None, phi, parts, _cfg(cfg), args.mode)
    res = {"phi": str(phi), "parts": [str(p) for p in parts], "verdict": v.to_dict()}
    if cfg.csv:
        write_csv(cfg.csv, ["angle", "radius", "gamma", "trend"], _profile_rows(v.profiles, v.boundary_angles))
    return res, EXIT[v.status.value]


def cmd_carleson(args, cfg: RunConfig, model):
    from .carleson import PullbackSampler, vanishing_profile

    m = _map(args.map)
    delta = model.m_tau / 2 if args.delta is None else args.delta
    n = int(float(args.samples))
    vp = vanishing_profile(model, m, delta, n_samples=n, seed=cfg.seed, eps_zero=cfg.eps_zero)
    trend = vp.trend
    status = {Trend.TO_ZERO: "Satisfied", Trend.BOUNDED: "Violated", Trend.TO_INFINITY: "Violated"}.get(trend, "Inconclusive")
    res = {
        "map": str(m),
        "delta": delta,
        "boxes": [b.to_dict() for b in vp.boxes],
        "summary": {"trend": trend.value, "vanishing": trend == Trend.TO_ZERO, "status": status,
                    "profile": vp.profile.to_dict(), "per_angle": [p.trend.value for p in vp.per_angle]},
    }
    if cfg.csv:
        rows = ((abs(b.center), float(np.angle(b.center)), b.estimate, b.std_error) for b in vp.boxes)
        write_csv(cfg.csv, ["center_r", "center_theta", "estimate", "stderr"], rows)
    if cfg.heatmap:
        s = PullbackSampler(model, m, n, cfg.seed)
        edges, rc, th = polar_raster(12, 32, 0.9)
        vals = np.array([[s.box(r * np.exp(1j * t), delta).estimate for t in th] for r in rc])
        write_heatmap(cfg.heatmap, edges, vals, f"box statistic of {m}, delta={delta:.4g}")
    return res, EXIT[status]


def cmd_verify(args, cfg: RunConfig, model):
    from .verify import run_suite

    suite = {"diff": "diff"}.get(args.suite, args.suite)
    results = run_suite(model, suite, n=args.points, seed=cfg.seed)
    bad = any(r.explicit_constant and r.n_violations > 0 for r in results)
    if cfg.csv:
        write_csv(cfg.csv, ["name", "n_points", "n_violations", "worst_ratio", "stability", "passed"],
                  ((r.name, r.n_points, r.n_violations, r.worst_ratio, r.stability, r.passed) for r in results))
    return [r.to_dict() for r in results], 2 if bad else 0


def cmd_path(args, cfg: RunConfig, model):
    from .criteria import path_connectedness

    phi, psi = _map(args.phi), _map(args.psi)
    t = parse_tgrid(args.tgrid)
    rep = path_connectedness(model, None, phi, psi, t, _cfg(cfg), seed=cfg.seed)
    if cfg.csv:
        write_csv(cfg.csv, ["t", "s", "stat", "ratio"], ((s["t"], s["s"], s["stat"], s["ratio"]) for s in rep.step_stats))
    return {"phi": str(phi), "psi": str(psi), "report": rep.to_dict()}, EXIT[rep.status.value]


def cmd_weight_validate(args, cfg: RunConfig, model):
    from .weight import validate_class_w

    rep = validate_class_w(model)
    return {"model": model.to_dict(), "validation": rep.to_dict()}, 0 if rep.passed else 2


HANDLERS = {
    "dist": cmd_dist, "analyze": cmd_analyze, "diff": cmd_diff, "sumdiff": cmd_sumdiff,
    "carleson": cmd_carleson, "verify": cmd_verify, "path": cmd_path, "weight-validate": cmd_weight_validate,
}


# -- argument parsing -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diskgeo", description="Weighted disk geometry and composition criteria.")
    p.add_argument("--version", action="version", version=f"diskgeo {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--weight", help="weight spec, e.g. exp:a=1,b=1, logproxy:alpha=0 or custom:FILE.json")
    common.add_argument("--r-max", type=float, default=1.0 - 1e-6, help="truncation radius (default 1-1e-6)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=0.01, help="relative tolerance for mesh refinement")
    common.add_argument("--max-level", type=int, default=9)
    common.add_argument("--eps-zero", type=float, default=1e-4)
    common.add_argument("--cap", type=float, default=1e6)
    common.add_argument("--eps-f", type=float, default=1e-3)
    common.add_argument("--angles", type=int, default=64, help="number of boundary angles")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--csv", help="write CSV profiles here")
    common.add_argument("--config", help="TOML file whose keys override the defaults")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")

    s = sub.add_parser("dist", parents=[common], help="mesh distance between two points")
    s.add_argument("--metric", choices=("tau", "phi"), default="tau")
    s.add_argument("--from", dest="from_", required=False, default="0,0")
    s.add_argument("--to", required=False, default="0.5,0")

    s = sub.add_parser("analyze", parents=[common], help="boundedness and compactness of one map")
    s.add_argument("--map", default="id")

    for name, hm in (("diff", True), ("path", False)):
        s = sub.add_parser(name, parents=[common], help="difference of two maps" if hm else "path between two maps")
        s.add_argument("--phi", default="id")
        s.add_argument("--psi", default="id")
        if hm:
            s.add_argument("--mode", choices=("surrogate", "exact"), default="surrogate")
            s.add_argument("--heatmap", help="SVG heatmap of Gamma over the disk")
        else:
            s.add_argument("--tgrid", default="0:1:0.1")

    s = sub.add_parser("sumdiff", parents=[common], help="finite sum of differences")
    s.add_argument("--phi", default="id")
    s.add_argument("--parts", default="id", help="comma or ';' separated map specs")
    s.add_argument("--mode", choices=("surrogate", "exact"), default="surrogate")

    s = sub.add_parser("carleson", parents=[common], help="pullback measure box statistics")
    s.add_argument("--map", default="id")
    s.add_argument("--delta", type=float, default=None, help="box size (default m_tau/2)")
    s.add_argument("--samples", default="1e6")
    s.add_argument("--heatmap", help="SVG heatmap of box statistics")

    s = sub.add_parser("verify", parents=[common], help="numerical checks of pointwise inequalities")
    s.add_argument("--suite", default="all",
                   choices=("all", "submean", "deriv_submean", "diff", "separation", "impot", "expdecay", "inclusions"))
    s.add_argument("--points", type=int, default=200, help="base density; checks also run at 4x")

    sub.add_parser("weight-validate", parents=[common], help="class membership checks for a weight")
    return p


def load_config(path: str) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    return {k.replace("-", "_"): v for k, v in data.items()}


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        raise UsageError(f"choose a subcommand: {', '.join(COMMANDS)}")
    if args.config:
        over = load_config(args.config)
        sp = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sp._actions}
        unknown = set(over) - known
        if unknown:
            raise UsageError(f"unknown config keys for {args.command}: {', '.join(sorted(unknown))}")
        explicit = {a.dest for a in sp._actions if any(o in argv for o in a.option_strings)}
        for k, v in over.items():
            if k not in explicit:
                setattr(args, k, v)
    return args


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    except UsageError as exc:
        print(f"diskgeo: error: {exc}", file=sys.stderr)
        return 1
    from .weight import build_weight

    if not args.weight:
        print("diskgeo: error: --weight is required (e.g. --weight exp:a=1,b=1)", file=sys.stderr)
        return 1
    maps = {k: getattr(args, k) for k in ("map", "phi", "psi", "parts") if hasattr(args, k)}
    extra = {k: v for k, v in vars(args).items() if k in ("metric", "from_", "to", "mode", "tgrid", "delta", "samples", "suite", "points")}
    cfg = RunConfig(
        command=args.command, weight=args.weight, maps=maps, max_level=args.max_level, tol_rel=args.tol,
        r_max=args.r_max, seed=args.seed, output=args.out, csv=args.csv, heatmap=getattr(args, "heatmap", None),
        eps_zero=args.eps_zero, cap=args.cap, eps_f=args.eps_f, n_angles=args.angles, extra=extra,
    )
    report = {"schema": SCHEMA, "version": tool_version(), "config": cfg.to_dict(),
              "tolerances": {"tol_rel": cfg.tol_rel, "eps_zero": cfg.eps_zero, "cap": cfg.cap, "eps_f": cfg.eps_f}}
    try:
        model = build_weight(args.weight, r_max=args.r_max)
        result, code = HANDLERS[args.command](args, cfg, model)
        report["result"] = result
    except UsageError as exc:
        print(f"diskgeo: error: {exc}", file=sys.stderr)
        return 1
    except (HypothesisViolated, DiskGeoError, ValueError) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = 1
        print(f"diskgeo: error: {type(exc).__name__}: {exc}", file=sys.stderr)
    text = dumps(report)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


def run(argv) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
