"""Numerical checks of pointwise inequalities on sampled points.

Inequalities stated only up to a constant are rendered as an empirical
constant (worst ratio) that must be finite and stable when the point set
grows from ``n`` to ``4 n`` (nested seeded sets). Only inequalities with
explicit constants count violations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisViolated, PairOutOfRange
from .functions import TestFunction
from .geometry import TOL_REL, check_inclusions, local_distance, rho_of, surrogate_f
from .weight import WeightModel

N_RAD, N_ANG = 24, 48
_X, _W = np.polynomial.legendre.leggauss(N_RAD)
_S = 0.5 * (_X + 1.0)
_SW = 0.5 * _W
_TH = 2 * np.pi * np.arange(N_ANG) / N_ANG
_E = np.exp(1j * _TH)


@dataclass(frozen=True)
class DiskIntegral:
    value: float
    clipped: bool


def disk_nodes(center: complex, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``int_D g dA`` under the normalised measure
    ``dA = dx dy / pi``: Gauss-Legendre in the radius, uniform in angle."""
    s = radius * _S
    pts = center + s[:, None] * _E[None, :]
    w = (2.0 / N_ANG) * (radius**2) * (_SW * _S)[:, None] * np.ones(N_ANG)[None, :]
    return pts, w


def disk_integral(g, center: complex, radius: float, r_max: float | None = None) -> DiskIntegral:
    """``int_{D(center, radius)} g dA``; ``clipped`` when the disk meets the
    truncation circle."""
    pts, w = disk_nodes(complex(center), float(radius))
    val = float(np.sum(w * np.asarray(g(pts), dtype=float)))
    clipped = r_max is not None and abs(center) + radius > r_max
    return DiskIntegral(val, bool(clipped))


@dataclass
class CheckResult:
    name: str
    n_points: int
    n_violations: int
    worst_ratio: float
    stability: float
    seed: int
    passed: bool
    explicit_constant: bool = False
    densities: tuple = ()
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n_points": self.n_points,
            "n_violations": self.n_violations,
            "worst_ratio": self.worst_ratio,
            "stability": self.stability,
            "seed": self.seed,
            "passed": self.passed,
            "explicit_constant": self.explicit_constant,
            "densities": list(self.densities),
            "details": self.details,
        }


def annulus_points(n: int, seed: int, r_lo: float, r_hi: float) -> np.ndarray:
    rng = np.random.default_rng(seed)
    r = r_lo + (r_hi - r_lo) * rng.random(n)
    return r * np.exp(2j * np.pi * rng.random(n))


def _stable(ratios: np.ndarray, n_small: int, name: str, seed: int, densities, details=None) -> CheckResult:
    ratios = np.asarray(ratios, dtype=float)
    finite = bool(np.all(np.isfinite(ratios)))
    w_small = float(np.max(ratios[:n_small])) if n_small else 0.0
    w_all = float(np.max(ratios)) if ratios.size else 0.0
    stab = w_all / w_small if w_small > 0 else (1.0 if w_all == 0 else float("inf"))
    n_bad = int(np.count_nonzero(~np.isfinite(ratios)))
    return CheckResult(
        name, int(ratios.size), n_bad, w_all, stab, seed, finite and stab < 2.0, False, tuple(densities),
        dict(details or {}, worst_small=w_small),
    )


def _box_integral(model, f: TestFunction, p: float, beta: float, z: complex, rad: float) -> float:
    """``int_{D(z, rad)} |f|^p exp(-beta (phi - phi(z))) dA``."""
    pts, w = disk_nodes(z, rad)
    pz = float(model.phi(abs(z)))
    with np.errstate(divide="ignore"):
        lg = p * np.log(np.abs(f(pts))) - beta * (model.phi(np.abs(pts)) - pz)
    return float(np.sum(w * np.exp(lg)))


def _check_delta(model, delta):
    if not 0 < delta < model.m_tau:
        raise HypothesisViolated(f"need 0 < delta < m_tau = {model.m_tau:.6g}, got {delta}")


def submean_check(
    model: WeightModel, f: TestFunction, beta: float = 1.0, p: float = 2.0, delta: float | None = None,
    points=None, seed: int = 0, n: int = 200, r_range=(0.5, 0.99),
) -> CheckResult:
    """Worst ``M`` in ``|f(z)|^p omega(z)^beta <= M/(delta^2 tau^2) int_box |f|^p omega^beta``.

    Ratios are taken relative to ``omega(z)^beta`` so nothing underflows.
    """
    delta = model.m_tau / 2 if delta is None else delta
    _check_delta(model, delta)
    pts = annulus_points(4 * n, seed, *r_range) if points is None else np.asarray(points, complex)
    out = np.empty(pts.size)
    for i, z in enumerate(pts):
        t = float(model.tau_z(z))
        lhs = abs(complex(f(np.array([z]))[0])) ** p
        out[i] = lhs * (delta * t) ** 2 / _box_integral(model, f, p, beta, complex(z), delta * t)
    return _stable(out, min(n, pts.size), "submean", seed, (n, pts.size), {"beta": beta, "p": p, "delta": delta})


def deriv_submean_check(
    model: WeightModel, f: TestFunction, p: float = 2.0, delta: float | None = None,
    points=None, seed: int = 0, n: int = 200, r_range=(0.5, 0.99),
) -> CheckResult:
    """Worst constant in ``|f'(z)|^p e^-phi(z) tau^(2+p) <= C int_box |f|^p e^-phi``."""
    delta = model.m_tau / 2 if delta is None else delta
    _check_delta(model, delta)
    pts = annulus_points(4 * n, seed, *r_range) if points is None else np.asarray(points, complex)
    out = np.empty(pts.size)
    for i, z in enumerate(pts):
        t = float(model.tau_z(z))
        lhs = abs(complex(f.deriv(np.array([z]))[0])) ** p * t ** (2 + p)
        out[i] = lhs / _box_integral(model, f, p, 1.0, complex(z), delta * t)
    return _stable(out, min(n, pts.size), "deriv_submean", seed, (n, pts.size), {"p": p, "delta": delta})


def admissible_pairs(model, n: int, seed: int, delta: float, r_range=(0.5, 0.98), t_max: float = 0.8):
    """Pairs with ``|z - w| <= t_max (delta/2) tau(z)``, admissible both ways."""
    z = annulus_points(n, seed, *r_range)
    rng = np.random.default_rng([seed, 1])
    t = t_max * rng.random(n)
    w = z + t * 0.5 * delta * model.tau_z(z) * np.exp(2j * np.pi * rng.random(n))
    return np.stack([z, w], axis=1)


def difference_bound_check(
    model: WeightModel, mesh, f: TestFunction, p: float = 2.0, delta: float | None = None,
    pairs=None, seed: int = 0, n: int = 200, mode: str = "surrogate", swap: bool = False,
) -> CheckResult:
    """Worst constant in
    ``|f(z) - f(w)|^p e^-phi(z) <= C rho(z, w)^p / tau(z)^2 int_box |f|^p e^-phi``
    for ``|z - w| <= (delta/2) tau(z)``."""
    delta = model.m_tau / 2 if delta is None else delta
    _check_delta(model, delta)
    pr = admissible_pairs(model, 4 * n, seed, delta) if pairs is None else np.asarray(pairs, complex).reshape(-1, 2)
    if swap:
        pr = pr[:, ::-1]
    out = np.zeros(pr.shape[0])
    for i, (z, w) in enumerate(pr):
        t = float(model.tau_z(z))
        if abs(z - w) > 0.5 * delta * t * (1 + 1e-12):
            raise PairOutOfRange(f"|z-w| = {abs(z - w):.3g} exceeds (delta/2) tau(z) = {0.5 * delta * t:.3g}")
        if z == w:
            continue
        if mode == "surrogate":
            rho = float(surrogate_f(model, z, w))
        elif mode == "mesh":
            rho = float(rho_of(local_distance(model, z, w).value))
        else:
            raise ValueError("mode must be 'surrogate' or 'mesh'")
        fz, fw = f(np.array([z, w]))
        lhs = abs(fz - fw) ** p * t**2
        out[i] = lhs / (rho**p * _box_integral(model, f, p, 1.0, complex(z), delta * t))
    name = "difference_bound" + ("_swapped" if swap else "")
    return _stable(out, min(n, pr.shape[0]), name, seed, (n, pr.shape[0]), {"p": p, "delta": delta, "mode": mode})


S_GRID = np.linspace(0.0, 1.0, 11)


def impot_pairs(model, n: int, seed: int, R: float = 1.0, r_range=(0.5, 0.99)) -> np.ndarray:
    """Pairs with the certified bound ``|z - w| max(phi'(|z|), phi'(|w|)) < R``."""
    z = annulus_points(n, seed, *r_range)
    rng = np.random.default_rng([seed, 2])
    d = np.exp(2j * np.pi * rng.random(n))
    L = 0.9 * R / model.dphi(np.abs(z))
    for _ in range(20):
        w = z + L * d
        b = L * np.maximum(model.dphi(np.abs(z)), model.dphi(np.minimum(np.abs(w), model.r_max)))
        bad = (b >= R) | (np.abs(w) > model.r_max)
        if not bad.any():
            break
        L = np.where(bad, 0.7 * L, L)
    return np.stack([z, z + L * d, np.full(n, R)], axis=1)


def impot_check(model: WeightModel, pairs_with_R=None, seed: int = 0, n: int = 200, R: float = 1.0) -> CheckResult:
    """Sup over pairs and ``s`` of ``|phi(z) - phi(z_s)|``, ``z_s = (1-s) z + s w``."""
    pr = impot_pairs(model, 4 * n, seed, R) if pairs_with_R is None else np.asarray(pairs_with_R, complex).reshape(-1, 3)
    out = np.empty(pr.shape[0])
    for i, (z, w, Rc) in enumerate(pr):
        b = abs(z - w) * max(model.dphi(abs(z)), model.dphi(abs(w)))
        if not b < Rc.real:
            raise HypothesisViolated(f"pair {i}: certified bound {b:.3g} is not below R = {Rc.real:g}")
        zs = (1 - S_GRID) * z + S_GRID * w
        out[i] = float(np.max(np.abs(model.phi(np.abs(zs)) - model.phi(abs(z)))))
    res = _stable(out, min(n, pr.shape[0]), "impot", seed, (n, pr.shape[0]), {"R": float(np.max(pr[:, 2].real))})
    res.details["empirical_R_prime"] = res.worst_ratio
    return res


def separation_check(
    model: WeightModel, mesh, delta: float | None = None, pairs=None, seed: int = 0, n: int = 500,
    radius: float = 0.95, tol_rel: float = TOL_REL,
) -> CheckResult:
    """Among pairs with graph ``d_tau >= 2 delta (1 + tol)``, count failures of
    ``|z - w| >= delta tau(z)``.

    Distances come from anchored patch meshes (``local_distance``); a global
    ``mesh`` is not needed and is ignored.
    """
    from .geometry import random_disk_points

    delta = model.m_tau / 2 if delta is None else delta
    _check_delta(model, delta)
    if pairs is None:
        pr = np.stack([random_disk_points(n, [seed, 0], radius), random_disk_points(n, [seed, 1], radius)], axis=1)
    else:
        pr = np.asarray(pairs, complex).reshape(-1, 2)
    thr = 2 * delta * (1 + tol_rel)
    kept = viol = 0
    worst = 0.0
    for z, w in pr:
        d = local_distance(model, z, w, tol_rel=tol_rel).value
        if d < thr:
            continue
        kept += 1
        q = float(model.tau_z(z)) * delta / abs(z - w)
        worst = max(worst, q)
        viol += int(abs(z - w) < delta * float(model.tau_z(z)))
    return CheckResult(
        "separation", int(pr.shape[0]), viol, worst, 1.0, seed, viol == 0, True, (pr.shape[0],),
        {"kept": kept, "delta": delta, "threshold": thr},
    )


def decay_pairs(model, n: int, seed: int, radius: float = 0.95, t_range=(1.0, 8.0)) -> np.ndarray:
    """Pairs at ``|z - w| = t tau(z)``, ``t`` log-uniform, both points in
    ``|.| <= radius`` and ``|z - w| >= min tau``."""
    out = []
    rng = np.random.default_rng(seed)
    while len(out) < n:
        z = radius * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        t = np.exp(np.log(t_range[0]) + rng.random() * np.log(t_range[1] / t_range[0]))
        w = z + t * float(model.tau_z(z)) * np.exp(2j * np.pi * rng.random())
        if abs(w) > radius:
            continue
        if abs(z - w) < min(model.tau_z(z), model.tau_z(w)):
            continue
        out.append((z, w))
    return np.array(out, dtype=complex)


def exp_decay_check(
    model: WeightModel, mesh, M: int = 1, pairs=None, seed: int = 0, n: int = 200, levels=(2, 3),
) -> CheckResult:
    """Empirical ``C(M) = sup e^-d_tau (|z - w| / min tau)^M`` at two patch
    levels; passes when the two values differ by less than 10%."""
    pr = decay_pairs(model, n, seed) if pairs is None else np.asarray(pairs, complex).reshape(-1, 2)
    cs = []
    for L in levels:
        vals = []
        for z, w in pr:
            d = local_distance(model, z, w, start_level=L, max_level=L).value
            q = abs(z - w) / min(model.tau_z(z), model.tau_z(w))
            vals.append(np.exp(-d) * q**M)
        cs.append(float(np.max(vals)))
    change = abs(cs[-1] - cs[-2]) / cs[-1]
    return CheckResult(
        f"exp_decay_M{M}", int(pr.shape[0]), 0, cs[-1], cs[-1] / cs[-2], seed, bool(change < 0.1), False,
        tuple(levels), {"C_by_level": cs, "relative_change": change, "M": M},
    )


def inclusion_check(model: WeightModel, n: int = 500, seed: int = 0, R: float | None = None) -> CheckResult:
    """Seeded ``(z, r)`` pairs, ``r < m_tau/2``, through :func:`check_inclusions`.

    ``|z|`` is drawn from ``[r_reg, 1 - 1e-4]`` with ``1 - |z|`` log-uniform;
    below ``r_reg`` the exact radius function is not Lipschitz.
    """
    rng = np.random.default_rng(seed)
    lo, hi = np.log(1 - model.r_reg), np.log(1e-4)
    rad = 1 - np.exp(lo + (hi - lo) * rng.random(n))
    z = rad * np.exp(2j * np.pi * rng.random(n))
    r = (model.m_tau / 2) * (0.05 + 0.9 * rng.random(n))
    v1 = v2 = 0
    unconverged = 0
    for zi, ri in zip(z, r):
        rep = check_inclusions(model, None, zi, ri, R)
        v1 += rep.violations_ball_in_disk
        v2 += rep.violations_disk_in_ball
        unconverged += int(not rep.converged)
    return CheckResult(
        "inclusions", n, v1 + v2, 0.0, 1.0, seed, v1 + v2 == 0, True, (n,),
        {"ball_in_disk": v1, "disk_in_ball": v2, "unconverged": unconverged},
    )


SUITES = ("submean", "deriv_submean", "diff", "separation", "impot", "expdecay", "inclusions")


def run_suite(model: WeightModel, suite: str = "all", n: int = 200, seed: int = 0) -> list[CheckResult]:
    from .functions import explin, monomial_fn

    names = SUITES if suite == "all" else (suite,)
    out = []
    for s in names:
        if s == "submean":
            out += [submean_check(model, monomial_fn(5), seed=seed, n=n), submean_check(model, explin(2), seed=seed, n=n)]
        elif s == "deriv_submean":
            out.append(deriv_submean_check(model, monomial_fn(3), seed=seed, n=n))
        elif s == "diff":
            out += [
                difference_bound_check(model, None, monomial_fn(4), seed=seed, n=n),
                difference_bound_check(model, None, monomial_fn(4), seed=seed, n=n, swap=True),
            ]
        elif s == "separation":
            out.append(separation_check(model, None, seed=seed, n=max(n, 500)))
        elif s == "impot":
            out.append(impot_check(model, seed=seed, n=n))
        elif s == "expdecay":
            out += [exp_decay_check(model, None, 1, seed=seed, n=n), exp_decay_check(model, None, 2, seed=seed, n=n)]
        elif s == "inclusions":
            out.append(inclusion_check(model, n=max(n, 500), seed=seed))
        else:
            raise ValueError(f"unknown suite {s!r}; choose from all, {', '.join(SUITES)}")
    return out
