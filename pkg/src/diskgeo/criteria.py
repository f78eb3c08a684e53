"""Trend verdicts for composition-operator criteria.

Every boundary limit is sampled on Stolz schedules at ``n_angles`` boundary
points. The per-radius supremum over rays forms a :class:`LimitProfile`
whose trend drives the verdict. Weight ratios are formed in log space and
clamped at ``cap``.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisViolated
from .functions import TestFunction, sup_modulus
from .geometry import local_distance, rho_of, surrogate_f
from .profiles import CAP, EPS_ZERO, LimitProfile, StolzSchedule, Trend, boundary_angles, make_profile
from .selfmap import SelfMapExpr, angular_derivative, convex
from .weight import WeightModel

EPS_F = 1e-3
N_ANGLES = 64


class Status(str, enum.Enum):
    SATISFIED = "Satisfied"
    VIOLATED = "Violated"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class CriteriaConfig:
    """Sampling and threshold policy shared by all criteria."""

    n_angles: int = N_ANGLES
    alpha: float = 2.0
    rays: int = 5
    k_min: int = 3
    eps_zero: float = EPS_ZERO
    cap: float = CAP
    eps_f: float = EPS_F

    def validate(self) -> "CriteriaConfig":
        if self.n_angles < 1 or self.rays < 1:
            raise ValueError("n_angles and rays must be positive")
        if self.alpha <= 1:
            raise ValueError("aperture alpha must exceed 1")
        if not (0 < self.eps_zero < 1 and self.cap > 1 and self.eps_f > 0):
            raise ValueError("thresholds out of range")
        return self

    def angles(self) -> np.ndarray:
        return boundary_angles(self.n_angles)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


DEFAULT = CriteriaConfig()


@dataclass
class Verdict:
    status: Status
    margin: float
    profiles: list[LimitProfile]
    boundary_angles: np.ndarray
    reason: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status != Status.INCONCLUSIVE and not self.margin > 0:
            raise AssertionError("a decided verdict needs a positive margin")

    def to_dict(self, with_profiles: bool = True) -> dict:
        d = {
            "status": self.status.value,
            "margin": float(self.margin),
            "reason": self.reason,
            "boundary_angles": [float(a) for a in self.boundary_angles],
            "details": _plain(self.details),
        }
        if with_profiles:
            d["profiles"] = [p.to_dict() for p in self.profiles]
        return d


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, enum.Enum):
        return x.value
    return x


_TINY = float(np.finfo(float).eps)


def _pos(m: float) -> float:
    return max(float(m), _TINY)


# -- sampling -------------------------------------------------------------------


def stolz_points(model: WeightModel, cfg: CriteriaConfig, angles) -> tuple[np.ndarray, np.ndarray]:
    """Points of shape (angles, rays, radii) and the radii."""
    sched = [
        StolzSchedule.at_angle(float(a), model.r_max, alpha=cfg.alpha, rays=cfg.rays, k_min=cfg.k_min)
        for a in angles
    ]
    return np.stack([s.points() for s in sched]), sched[0].radii


def log_ratio(model: WeightModel, z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``log(omega(z)/omega(w))``; NaN where ``w`` leaves the truncated disk."""
    aw = np.abs(w)
    out = model.phi(np.minimum(aw, model.r_max)) - model.phi(np.abs(z))
    return np.where(aw <= model.r_max, out, np.nan)


def _ray_sup_profiles(radii, logv: np.ndarray, cfg: CriteriaConfig, points=None) -> list[LimitProfile]:
    """One profile per angle from log-values of shape (angles, rays, radii)."""
    out = []
    with np.errstate(all="ignore"):
        for i in range(logv.shape[0]):
            lv = logv[i]
            if np.all(np.isnan(lv), axis=0).any():
                env = np.array([np.nanmax(c) if np.any(~np.isnan(c)) else np.nan for c in lv.T])
            else:
                env = np.nanmax(lv, axis=0)
            vals = np.exp(np.minimum(env, np.log(cfg.cap)))
            p = make_profile(radii, vals, env, None if points is None else points[i], eps_zero=cfg.eps_zero, cap=cfg.cap)
            p.evidence["truncated"] = bool(np.isnan(lv).any())
            out.append(p)
    return out


def ratio_profiles(model, m: SelfMapExpr, cfg: CriteriaConfig, angles, U: TestFunction | None = None, p: float = 1.0):
    pts, radii = stolz_points(model, cfg, angles)
    lv = log_ratio(model, pts, m(pts))
    if U is not None:
        with np.errstate(divide="ignore"):
            lv = lv + p * np.log(np.abs(U(pts)))
    return _ray_sup_profiles(radii, lv, cfg, pts), pts


# -- boundedness and compactness ---------------------------------------------------


def boundedness(model: WeightModel, m: SelfMapExpr, cfg: CriteriaConfig = DEFAULT) -> Verdict:
    """Sampled boundary behaviour of ``omega(z)/omega(m(z))``.

    Satisfied when every profile is Bounded or ToZero, Violated when one tends
    to infinity.
    """
    model.require_class_w("boundedness")
    cfg.validate()
    angles = cfg.angles()
    profs, _ = ratio_profiles(model, m, cfg, angles)
    trends = [p.trend for p in profs]
    log_cap = np.log10(cfg.cap)
    if Trend.TO_INFINITY in trends:
        bad = [i for i, t in enumerate(trends) if t == Trend.TO_INFINITY]
        lt = max(profs[i].evidence["log_tail_median"] for i in bad) / np.log(10)
        return Verdict(
            Status.VIOLATED, _pos(lt - log_cap), profs, angles, "Unbounded",
            {"angles_infinite": [float(angles[i]) for i in bad]},
        )
    if all(t in (Trend.BOUNDED, Trend.TO_ZERO) for t in trends):
        tails = [p.evidence.get("tail_max", 0.0) for p in profs]
        top = max(tails)
        margin = log_cap - (np.log10(top) if top > 0 else -300.0)
        return Verdict(Status.SATISFIED, _pos(margin), profs, angles, "Bounded", {"max_tail": top})
    inc = [float(angles[i]) for i, t in enumerate(trends) if t == Trend.INCONCLUSIVE]
    return Verdict(Status.INCONCLUSIVE, 0.0, profs, angles, "Inconclusive", {"angles_inconclusive": inc})


def beta_classes(model: WeightModel, m: SelfMapExpr, cfg: CriteriaConfig, angles) -> list:
    return [
        angular_derivative(
            m, StolzSchedule.at_angle(float(a), model.r_max, alpha=cfg.alpha, rays=cfg.rays, k_min=cfg.k_min)
        )
        for a in angles
    ]


def compactness(model: WeightModel, m: SelfMapExpr, cfg: CriteriaConfig = DEFAULT) -> Verdict:
    """Vanishing of ``omega(z)/omega(m(z))`` at the boundary, cross-checked
    against the angular-derivative bands."""
    b = boundedness(model, m, cfg)
    angles = b.boundary_angles
    betas = beta_classes(model, m, cfg, angles)
    bcls = [x.beta_class for x in betas]
    details = {"beta_class": bcls, "beta_tail": [x.tail for x in betas], "boundedness": b.status.value}
    if b.status == Status.VIOLATED:
        details["beta_consistent"] = "beta<1" in bcls
        return Verdict(Status.VIOLATED, b.margin, b.profiles, angles, "Unbounded", details)
    if b.status == Status.INCONCLUSIVE:
        return Verdict(Status.INCONCLUSIVE, 0.0, b.profiles, angles, "Inconclusive", details)
    profs = b.profiles
    trends = [p.trend for p in profs]
    if all(t == Trend.TO_ZERO for t in trends):
        consistent = all(c in ("beta>1", "beta=inf") for c in bcls)
        details["beta_consistent"] = consistent
        if not consistent:
            return Verdict(Status.INCONCLUSIVE, 0.0, profs, angles, "BetaMismatch", details)
        worst = max(p.tail_median for p in profs)
        margin = np.log10(cfg.eps_zero) - (np.log10(worst) if worst > 0 else -300.0)
        return Verdict(Status.SATISFIED, _pos(margin), profs, angles, "Compact", details)
    bounded = [i for i, t in enumerate(trends) if t == Trend.BOUNDED]
    if bounded:
        tail = max(profs[i].tail_min for i in bounded)
        details["beta_consistent"] = any(bcls[i] in ("beta~1", "beta<1") for i in bounded)
        details["angles_nonvanishing"] = [float(angles[i]) for i in bounded]
        margin = np.log10(tail) - np.log10(cfg.eps_zero)
        return Verdict(Status.VIOLATED, _pos(margin), profs, angles, "BoundedNotCompact", details)
    return Verdict(Status.INCONCLUSIVE, 0.0, profs, angles, "Inconclusive", details)


# -- compact differences ---------------------------------------------------------------


@dataclass(frozen=True)
class GammaValue:
    value: float
    rho: float
    ratio_sum: float
    converged: bool = True
    flags: tuple = ()


def _ratio_terms(model, z, a, b, cap):
    la, lb = log_ratio(model, z, a), log_ratio(model, z, b)
    lc = np.log(cap)
    return np.exp(np.minimum(la, lc)) + np.exp(np.minimum(lb, lc))


def gamma_values(model, phi: SelfMapExpr, psi: SelfMapExpr, z, mode: str = "surrogate", cap: float = CAP):
    """Vectorised Gamma with flags; NaN where an image leaves the truncated
    disk. Returns (gamma, rho, ratio_sum, converged)."""
    z = np.asarray(z, dtype=complex)
    a, b = phi(z), psi(z)
    ok = (np.abs(a) <= model.r_max) & (np.abs(b) <= model.r_max) & ~np.isnan(z)
    rho = np.full(z.shape, np.nan)
    conv = np.ones(z.shape, dtype=bool)
    if mode == "surrogate":
        rho[ok] = surrogate_f(model, a[ok], b[ok])
    elif mode == "exact":
        for idx in zip(*np.nonzero(ok)):
            d = local_distance(model, a[idx], b[idx])
            rho[idx] = float(rho_of(d.value))
            conv[idx] = d.converged
    else:
        raise ValueError(f"mode must be 'surrogate' or 'exact', got {mode!r}")
    with np.errstate(invalid="ignore"):
        rs = np.where(ok, _ratio_terms(model, z, np.where(ok, a, 0), np.where(ok, b, 0), cap), np.nan)
    return rho * rs, rho, rs, conv


def gamma_difference(model, mesh, phi, psi, z, mode: str = "surrogate", cap: float = CAP) -> GammaValue:
    """``rho(phi(z), psi(z)) (omega(z)/omega(phi(z)) + omega(z)/omega(psi(z)))``."""
    model.check_inside(z)
    g, r, s, c = gamma_values(model, phi, psi, np.array([complex(z)]), mode, cap)
    flags = () if c[0] else ("NotConverged",)
    return GammaValue(float(g[0]), float(r[0]), float(s[0]), bool(c[0]), flags)


def gamma_profiles(model, phi, psi, cfg: CriteriaConfig, angles, mode="surrogate"):
    pts, radii = stolz_points(model, cfg, angles)
    g, _, _, conv = gamma_values(model, phi, psi, pts, mode, cfg.cap)
    with np.errstate(divide="ignore"):
        lg = np.log(g)
    profs = _ray_sup_profiles(radii, lg, cfg, pts)
    for p, c in zip(profs, conv):
        p.evidence["all_converged"] = bool(np.all(c))
    return profs


def dphi_bound_rings(model, phi, psi, n_angles: int = N_ANGLES, seed: int = 0):
    """Per-ring sup of ``|phi - psi| max(phi'(|phi|), phi'(|psi|))`` over a
    seeded angular grid on the radii ``1 - 2^-k``."""
    from .profiles import k_max_for

    ks = np.arange(1, k_max_for(model.r_max) + 1)
    radii = 1.0 - 2.0 ** (-ks.astype(float))
    rng = np.random.default_rng(seed)
    th = 2 * np.pi * (np.arange(n_angles)[None, :] + rng.random((ks.size, n_angles))) / n_angles
    z = radii[:, None] * np.exp(1j * th)
    a, b = phi(z), psi(z)
    aa = np.minimum(np.abs(a), model.r_max)
    bb = np.minimum(np.abs(b), model.r_max)
    bound = np.abs(a - b) * np.maximum(model.dphi(aa), model.dphi(bb))
    return radii, bound.max(axis=1)


def _dphi_part(model, phi, psi, cfg) -> dict:
    radii, sup = dphi_bound_rings(model, phi, psi, cfg.n_angles)
    with np.errstate(divide="ignore"):
        prof = make_profile(radii, np.minimum(sup, cfg.cap), np.log(sup), eps_zero=cfg.eps_zero, cap=cfg.cap)
    growing = prof.trend == Trend.TO_INFINITY or (
        prof.evidence.get("log_slope", 0) > 0 and sup[-1] > 10 * max(sup[0], _TINY)
    )
    stable = prof.trend in (Trend.TO_ZERO, Trend.BOUNDED) and not growing
    return {"profile": prof, "stable": bool(stable), "unbounded": bool(growing), "sup": float(np.max(sup))}


def compact_difference(
    model, mesh, phi: SelfMapExpr, psi: SelfMapExpr, cfg: CriteriaConfig = DEFAULT, mode: str = "surrogate"
) -> Verdict:
    """Two-part evidence for compactness of the difference.

    (i) the certified bound on ``d_phi(phi(z), psi(z))`` must stay bounded
    over the rings; (ii) every Gamma profile must tend to zero. A Gamma tail
    bounded away from zero is a violation.
    """
    model.require_class_w("compact_difference")
    angles = cfg.angles()
    if str(phi) == str(psi):
        z = np.zeros(cfg.k_min)
        prof = make_profile(z, z)
        return Verdict(Status.SATISFIED, 1.0, [prof] * len(angles), angles, "IdenticalMaps", {"trivial": True})
    pre = {n: boundedness(model, m, cfg).status for n, m in (("phi", phi), ("psi", psi))}
    if any(s != Status.SATISFIED for s in pre.values()):
        return Verdict(Status.INCONCLUSIVE, 0.0, [], angles, "PreconditionNotBounded", {"boundedness": pre})
    part1 = _dphi_part(model, phi, psi, cfg)
    profs = gamma_profiles(model, phi, psi, cfg, angles, mode)
    trends = [p.trend for p in profs]
    details = {
        "mode": mode,
        "dphi_bound": {"stable": part1["stable"], "unbounded": part1["unbounded"], "sup": part1["sup"],
                       "profile": part1["profile"].to_dict()},
        "gamma_tail_median": [p.tail_median for p in profs],
    }
    away = [
        i for i, p in enumerate(profs)
        if p.trend in (Trend.BOUNDED, Trend.TO_INFINITY) and p.tail_min > cfg.eps_zero
    ]
    if away:
        tail = max(profs[i].tail_min for i in away)
        details["angles_nonvanishing"] = [float(angles[i]) for i in away]
        details["not_compact_difference"] = bool(max(profs[i].tail_median for i in away) >= 0.5)
        return Verdict(Status.VIOLATED, _pos(np.log10(tail / cfg.eps_zero)), profs, angles,
                       "GammaNonVanishing", details)
    if all(t == Trend.TO_ZERO for t in trends) and part1["stable"]:
        worst = max(p.tail_median for p in profs)
        margin = np.log10(cfg.eps_zero) - (np.log10(worst) if worst > 0 else -300.0)
        return Verdict(Status.SATISFIED, _pos(margin), profs, angles, "CompactDifference", details)
    reason = "DphiUnbounded" if part1["unbounded"] else "Inconclusive"
    return Verdict(Status.INCONCLUSIVE, 0.0, profs, angles, reason, details)


# -- F-sets and finite sums ------------------------------------------------------------------


@dataclass
class FSet:
    angles: np.ndarray
    statistic: np.ndarray
    eps_f: float
    delight_violations: list = field(default_factory=list)

    @property
    def included(self) -> np.ndarray:
        return self.statistic > self.eps_f

    @property
    def members(self) -> np.ndarray:
        return self.angles[self.included]

    @property
    def resolution(self) -> float:
        return 2 * np.pi / self.angles.size

    def to_dict(self) -> dict:
        return {
            "angles": self.angles.tolist(),
            "statistic": self.statistic.tolist(),
            "eps_f": self.eps_f,
            "members": self.members.tolist(),
            "resolution": self.resolution,
            "delight_violations": list(self.delight_violations),
        }


def f_set(model, m: SelfMapExpr, angles=None, cfg: CriteriaConfig = DEFAULT) -> FSet:
    """Boundary angles where ``limsup tau(z)/tau(m(z))`` exceeds ``eps_f``.

    The limsup is the largest of the last three per-radius ray suprema.
    Also records angles where the weight ratio stays bounded below but the
    angle is missing from the set, which the theory rules out.
    """
    model.require_class_w("f_set")
    angles = cfg.angles() if angles is None else np.asarray(angles, float)
    pts, radii = stolz_points(model, cfg, angles)
    w = m(pts)
    inside = np.abs(w) <= model.r_max
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(inside, model.tau_z(pts) / model.tau_z(np.where(inside, w, 0)), np.nan)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        env = np.nanmax(q, axis=1)
    stat = np.array([np.nanmax(e[-3:]) if np.any(~np.isnan(e[-3:])) else np.nan for e in env])
    fs = FSet(np.asarray(angles), stat, cfg.eps_f)
    profs, _ = ratio_profiles(model, m, cfg, angles)
    for i, p in enumerate(profs):
        if p.trend != Trend.TO_ZERO and p.tail_min > cfg.eps_zero and not fs.included[i]:
            fs.delight_violations.append(float(angles[i]))
    return fs


def finite_sum_difference(
    model, mesh, phi: SelfMapExpr, parts: list, cfg: CriteriaConfig = DEFAULT, mode: str = "surrogate"
) -> Verdict:
    """Check the F-set hypotheses for ``phi`` against ``parts`` and the
    restricted Gamma conditions at each part's F-set."""
    model.require_class_w("finite_sum_difference")
    angles = cfg.angles()
    if len(parts) == 1 and str(parts[0]) == str(phi):
        return Verdict(Status.SATISFIED, 1.0, [], angles, "Trivial", {"trivial": True})
    F = f_set(model, phi, angles, cfg)
    Fj = [f_set(model, p, angles, cfg) for p in parts]
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            both = Fj[i].included & Fj[j].included
            if both.any():
                raise HypothesisViolated(
                    f"F-sets of parts {i} ({parts[i]}) and {j} ({parts[j]}) overlap at angle "
                    f"{angles[np.argmax(both)]:.6g}"
                )
    union = np.zeros(angles.size, dtype=bool)
    for f in Fj:
        union |= f.included
    if np.any(F.included & ~union):
        a = angles[np.argmax(F.included & ~union)]
        raise HypothesisViolated(f"angle {a:.6g} of F({phi}) is in no part's F-set")
    if np.any(union & ~F.included):
        a = angles[np.argmax(union & ~F.included)]
        raise HypothesisViolated(f"angle {a:.6g} lies in a part's F-set but not in F({phi})")
    all_profs, worst_away, worst_zero, status_parts = [], [], [], []
    for j, part in enumerate(parts):
        ang = angles[Fj[j].included]
        if ang.size == 0:
            status_parts.append("empty")
            continue
        profs = gamma_profiles(model, phi, part, cfg, ang, mode)
        all_profs += profs
        for a, p in zip(ang, profs):
            if p.trend in (Trend.BOUNDED, Trend.TO_INFINITY) and p.tail_min > cfg.eps_zero:
                worst_away.append((p.tail_min, j, float(a)))
            elif p.trend == Trend.TO_ZERO:
                worst_zero.append(p.tail_median)
        status_parts.append([p.trend.value for p in profs])
    details = {"f_sets": [f.to_dict() for f in Fj], "f_phi": F.to_dict(), "mode": mode, "parts": status_parts}
    if worst_away:
        tail, j, a = max(worst_away)
        details["offending"] = {"part": j, "angle": a, "tail": tail}
        return Verdict(Status.VIOLATED, _pos(np.log10(tail / cfg.eps_zero)), all_profs, angles,
                       "GammaNonVanishing", details)
    if all(p.trend == Trend.TO_ZERO for p in all_profs):
        worst = max(worst_zero, default=0.0)
        margin = np.log10(cfg.eps_zero) - (np.log10(worst) if worst > 0 else -300.0)
        return Verdict(Status.SATISFIED, _pos(margin), all_profs, angles, "FiniteSumCompact", details)
    return Verdict(Status.INCONCLUSIVE, 0.0, all_profs, angles, "Inconclusive", details)


# -- weighted composition ---------------------------------------------------------------------


def weighted_comp_compactness(
    model, m: SelfMapExpr, U: TestFunction, p: float = 1.0, cfg: CriteriaConfig = DEFAULT
) -> Verdict:
    """Vanishing of ``|U(z)|^p omega(z)/omega(m(z))`` at the boundary."""
    model.require_class_w("weighted_comp_compactness")
    if not p > 0:
        raise ValueError("exponent p must be positive")
    bound = sup_modulus(U)
    if not np.isfinite(bound):
        raise HypothesisViolated(f"multiplier {U} is not bounded on the disk")
    angles = cfg.angles()
    profs, _ = ratio_profiles(model, m, cfg, angles, U=U, p=p)
    trends = [q.trend for q in profs]
    details = {"sup_U": bound, "p": p}
    if all(t == Trend.TO_ZERO for t in trends):
        worst = max(q.tail_median for q in profs)
        margin = np.log10(cfg.eps_zero) - (np.log10(worst) if worst > 0 else -300.0)
        return Verdict(Status.SATISFIED, _pos(margin), profs, angles, "Compact", details)
    away = [i for i, q in enumerate(profs) if q.trend in (Trend.BOUNDED, Trend.TO_INFINITY) and q.tail_min > cfg.eps_zero]
    if away:
        tail = max(profs[i].tail_min for i in away)
        details["angles_nonvanishing"] = [float(angles[i]) for i in away]
        return Verdict(Status.VIOLATED, _pos(np.log10(tail / cfg.eps_zero)), profs, angles, "NotCompact", details)
    return Verdict(Status.INCONCLUSIVE, 0.0, profs, angles, "Inconclusive", details)


# -- path connectedness -------------------------------------------------------------------------


@dataclass
class PathReport:
    t_grid: np.ndarray
    step_stats: list
    lipschitz: float
    ring_profile: LimitProfile
    unbounded: bool
    bounded_per_t: dict
    status: Status

    @property
    def all_bounded(self) -> bool:
        return all(v == Status.SATISFIED.value for v in self.bounded_per_t.values())

    def to_dict(self) -> dict:
        return {
            "t_grid": self.t_grid.tolist(),
            "steps": self.step_stats,
            "lipschitz": self.lipschitz,
            "ring_profile": self.ring_profile.to_dict(),
            "unbounded": self.unbounded,
            "bounded_per_t": self.bounded_per_t,
            "status": self.status.value,
        }


def path_samples(model, n_angles: int = N_ANGLES, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Seeded points on the rings ``1 - 2^-k``; shape (rings, n_angles)."""
    from .profiles import k_max_for

    ks = np.arange(1, k_max_for(model.r_max) + 1)
    radii = 1.0 - 2.0 ** (-ks.astype(float))
    rng = np.random.default_rng(seed)
    th = 2 * np.pi * (np.arange(n_angles)[None, :] + rng.random((ks.size, n_angles))) / n_angles
    return radii, radii[:, None] * np.exp(1j * th)


def path_connectedness(
    model, mesh, phi: SelfMapExpr, psi: SelfMapExpr, t_grid, cfg: CriteriaConfig = DEFAULT, seed: int = 0
) -> PathReport:
    """Evidence for a continuous path ``t -> (1 - t) phi + t psi``.

    For consecutive grid values ``t < s`` the statistic is
    ``sup_z |phi_t(z) - phi_s(z)| / tau(phi_u(z))`` over ``u`` in ``{t, (t+s)/2, s}``,
    reported with its ratio to ``s - t``. The per-ring suprema of that ratio
    are classified separately: growth towards the boundary means the sampled
    constant only reflects the truncation.
    """
    model.require_class_w("path_connectedness")
    t_grid = np.asarray(t_grid, dtype=float)
    radii, z = path_samples(model, cfg.n_angles, seed)
    f, g = phi(z), psi(z)
    steps, ring_max = [], np.zeros(radii.size)
    for t, s in zip(t_grid[:-1], t_grid[1:]):
        diff = np.abs(s - t) * np.abs(f - g)
        ratio_ring = np.zeros(radii.size)
        for u in (t, 0.5 * (t + s), s):
            w = (1 - u) * f + u * g
            tw = model.tau_z(np.minimum(np.abs(w), model.r_max))
            with np.errstate(divide="ignore", invalid="ignore"):
                q = np.where(diff > 0, diff / tw, 0.0)
            ratio_ring = np.maximum(ratio_ring, q.max(axis=1))
        stat = float(ratio_ring.max())
        lip = stat / abs(s - t) if s != t else 0.0
        if s != t:
            ring_max = np.maximum(ring_max, ratio_ring / abs(s - t))
        steps.append({"t": float(t), "s": float(s), "stat": stat, "ratio": lip})
    lipschitz = max((st["ratio"] for st in steps), default=0.0)
    with np.errstate(divide="ignore"):
        prof = make_profile(radii, np.minimum(ring_max, cfg.cap), np.log(ring_max), eps_zero=cfg.eps_zero, cap=cfg.cap)
    unbounded = bool(
        prof.trend == Trend.TO_INFINITY
        or (prof.evidence.get("log_slope", 0) > 0 and ring_max[-1] > 10 * max(ring_max[0], _TINY))
    )
    per_t = {}
    for t in t_grid:
        per_t[f"{t:.6g}"] = boundedness(model, convex(float(t), phi, psi), cfg).status.value
    ok = not unbounded and all(v == Status.SATISFIED.value for v in per_t.values())
    status = Status.SATISFIED if ok else (Status.VIOLATED if unbounded else Status.INCONCLUSIVE)
    return PathReport(t_grid, steps, float(lipschitz), prof, unbounded, per_t, status)
