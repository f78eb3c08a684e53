"""Monte Carlo box statistics of the pullback measure.

For a self-map ``m`` the pullback of ``omega dA`` is
``mu(E) = int_{m^-1(E)} omega(z)/omega(m(z)) dA(z)`` with ``dA`` the
normalised area measure. Boxes are Euclidean disks ``D(c, delta tau(c))``
and the statistic is ``mu(box) / tau(c)^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .criteria import Status, boundedness, log_ratio
from .errors import DegenerateBox, HypothesisViolated
from .profiles import CAP, EPS_ZERO, LimitProfile, make_profile
from .selfmap import SelfMapExpr
from .weight import WeightModel

N_STRATA = 32
BOOST = 4.0
BOOST_LAST = 4
N_SAMPLES = 1_000_000
MIN_BOX = 1e-9


@dataclass
class BoxStat:
    center: complex
    delta: float
    estimate: float
    std_error: float
    n_samples: int
    n_hits: int
    strata: np.ndarray = field(repr=False)
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "center": [self.center.real, self.center.imag],
            "center_r": abs(self.center),
            "center_theta": float(np.angle(self.center)),
            "delta": self.delta,
            "estimate": self.estimate,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "n_hits": self.n_hits,
            "flags": list(self.flags),
        }


@dataclass(frozen=True, eq=False)
class PullbackSampler:
    """Stratified area-uniform samples of the truncated disk with the images
    and log weight ratios precomputed, shared by every box.

    Strata are equal-area annuli; the outer ``BOOST_LAST`` strata receive
    ``BOOST`` times the proportional allocation.
    """

    model: WeightModel
    m: SelfMapExpr
    n_samples: int = N_SAMPLES
    seed: int = 0
    n_strata: int = N_STRATA

    @cached_property
    def edges(self) -> np.ndarray:
        return self.model.r_max * np.sqrt(np.arange(self.n_strata + 1) / self.n_strata)

    @cached_property
    def area(self) -> np.ndarray:
        e = self.edges
        return e[1:] ** 2 - e[:-1] ** 2

    @cached_property
    def counts(self) -> np.ndarray:
        w = np.ones(self.n_strata)
        w[-BOOST_LAST:] = BOOST
        return np.maximum(2, np.floor(self.n_samples * w / w.sum()).astype(np.int64))

    @cached_property
    def _samples(self):
        zs, ws, ls, sid = [], [], [], []
        e = self.edges
        for i, n in enumerate(self.counts):
            rng = np.random.default_rng([self.seed, i])
            r = np.sqrt(e[i] ** 2 + rng.random(n) * (e[i + 1] ** 2 - e[i] ** 2))
            z = r * np.exp(2j * np.pi * rng.random(n))
            w = self.m(z)
            with np.errstate(invalid="ignore"):
                lr = log_ratio(self.model, z, w)
            zs.append(z)
            ws.append(w)
            ls.append(lr)
            sid.append(np.full(n, i, dtype=np.int32))
        return np.concatenate(zs), np.concatenate(ws), np.concatenate(ls), np.concatenate(sid)

    def box(self, center: complex, delta: float) -> BoxStat:
        model = self.model
        center = complex(center)
        model.check_inside(center)
        if not 0 < delta < model.m_tau:
            raise HypothesisViolated(f"need 0 < delta < m_tau = {model.m_tau:.6g}, got {delta}")
        tc = float(model.tau_z(center))
        rad = delta * tc
        if rad < MIN_BOX:
            raise DegenerateBox(f"box radius {rad:.3g} below {MIN_BOX:g}")
        z, w, lr, sid = self._samples
        flags = []
        if abs(center) + rad > model.r_max:
            flags.append("DomainClipped")
        hit = np.abs(w - center) < rad
        lc = np.log(CAP)
        vals = np.zeros(z.size)
        h = np.nonzero(hit)[0]
        if np.any(np.isnan(lr[h])):
            flags.append("ImageOutsideTruncation")
        lv = np.nan_to_num(lr[h], nan=-np.inf)
        if np.any(lv > lc):
            flags.append("Clamped")
        vals[h] = np.exp(np.minimum(lv, lc))
        n = self.counts
        sums = np.bincount(sid, weights=vals, minlength=self.n_strata)
        sq = np.bincount(sid, weights=vals**2, minlength=self.n_strata)
        mean = sums / n
        var = np.maximum(sq / n - mean**2, 0.0) * n / (n - 1)
        contrib = self.area * mean
        mu = float(np.sum(contrib))
        se = float(np.sqrt(np.sum(self.area**2 * var / n)))
        scale = tc**2
        return BoxStat(center, float(delta), mu / scale, se / scale, int(n.sum()), int(h.size), contrib / scale, flags)


def pullback_box_measure(
    model: WeightModel, m: SelfMapExpr, center: complex, delta: float, n_samples: int = N_SAMPLES, seed: int = 0
) -> BoxStat:
    """One box statistic from a fresh sampler."""
    return PullbackSampler(model, m, int(n_samples), seed).box(center, delta)


def default_centers(n_angles: int = 16, ks=(1, 2, 3, 4)) -> np.ndarray:
    th = 2 * np.pi * np.arange(n_angles) / n_angles
    r = 1.0 - 2.0 ** (-np.asarray(ks, dtype=float))
    return (r[:, None] * np.exp(1j * th)[None, :]).ravel()


def operator_norm_proxy(
    model: WeightModel,
    m: SelfMapExpr,
    centers=None,
    delta: float | None = None,
    n_samples: int = N_SAMPLES,
    seed: int = 0,
    sampler: PullbackSampler | None = None,
) -> float:
    """Largest box statistic over the centres (a relative quantity only)."""
    if boundedness(model, m).status == Status.VIOLATED:
        raise HypothesisViolated(f"{m} fails the boundedness criterion")
    delta = model.m_tau / 2 if delta is None else delta
    centers = default_centers() if centers is None else np.asarray(centers, dtype=complex)
    s = sampler or PullbackSampler(model, m, int(n_samples), seed)
    return max(s.box(c, delta).estimate for c in centers)


VANISHING_RADII = (0.3, 0.4, 0.5, 0.6, 0.65, 0.7, 0.75, 0.8)


@dataclass
class VanishingProfile:
    profile: LimitProfile
    per_angle: list
    boxes: list

    @property
    def trend(self):
        return self.profile.trend

    def to_dict(self) -> dict:
        return {
            "profile": self.profile.to_dict(),
            "per_angle": [p.trend.value for p in self.per_angle],
            "boxes": [b.to_dict() for b in self.boxes],
        }


def vanishing_profile(
    model: WeightModel,
    m: SelfMapExpr,
    delta: float | None = None,
    angles=None,
    radii=VANISHING_RADII,
    n_samples: int = N_SAMPLES,
    seed: int = 0,
    eps_zero: float = EPS_ZERO,
) -> VanishingProfile:
    """Box statistics along radii at each angle; the returned profile is the
    per-radius maximum over angles.

    The radii stay moderate: near the boundary boxes shrink like ``tau`` and
    uniform sampling stops resolving them.
    """
    delta = model.m_tau / 2 if delta is None else delta
    angles = 2 * np.pi * np.arange(16) / 16 if angles is None else np.asarray(angles, float)
    radii = np.asarray(radii, dtype=float)
    s = PullbackSampler(model, m, int(n_samples), seed)
    est = np.zeros((angles.size, radii.size))
    boxes = []
    for i, a in enumerate(angles):
        for j, r in enumerate(radii):
            b = s.box(r * np.exp(1j * a), delta)
            est[i, j] = b.estimate
            boxes.append(b)
    per = [make_profile(radii, e, eps_zero=eps_zero) for e in est]
    prof = make_profile(radii, est.max(axis=0), eps_zero=eps_zero)
    return VanishingProfile(prof, per, boxes)
