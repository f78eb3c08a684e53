"""Boundary-limit sampling schedules and trend classification.

Every "limit as |z| -> 1" in diskgeo is rendered as a trend over a finite
schedule of radii r_k = 1 - 2^-k that stops at the truncation radius.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

EPS_ZERO = 1e-4
CAP = 1e6
BAND = 2.0
K_MIN = 3


class Trend(str, enum.Enum):
    TO_ZERO = "ToZero"
    BOUNDED = "Bounded"
    TO_INFINITY = "ToInfinity"
    INCONCLUSIVE = "Inconclusive"


def k_max_for(r_max: float) -> int:
    """Largest k with 1 - 2^-k <= r_max."""
    k = int(np.floor(-np.log2(1.0 - r_max)))
    while 1.0 - 2.0 ** (-k) > r_max:
        k -= 1
    return k


@dataclass
class LimitProfile:
    """Values sampled along a boundary-approaching schedule plus a trend.

    ``values`` are clamped at ``cap``; ``log_values`` (when present) are the
    unclamped natural logs and are what the classifier uses.
    """

    radii: np.ndarray
    values: np.ndarray
    trend: Trend
    sup: float | None = None
    log_values: np.ndarray | None = None
    points: np.ndarray | None = None
    evidence: dict = field(default_factory=dict)

    @property
    def tail_median(self) -> float:
        return float(self.evidence.get("tail_median", np.nan))

    @property
    def tail_min(self) -> float:
        return float(self.evidence.get("tail_min", np.nan))

    def to_dict(self) -> dict:
        return {
            "trend": self.trend.value,
            "sup": self.sup,
            "radii": [float(r) for r in self.radii],
            "values": [float(v) for v in self.values],
            "evidence": {k: _jsonable(v) for k, v in self.evidence.items()},
        }


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def classify(
    values,
    log_values=None,
    eps_zero: float = EPS_ZERO,
    cap: float = CAP,
    band: float = BAND,
) -> tuple[Trend, dict]:
    """Classify a boundary-approaching sequence.

    Rules, in order: ToInfinity if the last-3 median reaches ``cap``;
    ToZero if the tail is identically zero, or the last-3 median is below
    ``eps_zero`` with a negative log-slope over the last 4 samples; Bounded if
    the last 4 samples sit inside a factor-``band`` window; otherwise
    Inconclusive. Non-finite entries (truncated samples) are dropped first.
    """
    v = np.asarray(values, dtype=float)
    if log_values is None:
        with np.errstate(divide="ignore"):
            lv = np.log(np.where(v > 0, v, 0.0))
    else:
        lv = np.asarray(log_values, dtype=float)
    ok = ~np.isnan(v) & ~np.isnan(lv)
    v, lv = v[ok], lv[ok]
    ev: dict = {"n_valid": int(v.size)}
    if v.size < 4:
        return Trend.INCONCLUSIVE, ev
    tail3, tail4 = v[-3:], v[-4:]
    ltail4 = lv[-4:]
    ev["tail_median"] = float(np.median(tail3))
    ev["tail_min"] = float(tail4.min())
    ev["tail_max"] = float(tail4.max())
    if np.median(lv[-3:]) >= np.log(cap):
        ev["log_tail_median"] = float(np.median(lv[-3:]))
        return Trend.TO_INFINITY, ev
    if np.all(tail4 == 0.0):
        ev["log_slope"] = -np.inf
        return Trend.TO_ZERO, ev
    if np.all(np.isfinite(ltail4)):
        slope = float(np.polyfit(np.arange(4.0), ltail4, 1)[0])
    else:
        # some exact zeros in the tail: decreasing if the last sample is 0
        slope = -np.inf if tail4[-1] == 0.0 else np.inf
    ev["log_slope"] = slope
    if ev["tail_median"] < eps_zero and slope < 0:
        return Trend.TO_ZERO, ev
    if tail4.min() > 0 and tail4.max() / tail4.min() <= band:
        return Trend.BOUNDED, ev
    return Trend.INCONCLUSIVE, ev


def make_profile(radii, values, log_values=None, points=None, **kw) -> LimitProfile:
    trend, ev = classify(values, log_values, **kw)
    v = np.asarray(values, dtype=float)
    sup = float(np.nanmax(v)) if trend == Trend.BOUNDED and v.size else None
    return LimitProfile(
        radii=np.asarray(radii, dtype=float),
        values=v,
        trend=trend,
        sup=sup,
        log_values=None if log_values is None else np.asarray(log_values, float),
        points=points,
        evidence=ev,
    )


@dataclass(frozen=True)
class StolzSchedule:
    """Sample points inside the nontangential region at a boundary point.

    Ray j is ``zeta * (1 - 2^-k * exp(i psi_j))`` for k = k_min..k_max with
    psi_j spread over a fraction of the half-aperture arccos(1/alpha); the
    central ray (psi = 0) is the radius to ``zeta``.
    """

    zeta: complex
    alpha: float = 2.0
    rays: int = 5
    k_min: int = K_MIN
    k_max: int = 19
    spread: float = 0.6

    def __post_init__(self):
        if self.alpha <= 1:
            raise ValueError("aperture alpha must exceed 1")
        if abs(abs(self.zeta) - 1.0) > 1e-12:
            raise ValueError("zeta must lie on the unit circle")

    @classmethod
    def at_angle(cls, theta: float, r_max: float, **kw) -> "StolzSchedule":
        return cls(zeta=complex(np.cos(theta), np.sin(theta)), k_max=k_max_for(r_max), **kw)

    @property
    def ks(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    @property
    def radii(self) -> np.ndarray:
        return 1.0 - 2.0 ** (-self.ks.astype(float))

    @property
    def ray_angles(self) -> np.ndarray:
        half = self.spread * np.arccos(1.0 / self.alpha)
        if self.rays == 1:
            return np.zeros(1)
        return np.linspace(-half, half, self.rays)

    def points(self) -> np.ndarray:
        """Complex array of shape (rays, len(radii)); points outside the
        region are NaN (none are for the default parameters)."""
        eps = 2.0 ** (-self.ks.astype(float))
        z = self.zeta * (1.0 - eps[None, :] * np.exp(1j * self.ray_angles)[:, None])
        inside = np.abs(z - self.zeta) < self.alpha * (1.0 - np.abs(z))
        return np.where(inside, z, np.nan + 0j)


def fmt_float(x: float) -> str:
    """Shortest round-tripping decimal form, without a trailing ``.0``."""
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def boundary_angles(n: int = 64) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n) / n
