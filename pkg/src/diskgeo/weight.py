"""Radial exponential-type weights and their derived quantities.

A weight is ``omega(r) = exp(-phi(r))``. From ``phi`` we derive the radial
Laplacian ``phi'' + phi'/r``, the radius function ``tau = laplacian^(-1/2)``
and its derivative, plus grid-calibrated constants ``c1``, ``c2``, ``m_tau``
and ``r0``. Ratios of weights are always formed in log space.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import PchipInterpolator

from .errors import NonFiniteDerived, NotClassW, NotRadiusFunction, OutsideTruncation
from .profiles import fmt_float, k_max_for

R_MAX_DEFAULT = 1.0 - 1e-6
SAFETY = 1.05
N_GRID = 10_000

RadialFn = Callable[[np.ndarray], np.ndarray]


# -- weight specifications ---------------------------------------------------


@dataclass(frozen=True)
class ExpPower:
    """``phi(r) = a (1 - r)^(-b)``."""

    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"ExpPower needs a > 0 and b > 0, got a={self.a}, b={self.b}")

    def __str__(self) -> str:
        return f"exp:a={fmt_float(self.a)},b={fmt_float(self.b)}"

    def derivatives(self, r: np.ndarray) -> tuple[np.ndarray, ...]:
        a, b = self.a, self.b
        x = 1.0 - r
        phi = a * x ** (-b)
        d1 = a * b * x ** (-b - 1)
        d2 = a * b * (b + 1) * x ** (-b - 2)
        d3 = a * b * (b + 1) * (b + 2) * x ** (-b - 3)
        return phi, d1, d2, d3


@dataclass(frozen=True)
class LogProxy:
    """Standard-weight proxy ``omega = (1 - r)^alpha`` with ``tau = 1 - r``.

    Not a member of the exponential class; kept for comparison and oracles.
    """

    alpha: float = 0.0

    def __post_init__(self):
        if not self.alpha > -1:
            raise ValueError(f"LogProxy needs alpha > -1, got {self.alpha}")

    def __str__(self) -> str:
        return f"logproxy:alpha={fmt_float(self.alpha)}"

    def derivatives(self, r: np.ndarray) -> tuple[np.ndarray, ...]:
        x = 1.0 - r
        al = self.alpha
        return -al * np.log(x), al / x, al / x**2, 2.0 * al / x**3


@dataclass(frozen=True)
class Custom:
    """User supplied radial ``phi`` with its first two derivatives.

    ``dddphi`` is optional; when absent it is approximated by a central
    difference of ``ddphi``.
    """

    phi: RadialFn
    dphi: RadialFn
    ddphi: RadialFn
    label: str = "custom"
    dddphi: RadialFn | None = field(default=None, compare=False)

    def __str__(self) -> str:
        return f"custom:{self.label}"

    def derivatives(self, r: np.ndarray) -> tuple[np.ndarray, ...]:
        r = np.asarray(r, dtype=float)
        if self.dddphi is not None:
            d3 = self.dddphi(r)
        else:
            h = 1e-6
            d3 = (self.ddphi(r + h) - self.ddphi(r - h)) / (2 * h)
        return self.phi(r), self.dphi(r), self.ddphi(r), d3


WeightSpec = Union[ExpPower, LogProxy, Custom]


def custom_from_json(path: str | Path) -> Custom:
    """Load a sampled ``phi`` from JSON ``{"r": [...], "phi": [...],
    "interpolation": "monotone-cubic"}``."""
    data = json.loads(Path(path).read_text())
    interp = data.get("interpolation", "monotone-cubic")
    if interp != "monotone-cubic":
        raise ValueError(f"unsupported interpolation rule {interp!r}")
    r = np.asarray(data["r"], dtype=float)
    phi = np.asarray(data["phi"], dtype=float)
    if r.ndim != 1 or r.shape != phi.shape or r.size < 4:
        raise ValueError("custom weight needs matching 1-D r and phi arrays of length >= 4")
    f = PchipInterpolator(r, phi, extrapolate=False)
    d1, d2, d3 = f.derivative(1), f.derivative(2), f.derivative(3)
    return Custom(phi=f, dphi=d1, ddphi=d2, dddphi=d3, label=f"@{path}")


_KV = re.compile(r"^\s*([A-Za-z_]+)\s*=\s*([-+0-9.eE]+)\s*$")


def parse_weight(text: str) -> WeightSpec:
    """Parse ``exp:a=1,b=1``, ``logproxy:alpha=0`` or ``custom:@file.json``."""
    head, _, body = text.strip().partition(":")
    head = head.lower()
    if head == "custom":
        if not body.startswith("@"):
            raise ValueError("custom weights are given as custom:@file.json")
        return custom_from_json(body[1:])
    kv: dict[str, float] = {}
    for part in filter(None, body.split(",")):
        m = _KV.match(part)
        if not m:
            raise ValueError(f"cannot parse weight parameter {part!r} in {text!r}")
        kv[m.group(1)] = float(m.group(2))
    if head == "exp":
        unknown = set(kv) - {"a", "b"}
        if unknown:
            raise ValueError(f"unknown exp parameters {sorted(unknown)}")
        return ExpPower(**kv)
    if head == "logproxy":
        unknown = set(kv) - {"alpha"}
        if unknown:
            raise ValueError(f"unknown logproxy parameters {sorted(unknown)}")
        return LogProxy(**kv)
    raise ValueError(f"unknown weight family {head!r}; expected exp, logproxy or custom")


# -- the built model ---------------------------------------------------------


def calibration_grid(r_max: float, n: int = N_GRID) -> np.ndarray:
    """Deterministic grid on (0, r_max]: uniform plus log-spaced in 1 - r."""
    uni = np.linspace(0.0, r_max, n + 1)[1:]
    lo = np.log10(1.0 - r_max)
    near = 1.0 - np.logspace(-1.0, lo, n)
    return np.unique(np.concatenate([uni, near]))


def validation_grid(r_max: float, n: int = N_GRID) -> np.ndarray:
    """Midpoints of the calibration grid, hence disjoint from it."""
    g = calibration_grid(r_max, n)
    return 0.5 * (g[1:] + g[:-1])


@dataclass(frozen=True)
class WeightModel:
    """A weight with derived radial functions and calibration constants.

    All radial methods are vectorised over ``r`` and never evaluate
    ``omega`` itself.
    """

    spec: WeightSpec
    r_max: float
    c1: float
    c2: float
    m_tau: float
    r0: float
    r_reg: float

    @property
    def is_class_w(self) -> bool:
        return not isinstance(self.spec, LogProxy)

    def require_class_w(self, what: str = "this operation") -> None:
        if not self.is_class_w:
            raise NotClassW(f"{what} needs a weight of class W; {self.spec} is a proxy")

    def _d(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self.spec.derivatives(r)

    def phi(self, r):
        return self._d(r)[0]

    def dphi(self, r):
        return self._d(r)[1]

    def ddphi(self, r):
        return self._d(r)[2]

    def omega_log(self, r):
        return -self.phi(r)

    def laplacian(self, r):
        r = np.asarray(r, dtype=float)
        _, d1, d2, _ = self._d(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            return d2 + np.where(r > 0, d1 / np.where(r > 0, r, 1.0), np.inf)

    def tau(self, r):
        r = np.asarray(r, dtype=float)
        if isinstance(self.spec, LogProxy):
            return 1.0 - r
        with np.errstate(divide="ignore"):
            return self.laplacian(r) ** -0.5

    def dtau(self, r):
        r = np.asarray(r, dtype=float)
        if isinstance(self.spec, LogProxy):
            return -np.ones_like(r)
        _, d1, d2, d3 = self._d(r)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            rs = np.where(r > 0, r, np.nan)
            lap = d2 + d1 / rs
            dlap = d3 + d2 / rs - d1 / rs**2
            return -0.5 * lap**-1.5 * dlap

    def tau_z(self, z):
        return self.tau(np.abs(np.asarray(z)))

    def phi_z(self, z):
        return self.phi(np.abs(np.asarray(z)))

    def check_inside(self, *points) -> None:
        for p in points:
            if np.any(np.abs(np.asarray(p)) > self.r_max * (1 + 1e-15)):
                raise OutsideTruncation(f"point(s) beyond r_max={self.r_max}")

    # radial tau-arclength s(r) = int_0^r dt / tau(t), tabulated once

    @cached_property
    def _s_table(self) -> tuple[np.ndarray, np.ndarray]:
        # near 0 substitute r = x^2 (1/tau ~ r^-1/2 there); outside 0.25 use
        # g = -log(1 - r) so the tail is resolved all the way to r_max
        x = np.linspace(0.0, 0.5, 20001)
        r1 = x**2
        with np.errstate(divide="ignore", invalid="ignore"):
            f1 = np.where(x > 0, 2.0 * x / self.tau(r1), 0.0)
        if isinstance(self.spec, LogProxy):
            f1 = 2.0 * x / (1.0 - r1)
        s1 = cumulative_trapezoid(f1, x, initial=0.0)
        g = np.linspace(-np.log(0.75), -np.log(1.0 - self.r_max), 40001)
        r2 = 1.0 - np.exp(-g)
        f2 = (1.0 - r2) / self.tau(r2)
        s2 = s1[-1] + cumulative_trapezoid(f2, g, initial=0.0)
        return np.concatenate([r1, r2[1:]]), np.concatenate([s1, s2[1:]])

    def s_of_r(self, r):
        rr, ss = self._s_table
        return np.interp(r, rr, ss)

    def r_of_s(self, s):
        rr, ss = self._s_table
        return np.interp(s, ss, rr)

    def max_tau_on(self, r_lo: float, r_hi: float) -> float:
        """Maximum of tau over radii in [r_lo, r_hi] (clipped to [0, r_max])."""
        lo, hi = max(0.0, r_lo), min(self.r_max, r_hi)
        if lo > hi:
            lo = hi
        cand = [lo, hi]
        if lo <= self.r_reg <= hi:
            cand.append(self.r_reg)
        g = np.linspace(lo, hi, 65)
        return float(max(np.max(self.tau(np.asarray(cand))), np.max(self.tau(g))))

    def min_tau_on(self, r_lo: float, r_hi: float) -> float:
        lo, hi = max(0.0, r_lo), min(self.r_max, r_hi)
        if lo > hi:
            lo = hi
        g = np.linspace(lo, hi, 65)
        return float(np.min(self.tau(g)))

    def to_dict(self) -> dict:
        return {
            "spec": str(self.spec),
            "r_max": self.r_max,
            "c1": self.c1,
            "c2": self.c2,
            "m_tau": self.m_tau,
            "r0": self.r0,
            "r_reg": self.r_reg,
            "class_w": self.is_class_w,
        }


def build_weight(spec: WeightSpec | str, r_max: float = R_MAX_DEFAULT) -> WeightModel:
    """Derive radial functions and calibrate the constants on a grid.

    ``c1`` is the sampled maximum of ``tau(r) / (1 - r)``. ``c2`` is the
    sampled Lipschitz constant of ``tau`` over ``r >= r_reg``, the radius where
    ``tau`` peaks: the exact representative behaves like ``sqrt(r)`` at the
    origin and is not Lipschitz there. Both carry the factor 1.05.
    """
    if isinstance(spec, str):
        spec = parse_weight(spec)
    if not (0.9 <= r_max < 1.0):
        raise ValueError(f"r_max must satisfy 0.9 <= r_max < 1, got {r_max}")
    probe = WeightModel(spec, r_max, 1.0, 1.0, 0.25, 0.0, 0.0)
    g = calibration_grid(r_max)
    d = probe._d(g)
    lap = probe.laplacian(g)
    tau = probe.tau(g)
    dtau = probe.dtau(g)
    if not isinstance(spec, LogProxy):
        for name, arr in zip(("phi", "dphi", "ddphi"), d[:3]):
            if not np.all(np.isfinite(arr)):
                raise NonFiniteDerived(f"{name} is not finite on the grid for {spec}")
        for name, arr in (("laplacian", lap), ("tau", tau), ("dtau", dtau)):
            if not np.all(np.isfinite(arr)):
                raise NonFiniteDerived(f"{name} is not finite on the grid for {spec}")
    if not np.all(tau > 0):
        bad = g[np.argmax(~(tau > 0))]
        raise NotRadiusFunction(f"tau is not positive at r={bad:.6g} for {spec}")

    c1 = SAFETY * float(np.max(tau / (1.0 - g)))
    i_reg = int(np.argmax(tau))
    r_reg = float(g[i_reg])
    gr, tr = g[i_reg:], tau[i_reg:]
    c2 = SAFETY * float(np.max(np.abs(np.diff(tr)) / np.diff(gr)))
    m_tau = min(1.0, 1.0 / c1, 1.0 / c2) / 4.0

    ok = d[1] * tau >= 0.5
    bad = np.nonzero(~ok)[0]
    if bad.size == 0:
        r0 = float(g[0])
    elif bad[-1] == g.size - 1:
        r0 = float(r_max)
    else:
        r0 = float(g[bad[-1] + 1])
    return WeightModel(spec, float(r_max), c1, c2, m_tau, r0, r_reg)


# -- class membership report -------------------------------------------------


@dataclass
class ValidationEntry:
    name: str
    passed: bool
    evidence: list[tuple[float, float]]
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "evidence": [(float(r), float(v)) for r, v in self.evidence],
            "note": self.note,
        }


@dataclass
class ValidationReport:
    spec: str
    entries: list[ValidationEntry]
    not_class_w: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.not_class_w and all(e.passed for e in self.entries)

    def entry(self, name: str) -> ValidationEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec,
            "pass": self.passed,
            "not_class_w": self.not_class_w,
            "entries": [e.to_dict() for e in self.entries],
            "notes": list(self.notes),
        }


def _tail_slope(v: np.ndarray) -> float:
    lv = np.log(np.abs(v[-4:]))
    return float(np.polyfit(np.arange(lv.size, dtype=float), lv, 1)[0])


def _to_zero(v: np.ndarray) -> bool:
    a = np.abs(v)
    return bool(np.all(a[-4:] > 0) and _tail_slope(a) < 0 and a[-1] <= 0.05 * a.max()) or bool(
        a[-1] == 0
    )


def _to_inf(v: np.ndarray) -> bool:
    return bool(np.all(v[-4:] > 0) and _tail_slope(v) > 0 and v[-1] >= 10 * np.min(v))


def _nonincreasing(v: np.ndarray, rtol: float = 1e-9) -> bool:
    return bool(np.all(np.diff(v) <= rtol * np.abs(v[:-1])))


ADDCONDIT_A = 2.0


def validate_class_w(model: WeightModel) -> ValidationReport:
    """Check the class conditions on the schedule ``r_k = 1 - 2^-k``.

    The growth function ``A(r) = phi(r) / log(1/(1 - r))`` is only examined
    for ``r >= 1/2``; near the origin it is not monotone for the exponential
    family, and that is recorded as a note rather than a failure.
    """
    spec = str(model.spec)
    if not model.is_class_w:
        e = ValidationEntry("class_w_membership", False, [], "proxy weight, not of class W")
        return ValidationReport(spec, [e], not_class_w=True)

    ks = np.arange(1, k_max_for(model.r_max) + 1)
    r = 1.0 - 2.0 ** (-ks.astype(float))
    phi, d1, d2, _ = model._d(r)
    tau, dtau = model.tau(r), model.dtau(r)
    A = phi / np.log(1.0 / (1.0 - r))
    ev = lambda v: list(zip(r.tolist(), np.asarray(v, float).tolist()))  # noqa: E731
    entries = []

    entries.append(
        ValidationEntry(
            "A_nondecreasing_to_infinity",
            bool(np.all(np.diff(A) >= -1e-9 * A[:-1]) and _to_inf(A)),
            ev(A),
        )
    )
    beyond = r >= model.r_reg
    entries.append(
        ValidationEntry(
            "tau_decreasing_to_zero",
            _nonincreasing(tau[beyond]) and _to_zero(tau),
            ev(tau),
        )
    )
    entries.append(
        ValidationEntry(
            "neg_dtau_decreasing_to_zero",
            _nonincreasing(-dtau[beyond]) and _to_zero(-dtau),
            ev(-dtau),
        )
    )
    b1 = dtau * np.log(1.0 / tau)
    b2_log = np.log(tau) - ADDCONDIT_A * np.log(1.0 - r)
    br1, br2 = _to_zero(b1), _to_inf(np.exp(np.minimum(b2_log, 700.0)))
    entries.append(
        ValidationEntry(
            "addcondit",
            br1 or br2,
            ev(b1),
            f"branch tau'*log(1/tau)->0: {br1}; branch tau/(1-r)^{ADDCONDIT_A:g}->inf: {br2}",
        )
    )
    grid = calibration_grid(model.r_max)
    past = grid[grid > model.r0]
    prod_grid = model.dphi(past) * model.tau(past)
    prod = d1 * tau
    entries.append(
        ValidationEntry(
            "dphi_tau_at_least_half",
            bool(np.all(prod_grid >= 0.5) and np.all(prod[r > model.r0] >= 0.5)),
            ev(prod),
            f"r0={model.r0:.6g}",
        )
    )
    inv = -d2 / d1**2
    entries.append(ValidationEntry("inv_dphi_derivative_to_zero", _to_zero(inv), ev(inv)))
    notes = [
        "A(0) != 0 is not examined: for the exponential family A(r) tends to 0 "
        "at the origin; only the near-boundary window r >= 1/2 is validated."
    ]
    return ValidationReport(spec, entries, notes=notes)


def weight_log_ratio(model: WeightModel, z, w):
    """``log(omega(z)/omega(w)) = phi(|w|) - phi(|z|)``."""
    model.check_inside(z, w)
    return model.phi(np.abs(np.asarray(w))) - model.phi(np.abs(np.asarray(z)))
