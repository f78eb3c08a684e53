"""Holomorphic self-maps of the disk as expression trees.

Maps are built from a handful of families and two combinators (convex
combination and composition). Each map carries its expression tree and the
exact derivative tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .expr import Const, Expr, Z, powi
from .profiles import LimitProfile, StolzSchedule, fmt_float, make_profile
from .weight import R_MAX_DEFAULT

ANALYTIC_SELF_MAPS = {"id", "scale", "moebius", "mono"}


@dataclass(frozen=True)
class SelfMapExpr:
    """A map node. ``kind`` is one of id, scale, affine, moebius, mono,
    perturb, convex, comp; ``params`` holds the numeric parameters and
    ``children`` the sub-maps of the combinators."""

    kind: str
    params: tuple = ()
    children: tuple["SelfMapExpr", ...] = ()
    expr: Expr = field(default=Z, compare=False, repr=False)

    @cached_property
    def dexpr(self) -> Expr:
        return self.expr.diff()

    def eval(self, z):
        return self.expr(z)

    __call__ = eval

    def deriv(self, z):
        return self.dexpr(z)

    @property
    def analytic_self_map(self) -> bool:
        if self.kind in ANALYTIC_SELF_MAPS:
            return True
        if self.kind == "comp":
            return all(c.analytic_self_map for c in self.children)
        if self.kind == "convex":
            return all(c.analytic_self_map for c in self.children)
        return False

    def __str__(self) -> str:
        k, p = self.kind, self.params
        if k == "id":
            return "id"
        if k in ("scale", "moebius"):
            return f"{k}:{_cfmt(p[0])}"
        if k == "affine":
            return f"affine:{_cfmt(p[0])},{_cfmt(p[1])}"
        if k == "mono":
            return f"mono:{p[0]}"
        if k == "perturb":
            return f"perturb:c={fmt_float(p[0])},k={p[1]}"
        if k == "convex":
            return f"convex:t={fmt_float(p[0])}({self.children[0]})({self.children[1]})"
        if k == "comp":
            return f"comp:({self.children[0]})({self.children[1]})"
        raise AssertionError(k)


def _cfmt(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return fmt_float(c.real)
    sign = "+" if c.imag >= 0 else "-"
    return f"{fmt_float(c.real)}{sign}{fmt_float(abs(c.imag))}j"


# -- constructors -------------------------------------------------------------


def identity() -> SelfMapExpr:
    return SelfMapExpr("id", (), (), Z)


def scale(c: complex) -> SelfMapExpr:
    if abs(c) > 1:
        raise ValueError(f"scale factor must satisfy |c| <= 1, got {c}")
    return SelfMapExpr("scale", (complex(c),), (), Const(complex(c)) * Z)


def affine(a: complex, b: complex) -> SelfMapExpr:
    """``z -> a z + b`` (not necessarily a self-map; see ``check_selfmap``)."""
    return SelfMapExpr("affine", (complex(a), complex(b)), (), Const(complex(a)) * Z + complex(b))


def moebius(a: complex) -> SelfMapExpr:
    """Disk automorphism ``z -> (a + z) / (1 + conj(a) z)``."""
    a = complex(a)
    if abs(a) >= 1:
        raise ValueError(f"Moebius parameter must satisfy |a| < 1, got {a}")
    e = (Const(a) + Z) / (Const(1) + Const(a.conjugate()) * Z)
    return SelfMapExpr("moebius", (a,), (), e)


def monomial(n: int) -> SelfMapExpr:
    if int(n) != n or n < 1:
        raise ValueError(f"monomial degree must be an integer >= 1, got {n}")
    return SelfMapExpr("mono", (int(n),), (), powi(Z, int(n)))


def perturb(c: float, k: int) -> SelfMapExpr:
    """``z -> z + c (1 - z)^k``: fixes 1 with angular derivative 1 there."""
    if not c > 0:
        raise ValueError(f"perturbation size must be positive, got {c}")
    if int(k) != k or k < 2:
        raise ValueError(f"perturbation order must be an integer >= 2, got {k}")
    e = Z + Const(float(c)) * powi(Const(1) - Z, int(k))
    return SelfMapExpr("perturb", (float(c), int(k)), (), e)


def convex(t: float, left: SelfMapExpr, right: SelfMapExpr) -> SelfMapExpr:
    """``(1 - t) left + t right``."""
    if not 0 <= t <= 1:
        raise ValueError(f"convex weight must lie in [0, 1], got {t}")
    e = Const(1.0 - t) * left.expr + Const(float(t)) * right.expr
    return SelfMapExpr("convex", (float(t),), (left, right), e)


def compose(outer: SelfMapExpr, inner: SelfMapExpr) -> SelfMapExpr:
    """``outer(inner(z))``."""
    return SelfMapExpr("comp", (), (outer, inner), outer.expr.subs(inner.expr))


# -- grammar ------------------------------------------------------------------


def _groups(text: str) -> tuple[str, list[str]]:
    """Split ``head(g1)(g2)`` into head and top-level parenthesised groups."""
    head_end = text.find("(")
    if head_end < 0:
        return text, []
    head, rest, groups = text[:head_end], text[head_end:], []
    depth, start = 0, 0
    for i, ch in enumerate(rest):
        if ch == "(":
            if depth == 0:
                start = i + 1
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced parentheses in {text!r}")
            if depth == 0:
                groups.append(rest[start:i])
        elif depth == 0 and not ch.isspace():
            raise ValueError(f"unexpected {ch!r} between groups in {text!r}")
    if depth != 0:
        raise ValueError(f"unbalanced parentheses in {text!r}")
    return head, groups


def _kv(body: str) -> dict[str, str]:
    out = {}
    for part in filter(None, body.split(",")):
        k, eq, v = part.partition("=")
        if not eq:
            raise ValueError(f"expected key=value, got {part!r}")
        out[k.strip()] = v.strip()
    return out


def parse_map(text: str) -> SelfMapExpr:
    """Parse the map grammar: ``id``, ``scale:0.5``, ``affine:0.5,0.5``,
    ``moebius:0.5``, ``mono:2``, ``perturb:c=0.05,k=3``,
    ``convex:t=0.3(<m1>)(<m2>)``, ``comp:(<m1>)(<m2>)``."""
    text = text.strip()
    head, groups = _groups(text)
    kind, _, body = head.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "id" and not body and not groups:
            return identity()
        if kind == "scale":
            return scale(complex(body))
        if kind == "affine":
            a, b = body.split(",")
            return affine(complex(a), complex(b))
        if kind == "moebius":
            return moebius(complex(body))
        if kind == "mono":
            return monomial(int(body))
        if kind == "perturb":
            kv = _kv(body)
            return perturb(float(kv["c"]), int(kv["k"]))
        if kind == "convex" and len(groups) == 2:
            t = float(_kv(body)["t"])
            return convex(t, parse_map(groups[0]), parse_map(groups[1]))
        if kind == "comp" and len(groups) == 2 and not body.strip():
            return compose(parse_map(groups[0]), parse_map(groups[1]))
    except (KeyError, ValueError) as exc:
        raise ValueError(f"cannot parse map {text!r}: {exc}") from exc
    raise ValueError(f"cannot parse map {text!r}")


# -- checks -------------------------------------------------------------------


@dataclass(frozen=True)
class SelfMapCheck:
    ok: bool
    sup_modulus: float
    witness: complex
    witness_value: complex
    analytic: bool
    n_samples: int
    seed: int

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "sup_modulus": self.sup_modulus,
            "witness": [self.witness.real, self.witness.imag],
            "analytic": self.analytic,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


def disk_samples(n: int, seed: int, r_max: float = R_MAX_DEFAULT, n_circle: int = 4096) -> np.ndarray:
    """Seeded area-uniform points on the truncated disk plus the r_max circle."""
    rng = np.random.default_rng(seed)
    r = r_max * np.sqrt(rng.random(n))
    th = 2 * np.pi * rng.random(n)
    circ = r_max * np.exp(2j * np.pi * np.arange(n_circle) / n_circle)
    return np.concatenate([r * np.exp(1j * th), circ])


def check_selfmap(
    m: SelfMapExpr, n_samples: int = 100_000, seed: int = 0, r_max: float = R_MAX_DEFAULT
) -> SelfMapCheck:
    """Sampled test that ``sup |m(z)| < 1 - 1e-9``.

    The witness is the sample with the largest ``|m(z)|``.
    """
    z = disk_samples(n_samples, seed, r_max)
    w = m(z)
    a = np.abs(w)
    i = int(np.nanargmax(a))
    ok = bool(np.all(np.isfinite(a)) and a[i] < 1 - 1e-9)
    return SelfMapCheck(ok, float(a[i]), complex(z[i]), complex(w[i]), m.analytic_self_map, n_samples, seed)


BETA_LOW, BETA_HIGH, BETA_INF = 0.99, 1.01, 1e3


@dataclass
class BetaProfile(LimitProfile):
    """Angular-derivative profile with its band classification."""

    beta_class: str = "inconclusive"
    tail: float = float("nan")
    per_ray_tail: tuple = ()

    def to_dict(self) -> dict:
        d = super().to_dict()
        d.update(beta_class=self.beta_class, tail=self.tail, per_ray_tail=list(self.per_ray_tail))
        return d


def beta_band(tail: float, bounded: bool) -> str:
    if not np.isfinite(tail) or tail > BETA_INF:
        return "beta=inf"
    if tail < BETA_LOW:
        return "beta<1"
    if tail <= BETA_HIGH:
        return "beta~1"
    return "beta>1" if bounded else "inconclusive"


def angular_derivative(m: SelfMapExpr, schedule: StolzSchedule) -> BetaProfile:
    """Profile of ``(1 - |m(z)|) / (1 - |z|)`` along a Stolz schedule.

    The liminf is estimated as the minimum over rays of the median of the
    last three radii; the reported profile is the per-radius minimum over
    rays.
    """
    pts = schedule.points()
    vals = (1.0 - np.abs(m(pts))) / (1.0 - np.abs(pts))
    tails = np.array([np.nanmedian(v[-3:]) for v in vals])
    tail = float(np.nanmin(tails))
    env = np.nanmin(vals, axis=0)
    base = make_profile(schedule.radii, env, points=pts)
    last4 = env[-4:]
    bounded = bool(np.all(last4 > 0) and last4.max() / last4.min() <= 2.0)
    cls = beta_band(tail, bounded)
    return BetaProfile(
        radii=base.radii,
        values=base.values,
        trend=base.trend,
        sup=base.sup,
        points=pts,
        evidence=base.evidence,
        beta_class=cls,
        tail=tail,
        per_ray_tail=tuple(float(t) for t in tails),
    )


def region_E(zeta: complex, k: float, z) -> np.ndarray:
    """Membership in ``{z : |zeta - z|^2 <= k (1 - |z|^2)}``."""
    z = np.asarray(z, dtype=complex)
    return np.abs(zeta - z) ** 2 <= k * (1.0 - np.abs(z) ** 2)
