"""Entire test functions and multipliers on the disk.

Grammar: ``mono:n``, ``explin:lam``, ``poly:c0,c1,...``, ``const:c``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .expr import Const, Exp, Expr, Z, powi
from .profiles import fmt_float


@dataclass(frozen=True)
class TestFunction:
    """A holomorphic function on a neighbourhood of the closed disk."""

    __test__ = False  # not a pytest class

    kind: str
    params: tuple
    expr: Expr = field(compare=False, repr=False)

    @cached_property
    def dexpr(self) -> Expr:
        return self.expr.diff()

    def __call__(self, z):
        return self.expr(z)

    def deriv(self, z):
        return self.dexpr(z)

    def scaled(self, c: complex) -> "TestFunction":
        return TestFunction(self.kind + "*", (complex(c),) + self.params, Const(complex(c)) * self.expr)

    def __str__(self) -> str:
        if self.kind == "mono":
            return f"mono:{self.params[0]}"
        if self.kind == "explin":
            return f"explin:{_c(self.params[0])}"
        if self.kind == "const":
            return f"const:{_c(self.params[0])}"
        if self.kind == "poly":
            return "poly:" + ",".join(_c(c) for c in self.params)
        return f"{self.kind}{self.params}"


def _c(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return fmt_float(c.real)
    sign = "+" if c.imag >= 0 else "-"
    return f"{fmt_float(c.real)}{sign}{fmt_float(abs(c.imag))}j"


def monomial_fn(n: int) -> TestFunction:
    if n < 0:
        raise ValueError("monomial degree must be >= 0")
    return TestFunction("mono", (int(n),), powi(Z, int(n)))


def explin(lam: complex) -> TestFunction:
    return TestFunction("explin", (complex(lam),), Exp(Const(complex(lam)) * Z))


def polynomial(coeffs) -> TestFunction:
    coeffs = tuple(complex(c) for c in coeffs)
    if not coeffs:
        raise ValueError("polynomial needs at least one coefficient")
    e: Expr = Const(0j)
    for j, c in enumerate(coeffs):
        e = e + Const(c) * powi(Z, j)
    return TestFunction("poly", coeffs, e)


def constant(c: complex) -> TestFunction:
    return TestFunction("const", (complex(c),), Const(complex(c)))


def parse_function(text: str) -> TestFunction:
    kind, _, body = text.strip().partition(":")
    kind = kind.lower()
    try:
        if kind == "mono":
            return monomial_fn(int(body))
        if kind == "explin":
            return explin(complex(body))
        if kind == "poly":
            return polynomial([complex(c) for c in body.split(",")])
        if kind == "const":
            return constant(complex(body))
    except ValueError as exc:
        raise ValueError(f"cannot parse function {text!r}: {exc}") from exc
    raise ValueError(f"cannot parse function {text!r}")


def sup_modulus(f: TestFunction, n: int = 4096) -> float:
    """Maximum of ``|f|`` on the unit circle, which bounds it on the disk."""
    z = np.exp(2j * np.pi * np.arange(n) / n)
    return float(np.max(np.abs(f(z))))
