"""A small complex expression tree with exact differentiation.

Trees are immutable; ``diff`` applies sum, product, quotient, power and
chain rules with light constant folding, and ``subs`` replaces the variable
by another tree (composition).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class Expr:
    def __call__(self, z):
        return self.eval(np.asarray(z, dtype=complex))

    def eval(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def diff(self) -> "Expr":
        raise NotImplementedError

    def subs(self, inner: "Expr") -> "Expr":
        raise NotImplementedError

    def __add__(self, other):
        return add(self, lift(other))

    def __radd__(self, other):
        return add(lift(other), self)

    def __sub__(self, other):
        return add(self, mul(Const(-1), lift(other)))

    def __rsub__(self, other):
        return add(lift(other), mul(Const(-1), self))

    def __mul__(self, other):
        return mul(self, lift(other))

    def __rmul__(self, other):
        return mul(lift(other), self)

    def __truediv__(self, other):
        return div(self, lift(other))

    def __pow__(self, n: int):
        return powi(self, n)


def lift(x) -> Expr:
    return x if isinstance(x, Expr) else Const(complex(x))


@dataclass(frozen=True)
class Const(Expr):
    value: complex

    def eval(self, z):
        return np.full(np.shape(z), self.value, dtype=complex)

    def diff(self):
        return ZERO

    def subs(self, inner):
        return self

    def __str__(self):
        v = complex(self.value)
        return f"{v.real:g}" if v.imag == 0 else f"({v.real:g}{v.imag:+g}j)"


@dataclass(frozen=True)
class Var(Expr):
    def eval(self, z):
        return z

    def diff(self):
        return ONE

    def subs(self, inner):
        return inner

    def __str__(self):
        return "z"


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr

    def eval(self, z):
        return self.left.eval(z) + self.right.eval(z)

    def diff(self):
        return add(self.left.diff(), self.right.diff())

    def subs(self, inner):
        return add(self.left.subs(inner), self.right.subs(inner))

    def __str__(self):
        return f"({self.left} + {self.right})"


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr

    def eval(self, z):
        return self.left.eval(z) * self.right.eval(z)

    def diff(self):
        return add(mul(self.left.diff(), self.right), mul(self.left, self.right.diff()))

    def subs(self, inner):
        return mul(self.left.subs(inner), self.right.subs(inner))

    def __str__(self):
        return f"{self.left}*{self.right}"


@dataclass(frozen=True)
class Div(Expr):
    num: Expr
    den: Expr

    def eval(self, z):
        return self.num.eval(z) / self.den.eval(z)

    def diff(self):
        top = add(mul(self.num.diff(), self.den), mul(Const(-1), mul(self.num, self.den.diff())))
        return div(top, powi(self.den, 2))

    def subs(self, inner):
        return div(self.num.subs(inner), self.den.subs(inner))

    def __str__(self):
        return f"{self.num}/{self.den}"


@dataclass(frozen=True)
class PowInt(Expr):
    base: Expr
    n: int

    def eval(self, z):
        return self.base.eval(z) ** self.n

    def diff(self):
        return mul(mul(Const(self.n), powi(self.base, self.n - 1)), self.base.diff())

    def subs(self, inner):
        return powi(self.base.subs(inner), self.n)

    def __str__(self):
        return f"{self.base}^{self.n}"


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr

    def eval(self, z):
        return np.exp(self.arg.eval(z))

    def diff(self):
        return mul(self, self.arg.diff())

    def subs(self, inner):
        return Exp(self.arg.subs(inner))

    def __str__(self):
        return f"exp({self.arg})"


ZERO, ONE, Z = Const(0j), Const(1 + 0j), Var()


def _is(e: Expr, v: complex) -> bool:
    return isinstance(e, Const) and e.value == v


def add(a: Expr, b: Expr) -> Expr:
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return Add(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is(a, 0) or _is(b, 0):
        return ZERO
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is(a, 0):
        return ZERO
    if _is(b, 1):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value / b.value)
    return Div(a, b)


def powi(a: Expr, n: int) -> Expr:
    if n < 0:
        raise ValueError("negative integer powers are written as quotients")
    if n == 0:
        return ONE
    if n == 1:
        return a
    if isinstance(a, Const):
        return Const(a.value**n)
    return PowInt(a, n)
