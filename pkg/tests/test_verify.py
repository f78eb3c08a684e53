from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diskgeo.errors import HypothesisViolated, PairOutOfRange
from diskgeo.functions import constant, explin, monomial_fn, polynomial
from diskgeo.verify import (
    S_GRID,
    deriv_submean_check,
    difference_bound_check,
    disk_integral,
    exp_decay_check,
    impot_check,
    separation_check,
    submean_check,
)


def test_disk_integral_oracles():
    c, rho = 0.3 - 0.2j, 0.07
    assert disk_integral(lambda w: np.ones(w.shape), c, rho).value == pytest.approx(rho**2, rel=1e-14)
    assert disk_integral(lambda w: np.abs(w - c) ** 2, c, rho).value == pytest.approx(rho**4 / 2, rel=1e-12)
    v = disk_integral(lambda w: np.abs(w) ** 2, c, rho).value
    assert v == pytest.approx(rho**2 * abs(c) ** 2 + rho**4 / 2, rel=1e-12)
    g = lambda w: np.exp(w.real) * np.cos(w.imag)  # harmonic: mean value property
    assert disk_integral(g, c, rho).value == pytest.approx(rho**2 * g(np.array([c]))[0], rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 0.3), st.floats(-2, 2), st.floats(-2, 2))
def test_disk_integral_linear(rho, a, b):
    g1 = lambda w: np.abs(w) ** 3
    g2 = lambda w: np.cos(w.real)
    c = 0.1 + 0.2j
    lhs = disk_integral(lambda w: a * g1(w) + b * g2(w), c, rho).value
    rhs = a * disk_integral(g1, c, rho).value + b * disk_integral(g2, c, rho).value
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-15)


def test_disk_integral_clipped_flag():
    assert disk_integral(lambda w: np.ones(w.shape), 0.95, 0.1, r_max=0.99).clipped
    assert not disk_integral(lambda w: np.ones(w.shape), 0.5, 0.1, r_max=0.99).clipped


def test_submean_constant_is_exact(exp11):
    r = submean_check(exp11, monomial_fn(0), beta=0.0, n=20)
    assert r.worst_ratio == pytest.approx(1.0, rel=1e-12)
    assert r.passed and r.n_violations == 0


@pytest.mark.parametrize("f", [monomial_fn(5), explin(2)], ids=str)
def test_submean_finite_stable(exp11, f):
    r = submean_check(exp11, f, beta=1.0, p=2.0, n=100, seed=7)
    assert r.passed and np.isfinite(r.worst_ratio) and r.stability < 2
    assert r.n_points == 400 and r.seed == 7


def test_worst_ratio_nondecreasing(exp11):
    r = submean_check(exp11, monomial_fn(5), n=50, seed=3)
    assert r.worst_ratio >= r.details["worst_small"]


def test_deriv_submean(exp11):
    z = constant(2.0)
    assert deriv_submean_check(exp11, z, n=20).worst_ratio == 0
    r = deriv_submean_check(exp11, monomial_fn(3), n=100)
    assert r.passed
    r2 = deriv_submean_check(exp11, monomial_fn(3).scaled(2), n=100)
    assert r2.worst_ratio == pytest.approx(r.worst_ratio, rel=1e-10)


def test_difference_bound(exp11):
    f = monomial_fn(4)
    z = 0.7 + 0.1j
    same = difference_bound_check(exp11, None, f, pairs=[[z, z]])
    assert same.worst_ratio == 0
    assert difference_bound_check(exp11, None, f, n=100).passed
    assert difference_bound_check(exp11, None, f, n=100, swap=True).passed
    far = [[z, z + exp11.tau_z(z)]]
    with pytest.raises(PairOutOfRange):
        difference_bound_check(exp11, None, f, pairs=far)


def test_difference_bound_mesh_mode(exp11):
    r = difference_bound_check(exp11, None, polynomial([0, 1, 1]), n=5, mode="mesh")
    assert np.isfinite(r.worst_ratio)


def test_delta_hypothesis(exp11):
    with pytest.raises(HypothesisViolated):
        submean_check(exp11, monomial_fn(1), delta=exp11.m_tau)


def test_impot(exp11):
    assert S_GRID[0] == 0
    L = 0.9 / exp11.dphi(0.9 + 0.009)
    pair = [[0.9, 0.9 + 1j * L, 1.0]]
    r = impot_check(exp11, pair)
    assert r.worst_ratio < 1.0
    with pytest.raises(HypothesisViolated):
        impot_check(exp11, [[0.9, 0.93, 1.0]])
    assert impot_check(exp11, n=100).passed


def test_impot_radial_monotone(exp11):
    z, w = 0.8, 0.8 + 0.9 / exp11.dphi(0.81)
    zs = (1 - S_GRID) * z + S_GRID * w
    d = np.abs(exp11.phi(np.abs(zs)) - exp11.phi(z))
    assert np.all(np.diff(d) >= 0)


def test_separation(exp11):
    r = separation_check(exp11, None, pairs=[[0.5, -0.5]])
    assert r.details["kept"] == 1 and r.n_violations == 0
    z = 0.7
    inside = [[z, z + 0.1 * exp11.tau(z)]]
    assert separation_check(exp11, None, pairs=inside).details["kept"] == 0
    assert separation_check(exp11, None, n=40, seed=2).n_violations == 0


def test_exp_decay(logproxy, exp11):
    r1 = exp_decay_check(logproxy, None, 1, pairs=[[0, 0.9]], levels=(1, 2))
    assert r1.worst_ratio >= 0.9 * (1 - 0.02)
    assert r1.worst_ratio == pytest.approx(0.9, rel=0.05)
    pairs = [[0.5, 0.5 + 2 * exp11.tau(0.5)], [0.3j, 0.3j + 1.5j * exp11.tau(0.3)]]
    c1 = exp_decay_check(exp11, None, 1, pairs=pairs, levels=(1, 2))
    c2 = exp_decay_check(exp11, None, 2, pairs=pairs, levels=(1, 2))
    assert c2.worst_ratio >= c1.worst_ratio
