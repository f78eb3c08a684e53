from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diskgeo.expr import Z, Const, Exp
from diskgeo.functions import constant, explin, monomial_fn, parse_function, polynomial, sup_modulus
from diskgeo.profiles import StolzSchedule
from diskgeo.selfmap import (
    affine,
    angular_derivative,
    check_selfmap,
    compose,
    convex,
    identity,
    moebius,
    monomial,
    parse_map,
    perturb,
    region_E,
    scale,
)

points = st.complex_numbers(max_magnitude=0.95, allow_nan=False, allow_infinity=False)


def _fd(f, z, h=1e-6):
    return (f(np.array([z + h])) - f(np.array([z - h])))[0] / (2 * h)


def test_expr_derivative_rules():
    e = (Z**3 + Const(2) * Z) / (Const(1) - Z) * Exp(Z)
    z = 0.3 + 0.2j
    assert complex(e.diff()(np.array([z]))[0]) == pytest.approx(_fd(e, z), rel=1e-7)


def test_eval_examples():
    z = np.array([0.3 + 0.1j])
    assert identity()(z)[0] == z[0]
    assert identity().deriv(z)[0] == 1
    a = affine(0.5, 0.5)
    assert a(np.array([0.9]))[0] == pytest.approx(0.95)
    assert a.deriv(np.array([0.9]))[0] == pytest.approx(0.5)
    m = moebius(0.5)
    assert m(np.array([0.0]))[0] == pytest.approx(0.5)
    assert m.deriv(np.array([0.0]))[0] == pytest.approx(0.75)


@settings(max_examples=60, deadline=None)
@given(points, st.sampled_from(["id", "scale:0.5", "affine:0.5,0.5", "moebius:0.5", "mono:3",
                                "perturb:c=0.05,k=3", "convex:t=0.3(id)(mono:2)", "comp:(moebius:0.5)(mono:2)"]))
def test_derivative_tree_matches_finite_difference(z, text):
    m = parse_map(text)
    assert complex(m.deriv(np.array([z]))[0]) == pytest.approx(_fd(m, z), rel=1e-6, abs=1e-8)


@pytest.mark.parametrize("text", ["id", "scale:0.5", "affine:0.5,0.5", "moebius:0.5", "mono:2",
                                  "perturb:c=0.05,k=3", "convex:t=0.3(id)(mono:2)", "comp:(moebius:0.5)(mono:2)"])
def test_grammar_round_trip(text):
    m = parse_map(text)
    assert str(parse_map(str(m))) == str(m)


def test_parse_errors():
    for bad in ("", "scale", "affine:0.5", "perturb:c=0.05", "convex:t=0.3(id)", "wobble:1"):
        with pytest.raises(ValueError):
            parse_map(bad)
    with pytest.raises(ValueError):
        scale(1.5)


def test_combinators():
    z = np.array([0.2 - 0.4j, 0.7])
    c = convex(0.25, identity(), monomial(2))
    np.testing.assert_allclose(c(z), 0.75 * z + 0.25 * z**2)
    k = compose(moebius(0.5), monomial(2))
    np.testing.assert_allclose(k(z), moebius(0.5)(z**2))


def test_check_selfmap():
    assert check_selfmap(identity()).ok
    assert check_selfmap(perturb(0.05, 3)).ok
    bad = check_selfmap(affine(1, 0.5))
    assert not bad.ok
    assert bad.sup_modulus == pytest.approx(1.5, abs=1e-3)
    assert abs(affine(1, 0.5)(np.array([0.6]))[0]) == pytest.approx(1.1)


def _beta(m, theta=0.0):
    return angular_derivative(m, StolzSchedule.at_angle(theta, 1 - 1e-6))


def test_angular_derivative_examples():
    b = _beta(identity())
    np.testing.assert_allclose(b.values, 1.0)
    assert b.beta_class == "beta~1"
    a = _beta(affine(0.5, 0.5))
    assert a.tail == pytest.approx(0.5, abs=1e-3)
    assert a.beta_class == "beta<1"
    assert _beta(scale(0.5)).beta_class == "beta=inf"
    mo = _beta(moebius(0.5))
    assert mo.tail == pytest.approx(1 / 3, abs=1e-3)
    assert mo.beta_class == "beta<1"
    assert _beta(moebius(0.5), np.pi).beta_class == "beta>1"


def test_radial_affine_ratio_exact():
    r = 1 - 2.0 ** -np.arange(3, 15)
    v = (1 - (1 + r) / 2) / (1 - r)
    np.testing.assert_allclose(v, 0.5)


def test_region_E():
    assert region_E(1.0, 1.0, 0.0)
    r = np.linspace(0.01, 0.99, 99)
    for k in (0.3, 1.0, 3.0):
        np.testing.assert_array_equal(region_E(1.0, k, r), (1 - r) <= k * (1 + r))
    assert np.all(np.abs(affine(0.5, 0.5)(r)) >= r)


def test_functions():
    z = np.array([0.5, 0.3j])
    np.testing.assert_allclose(monomial_fn(3)(z), z**3)
    np.testing.assert_allclose(monomial_fn(3).deriv(z), 3 * z**2)
    np.testing.assert_allclose(explin(2).deriv(z), 2 * np.exp(2 * z))
    np.testing.assert_allclose(polynomial([1, 0, 2])(z), 1 + 2 * z**2)
    np.testing.assert_allclose(constant(3).deriv(z), 0)
    assert str(parse_function("poly:1,0,2")) == "poly:1,0,2"
    assert str(parse_function("explin:2")) == "explin:2"
    assert sup_modulus(monomial_fn(4)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        parse_function("sin:1")
