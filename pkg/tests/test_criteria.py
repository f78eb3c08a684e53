from __future__ import annotations

import numpy as np
import pytest

from diskgeo.criteria import (
    CriteriaConfig,
    Status,
    Verdict,
    beta_classes,
    boundedness,
    compact_difference,
    compactness,
    f_set,
    finite_sum_difference,
    gamma_difference,
    gamma_profiles,
    path_connectedness,
    weighted_comp_compactness,
)
from diskgeo.errors import HypothesisViolated, NotClassW
from diskgeo.functions import constant, polynomial
from diskgeo.profiles import Trend
from diskgeo.selfmap import affine, identity, moebius, monomial, perturb, scale

CFG = CriteriaConfig()


def test_config_validation():
    with pytest.raises(ValueError):
        CriteriaConfig(alpha=1.0).validate()
    with pytest.raises(ValueError):
        CriteriaConfig(eps_zero=2.0).validate()


def test_verdict_requires_margin():
    with pytest.raises(AssertionError):
        Verdict(Status.SATISFIED, 0.0, [], np.zeros(1))


def test_boundedness_examples(exp11):
    v = boundedness(exp11, identity())
    assert v.status == Status.SATISFIED
    for p in v.profiles:
        np.testing.assert_allclose(p.values, 1.0)
    a = boundedness(exp11, affine(0.5, 0.5))
    assert a.status == Status.VIOLATED and a.reason == "Unbounded"
    s = boundedness(exp11, scale(0.5))
    assert s.status == Status.SATISFIED
    assert all(p.trend == Trend.TO_ZERO for p in s.profiles)


def test_affine_closed_form_ratio(exp11):
    r = np.array([0.5, 0.8, 0.9])
    lr = exp11.phi(r) - exp11.phi((1 + r) / 2)
    np.testing.assert_allclose(lr, 1 / (1 - r) - 2 / (1 - r))
    r_cap = 1 - 1 / np.log(1e6)
    assert r_cap == pytest.approx(0.9276, abs=1e-4)
    assert np.exp(1 / (1 - r_cap)) == pytest.approx(1e6)


def test_compactness_examples(exp11):
    s = compactness(exp11, scale(0.5))
    assert s.status == Status.SATISFIED and s.reason == "Compact"
    assert {b.beta_class for b in beta_classes(exp11, scale(0.5), CFG, CFG.angles())} == {"beta=inf"}
    i = compactness(exp11, identity())
    assert i.status == Status.VIOLATED and i.reason == "BoundedNotCompact"
    assert {b.beta_class for b in beta_classes(exp11, identity(), CFG, CFG.angles())} == {"beta~1"}
    m = compactness(exp11, moebius(0.5))
    assert m.status == Status.VIOLATED and m.reason == "Unbounded"
    at_one = beta_classes(exp11, moebius(0.5), CFG, [0.0])[0]
    assert at_one.beta_class == "beta<1" and at_one.tail == pytest.approx(1 / 3, abs=1e-3)


def test_class_w_required(logproxy):
    with pytest.raises(NotClassW):
        compactness(logproxy, identity())


def test_gamma_examples(exp11):
    assert gamma_difference(exp11, None, identity(), identity(), 0.7 + 0.2j).value == 0
    for r in (0.9, 0.99, 0.999):
        g = gamma_difference(exp11, None, identity(), perturb(0.05, 3), r)
        psi = r + 0.05 * (1 - r) ** 3
        expect = (1 - np.exp(-0.05 * (1 - r) ** 3 / min(exp11.tau(r), exp11.tau(psi)))) * (
            1 + np.exp(exp11.phi(psi) - exp11.phi(r))
        )
        assert g.value == pytest.approx(expect, rel=1e-10)
    vals = [gamma_difference(exp11, None, identity(), perturb(0.05, 3), 1 - 2.0**-k).value for k in (4, 8, 12, 16)]
    assert vals[-1] < 1e-4 and all(b < a for a, b in zip(vals, vals[1:]))
    g2 = gamma_difference(exp11, None, identity(), monomial(2), 0.999)
    assert g2.value == pytest.approx(1.0, abs=0.05)


def test_gamma_exact_mode_agrees(exp11):
    s = gamma_difference(exp11, None, identity(), monomial(2), 0.9, mode="surrogate")
    e = gamma_difference(exp11, None, identity(), monomial(2), 0.9, mode="exact")
    assert e.converged
    assert 0.9 <= s.value <= 1.1 and 0.9 <= e.value <= 1.1


def test_compact_difference_examples(exp11):
    v = compact_difference(exp11, None, identity(), identity())
    assert v.status == Status.SATISFIED and v.reason == "IdenticalMaps"
    m2 = compact_difference(exp11, None, identity(), monomial(2))
    assert m2.status == Status.VIOLATED
    prof0 = m2.profiles[0]
    assert 0.9 <= prof0.tail_median <= 1.1
    pre = compact_difference(exp11, None, identity(), affine(0.5, 0.5))
    assert pre.status == Status.INCONCLUSIVE and pre.reason == "PreconditionNotBounded"


def test_perturb_gamma_vanishes_at_contact_point(exp11):
    (p,) = gamma_profiles(exp11, identity(), perturb(0.05, 3), CFG, [0.0])
    assert p.trend == Trend.TO_ZERO and p.tail_median < 1e-4


def test_f_sets(exp11):
    assert f_set(exp11, scale(0.5)).members.size == 0
    full = f_set(exp11, identity())
    assert full.members.size == CFG.n_angles
    np.testing.assert_allclose(full.statistic, 1.0)
    aff = f_set(exp11, affine(0.5, 0.5))
    np.testing.assert_array_equal(aff.members, [0.0])
    assert aff.statistic[0] == pytest.approx(2**1.5, rel=0.2)
    assert not aff.delight_violations


def test_finite_sum(exp11):
    v = finite_sum_difference(exp11, None, identity(), [identity()])
    assert v.status == Status.SATISFIED
    m2 = finite_sum_difference(exp11, None, identity(), [monomial(2)])
    assert m2.status == Status.VIOLATED
    assert 0.9 <= m2.profiles[0].tail_median <= 1.1
    with pytest.raises(HypothesisViolated):
        finite_sum_difference(exp11, None, identity(), [perturb(0.05, 3)])
    with pytest.raises(HypothesisViolated):
        finite_sum_difference(exp11, None, identity(), [identity(), monomial(2)])


def test_weighted_composition(exp11):
    assert weighted_comp_compactness(exp11, identity(), constant(0)).status == Status.SATISFIED
    one = weighted_comp_compactness(exp11, identity(), constant(1))
    assert one.status == Status.VIOLATED
    u = weighted_comp_compactness(exp11, identity(), polynomial([1, -1]))
    assert u.profiles[0].trend == Trend.TO_ZERO
    assert u.status == Status.VIOLATED and 0.0 not in u.details["angles_nonvanishing"]
    with pytest.raises(ValueError):
        weighted_comp_compactness(exp11, identity(), constant(1), p=0)


def test_path_connectedness(exp11):
    same = path_connectedness(exp11, None, identity(), perturb(0.05, 3), [0.3, 0.3])
    assert same.step_stats[0]["stat"] == 0
    rep = path_connectedness(exp11, None, identity(), scale(0.5), np.linspace(0, 1, 6))
    assert rep.bounded_per_t["0"] == "Satisfied"
    assert rep.bounded_per_t["1"] == "Satisfied"
