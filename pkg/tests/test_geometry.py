from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from diskgeo.errors import HypothesisViolated, MeshTooLarge, NotClassW
from diskgeo.geometry import (
    ball_tau,
    build_mesh,
    build_patch,
    check_inclusions,
    dist_phi,
    dist_tau,
    global_node_count,
    local_distance,
    metric_axiom_suite,
    random_disk_points,
    rho_of,
    rho_tau,
    scalar_subadditivity,
    segment_length,
    segment_lengths,
    surrogate_f,
)
from diskgeo.weight import build_weight

small = st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False)


def test_logproxy_level0_rings(logproxy):
    mesh = build_mesh(logproxy, 0, r_out=0.99)
    np.testing.assert_allclose(mesh.ring_radii[:5], [0, 0.5, 0.75, 0.875, 0.9375], atol=1e-9)
    assert mesh.ring_counts[0] == 1 and mesh.ring_counts[1] >= 8


@pytest.mark.parametrize("spec", ["exp:a=1,b=1", "exp:a=2,b=0.5"])
@pytest.mark.parametrize("r_out", [0.95, 0.99, 0.999])
def test_node_count_ratio(spec, r_out):
    m = build_weight(spec)
    n = [global_node_count(m, L, r_out) for L in range(5)]
    ratios = np.array(n[1:]) / np.array(n[:-1])
    assert np.all((ratios >= 3.5) & (ratios <= 4.5))


@pytest.mark.parametrize("level", [0, 1, 2])
def test_edges_within_two_rings_and_symmetric(exp11, level):
    """Native edges span at most two rings. Edges carried from a coarser level
    span at most two coarse rings; the outer ring at ``r_out`` can add one
    more coarse gap, so the bound is ``3 * 2**level`` fine rings."""
    mesh = build_mesh(exp11, level)
    ri = np.searchsorted(mesh.offsets, np.arange(mesh.n_nodes), side="right") - 1
    e = mesh.edges
    assert np.all(np.abs(ri[e[:, 0]] - ri[e[:, 1]]) <= 3 * 2**level)
    if level == 0:
        assert np.all(np.abs(ri[e[:, 0]] - ri[e[:, 1]]) <= 2)
    p, q = mesh.nodes[e[:500, 0]], mesh.nodes[e[:500, 1]]
    np.testing.assert_allclose(segment_lengths(exp11, q, p, "tau"), mesh.len_tau[:500], rtol=1e-12)


def test_ring_spacing_bounded_by_tau(exp11):
    mesh = build_mesh(exp11, 3)
    r = mesh.ring_radii
    gap = np.diff(r)[1:]
    mid = 0.5 * (r[1:-1] + r[2:])
    assert np.all(gap <= exp11.m_tau / 2 * exp11.tau(mid) * 1.05)


def test_mesh_too_large(exp11):
    with pytest.raises(MeshTooLarge):
        build_mesh(exp11, 4, node_cap=10_000)


def test_distance_zero_and_symmetric(exp11):
    assert dist_tau(exp11, 0.3 + 0.2j, 0.3 + 0.2j).value == 0
    a = dist_tau(exp11, 0.1, 0.6j, max_level=2).value
    b = dist_tau(exp11, 0.6j, 0.1, max_level=2).value
    assert a == pytest.approx(b, rel=1e-9)


def test_radial_oracles(exp11, logproxy):
    assert dist_tau(logproxy, 0, 0.9).value == pytest.approx(np.log(10), rel=0.02)
    assert dist_phi(exp11, 0, 0.9).value == pytest.approx(9.0, rel=0.02)
    ref = quad(lambda t: 1 / exp11.tau(t), 0, 0.5, limit=200)[0]
    assert dist_tau(exp11, 0, 0.5).value == pytest.approx(ref, rel=0.02)


def test_distance_nonincreasing_in_level(exp11):
    mesh_vals = [dist_tau(build_mesh(exp11, L), 0.2, -0.7j, max_level=L, start_level=L).value for L in range(3)]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(mesh_vals, mesh_vals[1:]))


def test_rho_examples(logproxy):
    assert rho_tau(logproxy, 0.4, 0.4).rho == 0
    r9 = rho_tau(logproxy, 0, 0.9)
    assert r9.rho == pytest.approx(0.9, abs=0.01)
    assert rho_tau(logproxy, 0, 0.5).rho < r9.rho


def test_surrogate(logproxy):
    assert surrogate_f(logproxy, 0.3, 0.3) == 0
    assert surrogate_f(logproxy, 0, 0.9) == pytest.approx(1 - np.exp(-9), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(small, small)
def test_surrogate_symmetric_in_unit_interval(z, w):
    m = build_weight("exp:a=1,b=1")
    a, b = surrogate_f(m, z, w), surrogate_f(m, w, z)
    assert a == b and 0 <= a <= 1
    if 0.3 <= min(abs(z), abs(w)) and abs(z - w) < min(m.tau_z(z), m.tau_z(w)):
        assert a < 1


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 20), st.floats(0, 20))
def test_scalar_subadditivity_property(x, h):
    assert rho_of(x + h) <= rho_of(x) + rho_of(h) + 1e-15


def test_scalar_subadditivity_grid():
    assert scalar_subadditivity() == 0
    assert rho_of(2.0) == pytest.approx(0.8647, abs=1e-4)
    assert 2 * rho_of(1.0) == pytest.approx(1.2642, abs=1e-4)


def test_segment_length_radial(logproxy):
    assert segment_length(logproxy, 0, 0.9, "tau") == pytest.approx(np.log(10), rel=1e-6)


def test_ball_examples(logproxy):
    mesh = build_mesh(logproxy, 2)
    assert len(ball_tau(mesh, 0, 1e-6)) == 1
    ball = ball_tau(mesh, 0, np.log(2))
    rad = np.abs(ball.points)
    ring = 0.5 * (1 - 2 ** -0.25)
    assert rad.max() <= 0.5 + 1e-9
    inner = mesh.active & (np.abs(mesh.nodes) < 0.5 - ring)
    assert set(np.nonzero(inner)[0]) <= set(ball.nodes.tolist())
    small_b = ball_tau(mesh, 0.3, 0.2)
    big_b = ball_tau(mesh, 0.3, 0.4)
    assert set(small_b.nodes.tolist()) <= set(big_b.nodes.tolist())


def test_inclusions(exp11, logproxy):
    rep = check_inclusions(exp11, None, 0.8, exp11.m_tau / 4)
    assert rep.ok and rep.converged
    assert check_inclusions(exp11, None, 0.0, 1e-3).ok
    with pytest.raises(HypothesisViolated):
        check_inclusions(exp11, None, 0.5, exp11.m_tau / 2)
    with pytest.raises(NotClassW):
        check_inclusions(logproxy, None, 0.5, 0.1)


def test_logproxy_ball_against_radial_oracle(logproxy):
    """Radial extent of the tau-ball about 0.5 matches -log(1 - s) arclength."""
    mesh = build_patch(logproxy, 0.5, 0.05, 3, 6)
    from scipy.sparse.csgraph import dijkstra

    d = dijkstra(mesh.graph("tau"), directed=False, indices=0)
    nodes = mesh.nodes
    on_ray = mesh.active & (np.abs(nodes.imag) < 1e-12) & (nodes.real > 0.5)
    exact = np.log((1 - 0.5) / (1 - nodes.real[on_ray]))
    np.testing.assert_allclose(d[on_ray], exact, rtol=0.02)


def test_local_distance_agrees_with_global(exp11):
    a, b = 0.6 + 0.1j, 0.7 - 0.05j
    loc = local_distance(exp11, a, b, max_level=4)
    glob = dist_tau(exp11, a, b, max_level=3)
    assert loc.value == pytest.approx(glob.value, rel=0.03)
    a = 0.9999
    far = local_distance(exp11, a, a * np.exp(1e-4j))
    assert far.certified_lower and far.value >= 40


def test_metric_axioms_small(exp11):
    mesh = build_mesh(exp11, 1)
    pts = random_disk_points(3 * 60, 5, 0.95).reshape(-1, 3)
    rep = metric_axiom_suite(mesh, pts)
    assert rep.ok
    same = metric_axiom_suite(mesh, np.full((3, 3), 0.2 + 0.1j))
    assert same.ok and same.worst_triangle_excess <= 0
