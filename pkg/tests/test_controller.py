import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from etformation import controller as ctl
from etformation import graph as gr
from etformation.formation import from_distances, from_target_placement

from conftest import connected_graphs


def elementwise_laplacian(spec, pos):
    """Entry-by-entry form: diagonal sums over neighbours, off-diagonal minus the edge weight."""
    g = spec.graph
    n = g.n
    L = np.zeros((n, n))
    for i in range(n):
        for q in g.neighbors(i):
            w = np.sum((pos[q] - pos[i]) ** 2) - spec.distance(i, q) ** 2
            L[i, i] += w
            L[i, q] = -w
    return L


def random_spec(g, rng, dim):
    return from_distances(g, rng.uniform(0.5, 2.0, g.m)), rng.standard_normal((g.n, dim))


@pytest.fixture
def tri_spec(triangle):
    return from_distances(triangle, [1.0, 1.0, 1.0])


def test_weighted_laplacian_zero_at_target(triangle, tri_pos):
    spec = from_target_placement(triangle, tri_pos)
    # sqrt(2)**2 is not exactly 2
    assert np.allclose(ctl.weighted_laplacian(spec, tri_pos), 0, atol=1e-14)


def test_weighted_laplacian_triangle(tri_spec, tri_pos):
    L = ctl.weighted_laplacian(tri_spec, tri_pos)
    expect = np.array([[0, 0, 0], [0, 1, -1], [0, -1, 1.0]])
    assert np.allclose(L, expect, atol=1e-15)
    assert np.allclose(elementwise_laplacian(tri_spec, tri_pos), expect, atol=1e-15)


@settings(max_examples=100, deadline=None)
@given(g=connected_graphs(), dim=st.sampled_from([2, 3]), seed=st.integers(0, 2**32 - 1))
def test_laplacian_dual_forms_agree(g, dim, seed):
    spec, pos = random_spec(g, np.random.default_rng(seed), dim)
    L = ctl.weighted_laplacian(spec, pos)
    assert np.max(np.abs(L - elementwise_laplacian(spec, pos))) < 1e-12
    assert np.allclose(L, L.T)
    assert np.max(np.abs(L.sum(axis=1))) < 1e-12
    # blockwise application equals the Kronecker product
    v = np.random.default_rng(seed + 1).standard_normal((g.n, dim))
    kron = np.kron(L, np.eye(dim)) @ v.reshape(-1)
    assert np.allclose(ctl.apply_weighted_laplacian(spec, pos, v).reshape(-1), kron, atol=1e-12)


def test_control_input_triangle(tri_spec, tri_pos):
    params = ctl.ControllerParams.uniform(tri_spec, 2, alpha=1.0)
    bt = ctl.BroadcastTable.from_positions(tri_pos)
    assert np.allclose(ctl.control_input(tri_spec, params, 0, bt), [0, 0])
    assert np.allclose(ctl.control_input(tri_spec, params, 1, bt), [-1, 1])
    assert np.allclose(ctl.control_input(tri_spec, params, 2, bt), [1, -1])


def test_control_zero_at_target():
    rng = np.random.default_rng(7)
    for g in (gr.complete(5), gr.cycle(6), gr.from_edges(4, [(0, 1), (1, 2), (2, 3)])):
        p = rng.standard_normal((g.n, 2))
        spec = from_target_placement(g, p)
        params = ctl.ControllerParams.uniform(spec, 2, alpha=0.3)
        assert np.max(np.abs(ctl.all_controls(spec, params, p))) < 1e-12


@settings(max_examples=50, deadline=None)
@given(g=connected_graphs(), dim=st.sampled_from([2, 3]), seed=st.integers(0, 2**32 - 1))
def test_stacked_control_matches_per_agent(g, dim, seed):
    rng = np.random.default_rng(seed)
    spec, pos = random_spec(g, rng, dim)
    params = ctl.ControllerParams.uniform(spec, dim, alpha=0.2)
    bt = ctl.BroadcastTable.from_positions(pos)
    per_agent = np.array([ctl.control_input(spec, params, i, bt) for i in range(g.n)])
    stacked = -0.2 * (np.kron(ctl.weighted_laplacian(spec, pos), np.eye(dim))
                      @ pos.reshape(-1)).reshape(g.n, dim)
    assert np.allclose(per_agent, stacked, atol=1e-10)
    assert np.allclose(ctl.all_controls(spec, params, pos), stacked, atol=1e-10)
    # controls of the stacked loop sum to zero
    assert np.allclose(stacked.sum(axis=0), 0, atol=1e-10)


def test_control_dimensions_decouple():
    rng = np.random.default_rng(1)
    g = gr.complete(4)
    spec, pos = random_spec(g, rng, 2)
    params = ctl.ControllerParams.uniform(spec, 2, alpha=1.0)
    u = ctl.all_controls(spec, params, pos)
    L = ctl.weighted_laplacian(spec, pos)
    for d in range(2):
        assert np.allclose(u[:, d], -L @ pos[:, d])


def test_state_dependent_gain():
    g = gr.from_edges(2, [(0, 1)])
    spec = from_distances(g, [1.0])
    pos = np.array([[0.0, 0.0], [2.0, 0.0]])
    params = ctl.ControllerParams.uniform(spec, 2, alpha=1.0, gain_mode="state", v_max=0.2, k_vel=3.0)
    expect = 0.2 * (1 - np.exp(-3.0 * 2.0)) / 2.0
    assert ctl.gains(spec, params, pos) == pytest.approx([expect, expect])
    bt = ctl.BroadcastTable.from_positions(pos)
    assert np.allclose(ctl.control_input(spec, params, 0, bt), ctl.all_controls(spec, params, pos)[0])
    # coincident neighbours: gain tends to v_max * k_vel
    same = np.zeros((2, 2))
    assert ctl.gains(spec, params, same) == pytest.approx([0.6, 0.6])
    assert params.nominal_alpha == pytest.approx(0.6)


def test_lyapunov_values(tri_spec, tri_pos, triangle):
    params = ctl.ControllerParams.uniform(tri_spec, 2, alpha=1.0)
    assert ctl.lyapunov(tri_spec, params, tri_pos) == pytest.approx(0.25)
    spec = from_target_placement(triangle, tri_pos)
    assert ctl.lyapunov(spec, ctl.ControllerParams.uniform(spec, 2, alpha=1.0), tri_pos) < 1e-28


@settings(max_examples=50, deadline=None)
@given(g=connected_graphs(), seed=st.integers(0, 2**32 - 1))
def test_lyapunov_direct_sum_and_invariance(g, seed):
    rng = np.random.default_rng(seed)
    spec, pos = random_spec(g, rng, 2)
    params = ctl.ControllerParams.uniform(spec, 2, alpha=0.05)
    direct = 0.0
    for i in range(g.n):
        for j in g.neighbors(i):
            direct += (np.sum((pos[i] - pos[j]) ** 2) - spec.distance(i, j) ** 2) ** 2
    direct /= 8 * 0.05 * spec.delta_max**6
    V = ctl.lyapunov(spec, params, pos)
    assert V == pytest.approx(direct, rel=1e-12, abs=1e-15)
    assert V >= 0
    th = rng.uniform(0, 2 * np.pi)
    R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    moved = pos @ R.T + rng.standard_normal(2)
    assert ctl.lyapunov(spec, params, moved) == pytest.approx(V, rel=1e-9, abs=1e-12)


def test_centroid():
    assert np.allclose(ctl.centroid(np.array([[0, 0], [2, 0.0]])), [1, 0])
    p = np.random.default_rng(0).standard_normal((5, 3))
    v = np.array([1.0, -2.0, 0.5])
    assert np.allclose(ctl.centroid(p + v), ctl.centroid(p) + v)


def test_normalized_quantities_triangle(tri_spec, tri_pos):
    nq = ctl.normalized_quantities(tri_spec, tri_pos)
    assert np.allclose(nq.D, [0, 0, 1])
    assert np.allclose(nq.abs_D_sum, [0, 1, 1])
    assert np.allclose(nq.D_matrix(tri_spec), [[0, 0, 0], [0, 0, 1], [0, 1, 0]])
    assert np.allclose(nq.dbar, [1, 1, np.sqrt(2)])
    assert np.allclose(nq.xbar, tri_pos)


def test_normalized_zero_at_target(triangle, tri_pos):
    spec = from_target_placement(triangle, tri_pos)
    nq = ctl.normalized_quantities(spec, tri_pos)
    assert np.allclose(nq.z, 0) and np.allclose(nq.D, 0)


def test_D_invariant_under_joint_scaling():
    rng = np.random.default_rng(5)
    g = gr.complete(5)
    spec, pos = random_spec(g, rng, 2)
    scaled = from_distances(g, 3.0 * spec.desired_dist)
    a = ctl.normalized_quantities(spec, pos)
    b = ctl.normalized_quantities(scaled, 3.0 * pos)
    assert np.allclose(a.D, b.D)
    assert np.allclose(a.dbar, b.dbar)
    assert np.allclose(a.z, b.z)


def test_params_validation(tri_spec):
    with pytest.raises(ctl.ParameterRangeError):
        ctl.ControllerParams.uniform(tri_spec, 2, alpha=0.0)
    with pytest.raises(ctl.ParameterRangeError):
        ctl.ControllerParams.uniform(tri_spec, 2, alpha=1.0, A=0.0)
    with pytest.raises(ctl.ParameterRangeError):
        ctl.ControllerParams.uniform(tri_spec, 2, alpha=1.0, b=-1.0)
    with pytest.raises(ctl.ParameterRangeError):
        ctl.ARule("fraction", 1.0)
    p = ctl.ControllerParams.uniform(tri_spec, 2, alpha=1.0, sigma_frac=1.0)
    with pytest.raises(ctl.ParameterRangeError):
        p.check(tri_spec, 2)
    ctl.ControllerParams.uniform(tri_spec, 2, alpha=1.0).check(tri_spec, 2)
