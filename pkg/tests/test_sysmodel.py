import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from topodiag.netgraph import INF, ModelError, NetworkModel, bfs_distances
from topodiag.sysmodel import (
    FIXED_FROM_PATTERN,
    SAMPLED_FREE,
    ZERO,
    SubsystemDynamics,
    assemble_lumped,
    delta_phi,
    output_matrix,
    realization_from_matrix,
    sample_weights,
    scenario_realizations,
    unit_weights,
)

from randinst import random_dynamics, random_model


def kron_oracle(A, H, W):
    """Block-by-block assembly, no np.kron."""
    N, n = W.shape[0], A.shape[0]
    Phi = np.zeros((N * n, N * n))
    for i in range(N):
        for j in range(N):
            block = W[i, j] * H
            if i == j:
                block = block + A
            Phi[i * n:(i + 1) * n, j * n:(j + 1) * n] = block
    return Phi


def scalar_dyn():
    return SubsystemDynamics([[0.0]], [[1.0]], [[1.0]], [[1.0]])


def test_h_is_product():
    B = np.array([[1.0, 0.0], [2.0, 1.0]])
    G = np.array([[0.0, 3.0], [1.0, 0.0]])
    dyn = SubsystemDynamics(np.eye(2), B, G, np.ones((1, 2)))
    np.testing.assert_array_equal(dyn.H, B @ G)
    assert (dyn.n, dyn.m, dyn.p) == (2, 2, 1)
    with pytest.raises(ValueError):
        dyn.H[0, 0] = 5.0


@pytest.mark.parametrize("args", [
    (np.eye(2), np.ones((3, 1)), np.ones((1, 2)), np.ones((1, 2))),
    (np.eye(2), np.ones((2, 1)), np.ones((2, 2)), np.ones((1, 2))),
    (np.eye(2), np.ones((2, 1)), np.ones((1, 2)), np.ones((1, 3))),
    (np.ones((2, 3)), np.ones((2, 1)), np.ones((1, 2)), np.ones((1, 2))),
])
def test_dimension_checks(args):
    with pytest.raises(ModelError):
        SubsystemDynamics(*args)


def test_assemble_scalar_example():
    W = realization_from_matrix(NetworkModel(2, ((1, 2),)), [[0, 0], [1, 0]])
    lumped = assemble_lumped(scalar_dyn(), W, {2})
    np.testing.assert_array_equal(lumped.Phi, [[0, 0], [1, 0]])
    np.testing.assert_array_equal(lumped.Q, [[0, 1]])
    assert lumped.dims == (2, 1, 1, 1, 1)


def test_assemble_single_subsystem():
    dyn = SubsystemDynamics([[1.0, 2.0], [0.0, -1.0]], [[1.0], [0.5]], [[2.0, 1.0]], [[1.0, 1.0]])
    W = realization_from_matrix(NetworkModel(1, ((1, 1),)), [[0.7]])
    lumped = assemble_lumped(dyn, W, {1})
    np.testing.assert_allclose(lumped.Phi, dyn.A + 0.7 * dyn.H, rtol=0, atol=0)
    np.testing.assert_array_equal(lumped.Q, dyn.C)


def test_assemble_example2(ex2):
    dyn, model = ex2.dynamics, ex2.model
    W = unit_weights(model)
    lumped = assemble_lumped(dyn, W, {1})
    assert lumped.Phi.shape == (15, 15)
    np.testing.assert_array_equal(lumped.Phi, kron_oracle(dyn.A, dyn.H, W.W))
    blocks = [(i, j) for i in range(5) for j in range(5)
              if i != j and np.any(lumped.Phi[3 * i:3 * i + 3, 3 * j:3 * j + 3])]
    assert len(blocks) == 6
    for i, j in blocks:
        np.testing.assert_array_equal(lumped.Phi[3 * i:3 * i + 3, 3 * j:3 * j + 3], dyn.H)
        assert (j + 1, i + 1) in model.edge_set
    expected_q = np.zeros((1, 15))
    expected_q[0, :3] = dyn.C
    np.testing.assert_array_equal(lumped.Q, expected_q)


def test_output_matrix_orders_sensors():
    dyn = SubsystemDynamics([[0.0]], [[1.0]], [[1.0]], [[2.0]])
    np.testing.assert_array_equal(output_matrix(dyn, 3, {3, 1}), [[2, 0, 0], [0, 0, 2]])
    with pytest.raises(ModelError):
        output_matrix(dyn, 3, set())
    with pytest.raises(ModelError):
        output_matrix(dyn, 3, {4})


def test_delta_phi_examples(ex2):
    dyn, model = ex2.dynamics, ex2.model
    W = sample_weights(model, 3)
    assert not np.any(delta_phi(W, W, dyn))
    D = delta_phi(W, W.without({(2, 5)}), dyn)
    nz = [(i, j) for i in range(5) for j in range(5) if np.any(D[3 * i:3 * i + 3, 3 * j:3 * j + 3])]
    assert nz == [(4, 1)]
    np.testing.assert_array_equal(D[12:15, 3:6], W.W[4, 1] * dyn.H)
    m = NetworkModel(2, ((1, 2),))
    a = realization_from_matrix(m, [[0, 0], [1, 0]])
    b = realization_from_matrix(m, [[0, 0], [0, 0]])
    np.testing.assert_array_equal(delta_phi(a, b, scalar_dyn()), [[0, 0], [1, 0]])


def test_sample_weights_contract():
    fixed = NetworkModel(3, ((1, 2), (2, 3)), {(1, 2): 1.0, (2, 3): 1.0})
    W = sample_weights(fixed, 9)
    np.testing.assert_array_equal(W.W, [[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    assert np.all(W.provenance[W.W != 0] == FIXED_FROM_PATTERN)
    one = NetworkModel(2, ((1, 2),))
    for seed in range(20):
        w = sample_weights(one, seed).W[1, 0]
        assert 0.1 <= abs(w) <= 2.0
        assert sample_weights(one, seed).W[1, 0] == w


def test_sample_weights_example1_pattern(ex1):
    W = sample_weights(ex1.model, 42)
    positions = {(int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(W.W))}
    assert positions == {(1, 4), (2, 1), (2, 3), (3, 4), (4, 1)}
    assert np.all(W.provenance[W.W != 0] == SAMPLED_FREE)


def test_realization_rejects_entries_outside_pattern():
    with pytest.raises(ModelError):
        realization_from_matrix(NetworkModel(2, ((1, 2),)), [[0, 1], [0, 0]])


def test_without_zeroes_failed_edges(ex2):
    W = sample_weights(ex2.model, 0)
    Wf = W.without({(4, 5), (3, 4)})
    assert Wf.W[4, 3] == 0 and Wf.W[3, 2] == 0
    assert Wf.provenance[4, 3] == ZERO
    assert np.count_nonzero(Wf.W) == 4
    reals = scenario_realizations(ex2.model, W, [{(1, 2)}, {(2, 3)}])
    assert len(reals) == 3 and reals[0] is W


def test_scaled_free_leaves_fixed_alone():
    m = NetworkModel(2, ((1, 2), (2, 1)), {(1, 2): 5.0})
    W = sample_weights(m, 1)
    S = W.scaled_free(2.0)
    assert S.W[1, 0] == 5.0
    assert S.W[0, 1] == 2.0 * W.W[0, 1]


@given(st.integers(0, 2**32 - 1))
def test_block_identity_and_difference(seed):
    rng = np.random.default_rng(seed)
    dyn = random_dynamics(rng)
    model = random_model(rng)
    Wi = sample_weights(model, seed)
    k = int(rng.integers(len(model.edges)))
    Wj = Wi.without({model.edges[k]})
    li = assemble_lumped(dyn, Wi, model.sensors)
    lj = assemble_lumped(dyn, Wj, model.sensors)
    np.testing.assert_array_equal(li.Phi, kron_oracle(dyn.A, dyn.H, Wi.W))
    np.testing.assert_array_equal(li.Phi - lj.Phi, delta_phi(Wi, Wj, dyn))
    np.testing.assert_array_equal(delta_phi(Wi, Wj, dyn), -delta_phi(Wj, Wi, dyn))
    # re-assembly is bitwise reproducible
    np.testing.assert_array_equal(assemble_lumped(dyn, Wi, model.sensors).Phi, li.Phi)


@given(st.integers(0, 2**32 - 1))
def test_sampled_weights_avoid_zero_band(seed):
    model = random_model(np.random.default_rng(seed))
    W = sample_weights(model, seed).W
    nz = W[W != 0]
    assert nz.size == len(model.edges)
    assert np.all((np.abs(nz) >= 0.1) & (np.abs(nz) <= 2.0))


@given(st.integers(0, 2**32 - 1))
def test_powers_vanish_below_distance(seed):
    """[W^k]_{ij} = 0 whenever k < dist(j, i)."""
    rng = np.random.default_rng(seed)
    model = random_model(rng, self_loops=True)
    W = sample_weights(model, seed).W
    N = model.node_count
    P = np.eye(N)
    dist = {j: bfs_distances(model, j) for j in model.nodes}
    for k in range(N + 1):
        for i in model.nodes:
            for j in model.nodes:
                if k < dist[j].get(i, INF):
                    assert P[i - 1, j - 1] == 0.0
        P = P @ W
