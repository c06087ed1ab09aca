import numpy as np
import pytest

from netreal import (
    BlockRealization,
    InputError,
    NodeDims,
    SignalTrajectory,
    build_graph,
    multiply,
    simulate_distributed,
    simulate_imc_loop,
    simulate_lti,
)
from _support import random_dims, random_graph, random_system


def test_trajectory_validation():
    with pytest.raises(InputError):
        SignalTrajectory(np.zeros((4, 3)), (1, 1))
    with pytest.raises(InputError):
        SignalTrajectory([[np.nan, 0.0]], (1, 1))
    with pytest.raises(InputError):
        SignalTrajectory(np.zeros((2, 2)), (1, -1))
    traj = SignalTrajectory.zeros((2, 0, 1), 5, "u")
    assert traj.length == 5 and traj.width == 3
    assert traj.node_slice(0) == slice(0, 2)
    assert traj.node_slice(1) == slice(2, 2)
    with pytest.raises(InputError):
        traj.node_slice(3)
    with pytest.raises(ValueError):
        traj.values[0, 0] = 1.0


def test_simulate_scalar_recursion_exact():
    real = BlockRealization(
        NodeDims((1,), (1,), (1,)), A=[[0.5]], B=[[2.0]], C=[[3.0]], D=[[0.25]])
    u = np.array([[1.0], [0.0], [-1.0], [0.5]])
    y, x = simulate_lti(real, u)
    xs, ys = 0.0, []
    for t in range(4):
        ys.append(3.0 * xs + 0.25 * u[t, 0])
        xs = 0.5 * xs + 2.0 * u[t, 0]
    assert np.array_equal(y.values[:, 0], ys)
    assert x.values[0, 0] == 0.0
    assert x.values[1, 0] == 2.0


def test_simulate_initial_state_and_errors(river):
    real, _ = river
    u = np.zeros((3, 3))
    y, x = simulate_lti(real, u, x0=[1.0, 0.0, 0.0])
    assert y.values[0, 0] == 1.0
    assert y.values[1, 0] == 0.9
    with pytest.raises(InputError):
        simulate_lti(real, u, x0=[1.0])
    with pytest.raises(InputError):
        simulate_lti(real, np.zeros((3, 2)))
    with pytest.raises(InputError):
        simulate_lti(real, SignalTrajectory(np.zeros((3, 2)), (1, 1)))


def test_distributed_requires_strict_compatibility(river):
    real, graph = river
    with pytest.raises(InputError):
        simulate_distributed(real, graph, np.zeros((2, 3)))


def test_distributed_matches_centralized_bitwise(river_wide, rng):
    real, graph = river_wide
    u = SignalTrajectory(rng.normal(size=(40, 3)), (1, 1, 1), "u")
    x0 = rng.normal(size=5)
    y_c, x_c = simulate_lti(real, u, x0)
    y_d, x_d, messages = simulate_distributed(real, graph, u, x0)
    assert np.array_equal(y_c.values, y_d.values)
    assert np.array_equal(x_c.values, x_d.values)
    assert messages == 40 * graph.num_non_self_edges


def test_distributed_matches_centralized_on_random_systems(rng):
    for _ in range(12):
        graph = random_graph(rng, int(rng.integers(2, 5)))
        dims = random_dims(rng, graph.num_nodes)
        real = random_system(rng, graph, dims, rho=0.8)
        u = SignalTrajectory(
            rng.normal(size=(25, dims.m_total)), dims.inputs, "u")
        y_c, x_c = simulate_lti(real, u)
        y_d, x_d, _ = simulate_distributed(real, graph, u)
        assert np.array_equal(y_c.values, y_d.values)
        assert np.array_equal(x_c.values, x_d.values)


def test_distributed_access_log_respects_edges(river_wide, rng):
    real, graph = river_wide
    u = SignalTrajectory(rng.normal(size=(7, 3)), (1, 1, 1), "u")
    log = []
    simulate_distributed(real, graph, u, access_log=log)
    assert log
    for t, reader, source in log:
        assert 0 <= t < 7
        assert graph.has_edge(reader, source)
    per_step = sum(
        1 for i in range(3) for j in range(3) if graph.has_edge(i, j))
    assert len(log) == 7 * per_step


def test_imc_loop_exact_model_error_is_zero(river, river_q, rng):
    plant, _ = river
    r = SignalTrajectory(rng.normal(size=(60, 3)), (1, 1, 1), "r")
    u, y, err = simulate_imc_loop(plant, plant, river_q, r)
    assert np.all(err.values == 0.0)
    y_ref, _ = simulate_lti(multiply(plant, river_q), r)
    assert np.max(np.abs(y.values - y_ref.values)) < 1e-10
    u_ref, _ = simulate_lti(river_q, r)
    assert np.max(np.abs(u.values - u_ref.values)) < 1e-10


def test_imc_loop_mismatch_shows_up_in_error(river, river_q):
    plant, _ = river
    drifted = BlockRealization(
        plant.dims, plant.A * 0.95, plant.B, plant.C, plant.D)
    r = SignalTrajectory(np.ones((30, 3)), (1, 1, 1), "r")
    _, _, err = simulate_imc_loop(plant, drifted, river_q, r)
    assert np.max(np.abs(err.values)) > 1e-3


def test_imc_loop_disturbance_feeds_error(river, river_q):
    plant, _ = river
    steps = 20
    r = SignalTrajectory.zeros((1, 1, 1), steps, "r")
    d = SignalTrajectory(np.ones((steps, 3)) * 0.5, (1, 1, 1), "d")
    u, y, err = simulate_imc_loop(plant, plant, river_q, r, d)
    assert err.values[0, 0] == -0.5
    assert np.any(u.values != 0.0)


def test_imc_loop_validates_inputs(river, river_q):
    plant, _ = river
    r = SignalTrajectory.zeros((1, 1, 1), 5, "r")
    direct = BlockRealization(
        plant.dims, plant.A, plant.B, plant.C, np.eye(3))
    with pytest.raises(InputError):
        simulate_imc_loop(direct, plant, river_q, r)
    with pytest.raises(InputError):
        simulate_imc_loop(plant, plant, river_q, np.zeros((5, 2)))
    short = SignalTrajectory.zeros((1, 1, 1), 3, "d")
    with pytest.raises(InputError):
        simulate_imc_loop(plant, plant, river_q, r, short)
