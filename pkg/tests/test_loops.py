import numpy as np
import pytest

from netreal import (
    BlockRealization,
    InputError,
    NodeDims,
    check_compatibility,
    close_loop,
    eval_transfer,
    imc_controller,
    q_param,
    scaled_deviation,
    verify_identities,
)
from _support import random_loop_pair

SAMPLE_Z = (2.1, -2.6, 1.3 + 1.8j)


def _loop_oracle(plant, controller, z):
    """Channel blocks of the closed loop from dense algebra."""
    p_z = eval_transfer(plant, z)
    c_z = eval_transfer(controller, z)
    eye_p = np.eye(plant.p)
    eye_m = np.eye(plant.m)
    s = np.linalg.inv(eye_p + p_z @ c_z)
    t = np.linalg.inv(eye_m + c_z @ p_z)
    return {
        (1, 1): s,
        (1, 2): p_z @ t,
        (2, 1): -c_z @ s,
        (2, 2): t,
    }


def test_close_loop_blocks_match_dense_oracle(rng):
    checked = 0
    while checked < 8:
        plant, controller, graph = random_loop_pair(rng)
        if plant.p == 0 or plant.m == 0:
            continue
        loop = close_loop(plant, controller)
        assert check_compatibility(loop.realization, graph, zero_tol=0.0).ok
        for z in SAMPLE_Z:
            expected = _loop_oracle(plant, controller, z)
            for key, want in expected.items():
                got = eval_transfer(loop.block(*key), z)
                assert scaled_deviation(got, want) < 1e-9, key
        checked += 1


def test_close_loop_channel_layout(river_wide, river_q):
    plant, graph = river_wide
    controller = imc_controller(plant, river_q)
    loop = close_loop(plant, controller)
    # per node: p_k outputs first, then m_k inputs
    assert loop.realization.dims.inputs == (2, 2, 2)
    assert loop.realization.dims.outputs == (2, 2, 2)
    assert loop.p_dims == (1, 1, 1)
    assert loop.m_dims == (1, 1, 1)
    assert loop.realization.dims.states == tuple(
        a + b for a, b in zip(plant.dims.states, controller.dims.states))


def test_close_loop_requires_strictly_proper_plant(river_q):
    dims = NodeDims((1, 1, 1), (1, 1, 1), (1, 1, 1))
    direct = BlockRealization(dims, A=np.eye(3) * 0.5, D=np.eye(3))
    with pytest.raises(InputError):
        close_loop(direct, river_q)


def test_close_loop_rejects_mismatched_shapes(river):
    plant, _ = river
    bad = BlockRealization(
        NodeDims((1, 1), (1, 1), (1, 1)), A=np.eye(2) * 0.5)
    with pytest.raises(InputError):
        close_loop(plant, bad)


def test_block_extraction_validates_indices(river_wide, river_q):
    plant, _ = river_wide
    loop = close_loop(plant, imc_controller(plant, river_q))
    with pytest.raises(InputError):
        loop.block(0, 1)
    with pytest.raises(InputError):
        loop.block(1, 3)


def test_loop_stability_flag(river_wide, river_q):
    plant, _ = river_wide
    loop = close_loop(plant, imc_controller(plant, river_q))
    assert loop.stable
    assert loop.spectral_radius < 1.0


def test_q_param_matches_dense_formula(rng):
    checked = 0
    while checked < 8:
        plant, controller, _ = random_loop_pair(rng)
        if plant.p == 0 or plant.m == 0:
            continue
        q = q_param(plant, controller)
        for z in SAMPLE_Z:
            p_z = eval_transfer(plant, z)
            c_z = eval_transfer(controller, z)
            want = c_z @ np.linalg.inv(np.eye(plant.p) + p_z @ c_z)
            assert scaled_deviation(eval_transfer(q, z), want) < 1e-9
        checked += 1


def test_verify_identities_on_certified_loop(river_wide, river_q):
    plant, _ = river_wide
    controller = imc_controller(plant, river_q)
    report = verify_identities(plant, controller)
    assert report.passed
    assert set(report.deviations) == {"inverse-complement", "triangular-inverse"}
    assert max(report.deviations.values()) < 1e-12
    assert report.num_points == 16


def test_verify_identities_random_pairs(rng):
    for _ in range(5):
        plant, controller, _ = random_loop_pair(rng)
        report = verify_identities(plant, controller, num_points=8)
        assert report.passed


def test_verify_identities_validates_points(river_wide, river_q):
    plant, _ = river_wide
    with pytest.raises(InputError):
        verify_identities(plant, imc_controller(plant, river_q), num_points=0)
