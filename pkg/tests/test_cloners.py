import math

import numpy as np
import pytest

from broadcastkit.core.channels import clone_fidelity, clone_marginal
from broadcastkit.core.densops import (
    IDENTITY_2,
    QubitParams,
    bloch_vector,
    is_unitary,
    projector,
    pure_state,
    qubit_from_params,
    random_qubit_params,
)
from broadcastkit.core.fidelity import shrinking_factor, uhlmann_fidelity
from broadcastkit.modules.cloners import (
    bloch_length,
    commutes,
    dicke_state,
    fidelity_lambda_z,
    gisin_massar_channel,
    known_basis_broadcaster,
    nm_optimal_fidelity,
    nm_scaling_params,
    omega_dqcm,
    optimal_mixed_fidelity,
    optimal_z,
    scaling_channel_output,
)


def dqcm_clone_state(omega: float) -> np.ndarray:
    phi = np.array([np.exp(1j * (math.pi / 2 - omega)), 1.0]) / math.sqrt(2)
    return projector(phi)


def test_omega_dqcm_is_unitary():
    for omega in (0.0, 1.1, 4.0):
        channel = omega_dqcm(omega)
        assert is_unitary(channel.unitary)
        assert channel.subsystem_dims == [2, 2, 2]


def test_omega_dqcm_clones_are_the_fixed_pure_state(rng):
    omega = 1.1
    channel = omega_dqcm(omega)
    expected = dqcm_clone_state(omega)
    for _ in range(20):
        rho = qubit_from_params(random_qubit_params(rng))
        for copy_index in range(2):
            np.testing.assert_allclose(clone_marginal(channel, rho, copy_index), expected, atol=1e-12)


def test_omega_dqcm_fidelity_is_one_half_for_matching_phase(rng):
    omega = 2.3
    channel = omega_dqcm(omega)
    values = []
    for _ in range(1000):
        params = QubitParams(rng.uniform(0, math.pi / 2), omega, rng.uniform(0, 1))
        for copy_index in range(2):
            values.append(clone_fidelity(channel, params, copy_index))
    assert max(abs(value - 0.5) for value in values) < 1e-10
    assert np.std(values) < 1e-10


def test_omega_dqcm_bloch_vector_at_zero_phase():
    marginal = clone_marginal(omega_dqcm(0.0), IDENTITY_2 / 2)
    np.testing.assert_allclose(bloch_vector(marginal).as_array(), [0.0, -1.0, 0.0], atol=1e-12)


def test_omega_dqcm_depends_on_a_priori_phase(rng):
    channel = omega_dqcm(0.0)
    values = [
        clone_fidelity(channel, QubitParams(rng.uniform(0, math.pi / 2), math.pi / 2, rng.uniform(0, 1)))
        for _ in range(200)
    ]
    assert np.std(values) > 1e-3
    params = QubitParams(0.3, 1.7, 0.8)
    expected = 0.5 + (2 * params.lam - 1) * math.sin(2 * params.theta) * math.sin(0.0 - params.omega) / 2
    assert clone_fidelity(channel, params) == pytest.approx(expected, abs=1e-10)


def test_scaling_channel_output(rng):
    params = random_qubit_params(rng)
    rho = qubit_from_params(params)
    np.testing.assert_allclose(scaling_channel_output(params, 1.0), rho, atol=1e-15)
    np.testing.assert_allclose(scaling_channel_output(params, 0.5), IDENTITY_2 / 2, atol=1e-15)
    for z in (0.2, 0.7, 0.95):
        out = scaling_channel_output(params, z)
        assert bloch_length(out) == pytest.approx(abs(2 * params.lam - 1) * abs(2 * z - 1), abs=1e-12)
    with pytest.raises(ValueError):
        scaling_channel_output(params, 1.2)


def test_fidelity_lambda_z_values():
    assert fidelity_lambda_z(0.0, 0.7) == pytest.approx(0.7, abs=1e-12)
    for z in (0.0, 0.4, 5 / 6, 1.0):
        assert fidelity_lambda_z(0.5, z) == pytest.approx(1.0, abs=1e-12)
    assert fidelity_lambda_z(0.25, 5 / 6) == pytest.approx(0.991582, abs=1e-6)
    with pytest.raises(ValueError):
        fidelity_lambda_z(1.1, 0.5)


def test_fidelity_lambda_z_matches_scaled_state(rng):
    for _ in range(200):
        params = random_qubit_params(rng)
        z = rng.uniform(0, 1)
        exact = uhlmann_fidelity(scaling_channel_output(params, z), qubit_from_params(params))
        assert fidelity_lambda_z(params.lam, z) == pytest.approx(exact, abs=1e-10)


def test_optimal_mixed_fidelity_values():
    assert optimal_z(2) == pytest.approx(5 / 6)
    assert optimal_mixed_fidelity(2, 0.0) == pytest.approx(5 / 6, abs=1e-12)
    assert optimal_mixed_fidelity(2, 0.25) == pytest.approx(0.991582, abs=1e-6)
    for copies in (2, 3, 10):
        assert optimal_mixed_fidelity(copies, 0.5) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        optimal_mixed_fidelity(1, 0.3)


@pytest.mark.parametrize("copies", [2, 3, 5])
def test_optimal_mixed_fidelity_symmetry_and_monotonicity(copies):
    grid = np.linspace(0.0, 1.0, 101)
    values = [optimal_mixed_fidelity(copies, lam) for lam in grid]
    mirrored = [optimal_mixed_fidelity(copies, 1.0 - lam) for lam in grid]
    np.testing.assert_allclose(values, mirrored, atol=1e-12)
    first_half = values[:51]
    assert all(b >= a - 1e-12 for a, b in zip(first_half, first_half[1:]))


def test_fidelity_lambda_z_increases_with_z():
    zs = np.linspace(0.5, 1.0, 51)
    for lam in (0.0, 0.1, 0.3, 0.45):
        values = [fidelity_lambda_z(lam, z) for z in zs]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


def test_nm_scaling_params():
    params = nm_scaling_params(1, 2)
    assert params.z == pytest.approx(5 / 6)
    assert params.f == pytest.approx(2 / 3)
    assert tuple(nm_scaling_params(3, 3)) == pytest.approx((1.0, 1.0))
    assert nm_scaling_params(1, 10 ** 6).z == pytest.approx(2 / 3, abs=1e-6)
    for n_inputs, copies in [(1, 3), (2, 5), (4, 9)]:
        z, f = nm_scaling_params(n_inputs, copies)
        assert z == pytest.approx((1 + f) / 2, abs=1e-12)
    with pytest.raises(ValueError):
        nm_scaling_params(3, 2)
    with pytest.raises(ValueError):
        nm_scaling_params(0, 2)


def test_nm_optimal_fidelity_reduces_to_one_input():
    for lam in (0.0, 0.2, 0.5, 0.9):
        assert nm_optimal_fidelity(1, 4, lam) == pytest.approx(optimal_mixed_fidelity(4, lam), abs=1e-12)
    assert nm_optimal_fidelity(2, 4, 0.5) == pytest.approx(1.0, abs=1e-12)
    assert nm_optimal_fidelity(2, 4, 0.0) < 1.0


def test_dicke_state_is_normalised():
    for ones in range(4):
        vec = dicke_state(3, ones)
        assert np.vdot(vec, vec).real == pytest.approx(1.0)
    with pytest.raises(ValueError):
        dicke_state(3, 4)


def test_gisin_massar_two_copies():
    channel = gisin_massar_channel(2)
    assert is_unitary(channel.unitary)
    assert clone_fidelity(channel, QubitParams(0.3, 1.1, 1.0)) == pytest.approx(5 / 6, abs=1e-9)
    mixed = QubitParams(0.3, 1.1, 0.7)
    for copy_index in range(2):
        assert clone_fidelity(channel, mixed, copy_index) == pytest.approx(
            optimal_mixed_fidelity(2, 0.7), abs=1e-9
        )


def test_gisin_massar_three_copies_bloch_length():
    channel = gisin_massar_channel(3)
    marginal = clone_marginal(channel, projector(pure_state(0.8, 2.5)), 2)
    assert bloch_length(marginal) == pytest.approx(5 / 9, abs=1e-9)


@pytest.mark.parametrize("copies", [2, 3, 4])
def test_gisin_massar_matches_closed_form(rng, copies):
    channel = gisin_massar_channel(copies)
    z = optimal_z(copies)
    for _ in range(100):
        params = random_qubit_params(rng)
        rho = qubit_from_params(params)
        copy_index = int(rng.integers(copies))
        marginal = clone_marginal(channel, rho, copy_index)
        assert uhlmann_fidelity(marginal, rho) == pytest.approx(fidelity_lambda_z(params.lam, z), abs=1e-9)
        length = abs(2 * params.lam - 1) * (2 * z - 1)
        assert bloch_length(marginal) == pytest.approx(length, abs=1e-9)
        assert bloch_length(marginal) <= abs(2 * params.lam - 1) + 1e-9


def test_gisin_massar_copy_range():
    with pytest.raises(ValueError):
        gisin_massar_channel(1)
    with pytest.raises(ValueError):
        gisin_massar_channel(7)


def test_known_basis_broadcaster_copies_diagonal_states():
    channel = known_basis_broadcaster(0.0, 0.0, 2)
    np.testing.assert_allclose(channel.unitary[:, 0], [1, 0, 0, 0], atol=1e-15)
    np.testing.assert_allclose(channel.unitary[:, 2], [0, 0, 0, 1], atol=1e-15)
    rho = np.diag([0.3, 0.7]).astype(complex)
    for copy_index in range(2):
        np.testing.assert_allclose(clone_marginal(channel, rho, copy_index), rho, atol=1e-14)


@pytest.mark.parametrize("copies", [2, 3])
def test_known_basis_broadcaster_is_perfect_on_its_family(copies):
    channel = known_basis_broadcaster(math.pi / 4, 0.0, copies)
    for lam in (0.0, 0.3, 1.0):
        for copy_index in range(copies):
            fidelity = clone_fidelity(channel, QubitParams(math.pi / 4, 0.0, lam), copy_index)
            assert fidelity == pytest.approx(1.0, abs=1e-10)


def test_known_basis_broadcaster_mismatched_input():
    channel = known_basis_broadcaster(0.0, 0.0, 2)
    assert clone_fidelity(channel, QubitParams(math.pi / 4, 0.0, 1.0)) < 1.0 - 1e-3


def test_known_basis_marginals_do_not_depend_on_completion(rng):
    forward = known_basis_broadcaster(0.5, 1.3, 3)
    backward = known_basis_broadcaster(0.5, 1.3, 3, reverse=True)
    assert not np.allclose(forward.unitary, backward.unitary)
    rho = qubit_from_params(random_qubit_params(rng))
    for copy_index in range(3):
        np.testing.assert_allclose(
            clone_marginal(forward, rho, copy_index), clone_marginal(backward, rho, copy_index), atol=1e-12
        )


def test_commutes(rng):
    assert commutes(np.diag([0.2, 0.8]), np.diag([0.6, 0.4]))
    zero = projector(pure_state(0.0, 0.0))
    plus = projector(pure_state(math.pi / 4, 0.0))
    assert not commutes(zero, plus)
    for _ in range(10):
        theta, omega = rng.uniform(0, math.pi / 2), rng.uniform(0, 2 * math.pi)
        first = qubit_from_params(QubitParams(theta, omega, rng.uniform(0, 1)))
        second = qubit_from_params(QubitParams(theta, omega, rng.uniform(0, 1)))
        assert commutes(first, second)


def test_omega_dqcm_marginals_do_not_depend_on_completion(rng):
    forward = omega_dqcm(0.7)
    backward = omega_dqcm(0.7, reverse=True)
    assert is_unitary(backward.unitary)
    assert not np.allclose(forward.unitary, backward.unitary)
    for _ in range(5):
        rho = qubit_from_params(random_qubit_params(rng))
        for copy_index in range(2):
            np.testing.assert_allclose(
                clone_marginal(forward, rho, copy_index), clone_marginal(backward, rho, copy_index), atol=1e-12
            )


def test_gisin_massar_shrinking_factor():
    rho = projector(pure_state(0.9, 2.2))
    channel = gisin_massar_channel(2)
    for copy_index in range(2):
        factor = shrinking_factor(rho, clone_marginal(channel, rho, copy_index))
        assert factor == pytest.approx(2 / 3, abs=1e-9)
    assert factor == pytest.approx(nm_scaling_params(1, 2).f, abs=1e-9)


def test_known_basis_broadcaster_copy_range():
    with pytest.raises(ValueError, match="M must lie in 2..8"):
        known_basis_broadcaster(0.1, 0.2, 9)
    with pytest.raises(ValueError):
        known_basis_broadcaster(0.1, 0.2, 1)
    assert known_basis_broadcaster(0.1, 0.2, 8).dim == 256
