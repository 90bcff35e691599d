"""
Cloning machines and their closed-form fidelity laws.

Every constructor returns an immutable BroadcastChannel whose ancilla starts in
|0>, so only the columns U|0>|0> and U|1>|0> matter for the clone marginals;
the rest of the unitary is a deterministic orthonormal completion.
"""
import logging
import math
from typing import NamedTuple

import numpy as np
from scipy.special import comb

from broadcastkit.core.channels import BroadcastChannel
from broadcastkit.core.densops import (
    QubitParams,
    bloch_vector,
    check_density,
    complete_unitary,
    orthogonal_state,
    pure_state,
    qubit_from_params,
)
from broadcastkit.core.fidelity import apply_shrinking

logger = logging.getLogger(__name__)

COMMUTE_TOL = 1e-10
MAX_GM_COPIES = 6
MAX_KNOWN_BASIS_COPIES = 8


class ScalingParams(NamedTuple):
    z: float
    f: float


def _basis_vector(index: int, dim: int) -> np.ndarray:
    vec = np.zeros(dim, dtype=complex)
    vec[index] = 1.0
    return vec


def _power(vector: np.ndarray, copies: int) -> np.ndarray:
    result = vector
    for _ in range(copies - 1):
        result = np.kron(result, vector)
    return result


def _pinned_spectrum(dim: int) -> np.ndarray:
    spectrum = np.zeros(dim)
    spectrum[0] = 1.0
    return spectrum


def omega_dqcm(omega: float, reverse: bool = False) -> BroadcastChannel:
    """
    The 1 -> 2 cloner for states with a known phase omega.

    Both clones come out in phi = (e^{i(pi/2 - omega)}|0> + |1>)/sqrt(2)
    whatever the input, so the clone fidelity is 1/2 for every input sharing omega.
    ``reverse`` only changes how the unused columns are completed.
    """
    phi = np.array([np.exp(1j * (math.pi / 2 - omega)), 1.0], dtype=complex) / math.sqrt(2)
    clones = np.kron(phi, phi)
    columns = {
        0: np.kron(clones, _basis_vector(0, 2)),
        4: np.kron(clones, _basis_vector(1, 2)),
    }
    unitary = complete_unitary(columns, 8, reverse=reverse)
    return BroadcastChannel(unitary, _pinned_spectrum(4), copies=2)


def scaling_channel_output(params: QubitParams, z: float) -> np.ndarray:
    """
    lambda (z psi + (1 - z) psi_perp) + (1 - lambda) (z psi_perp + (1 - z) psi)

    The Bloch vector of the input is scaled by 2z - 1.
    """
    if not 0.0 <= z <= 1.0:
        raise ValueError(f"z must lie in [0, 1], got {z}")
    return apply_shrinking(qubit_from_params(params), 2.0 * z - 1.0)


def fidelity_lambda_z(lam: float, z: float) -> float:
    """Fidelity of the scaled state against the input, independent of theta and omega."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    if not 0.0 <= z <= 1.0:
        raise ValueError(f"z must lie in [0, 1], got {z}")
    first = math.sqrt(max((lam * (1 - z) + (1 - lam) * z) * (1 - lam), 0.0))
    second = math.sqrt(max((lam * z + (1 - lam) * (1 - z)) * lam, 0.0))
    return float(min((first + second) ** 2, 1.0))


def optimal_z(copies: int) -> float:
    """Pure-state fidelity of the optimal universal 1 -> M cloner."""
    if copies < 2:
        raise ValueError(f"M must be at least 2, got {copies}")
    return (2 * copies + 1) / (3 * copies)


def optimal_mixed_fidelity(copies: int, lam: float) -> float:
    return fidelity_lambda_z(lam, optimal_z(copies))


def nm_scaling_params(n_inputs: int, copies: int) -> ScalingParams:
    """
    Scaling weight and shrinking factor of the optimal N -> M universal cloner.

    Raises:
        ValueError: If N < 1 or N > M
    """
    if n_inputs < 1:
        raise ValueError(f"N must be at least 1, got {n_inputs}")
    if n_inputs > copies:
        raise ValueError(f"N must not exceed M, got N={n_inputs}, M={copies}")
    z = (n_inputs * copies + copies + n_inputs) / (copies * (n_inputs + 2))
    f = (n_inputs / copies) * (copies + 2) / (n_inputs + 2)
    return ScalingParams(z, f)


def nm_optimal_fidelity(n_inputs: int, copies: int, lam: float) -> float:
    return fidelity_lambda_z(lam, nm_scaling_params(n_inputs, copies).z)


def dicke_state(copies: int, ones: int) -> np.ndarray:
    """Normalised symmetric state of M qubits with the given number of |1>s."""
    if not 0 <= ones <= copies:
        raise ValueError(f"excitation count {ones} out of range for {copies} qubits")
    vec = np.zeros(2 ** copies, dtype=complex)
    for index in range(2 ** copies):
        if bin(index).count("1") == ones:
            vec[index] = 1.0
    return vec / math.sqrt(comb(copies, ones, exact=True))


def gisin_massar_channel(copies: int) -> BroadcastChannel:
    """
    Optimal symmetric universal 1 -> M cloner.

    The clones occupy the first M qubits; the anti-clone label k in 0..M-1 sits
    in a residual register of 2^ceil(log2 M) levels.

    Raises:
        ValueError: If M lies outside 2..6
    """
    if not 2 <= copies <= MAX_GM_COPIES:
        raise ValueError(f"M must lie in 2..{MAX_GM_COPIES}, got {copies}")
    block_dim = 2 ** math.ceil(math.log2(copies))
    dim = 2 ** copies * block_dim
    ancilla_dim = dim // 2

    weights = [math.sqrt(2 * (copies - j) / (copies * (copies + 1))) for j in range(copies)]
    image_zero = np.zeros(dim, dtype=complex)
    image_one = np.zeros(dim, dtype=complex)
    for k in range(copies):
        label = _basis_vector(k, block_dim)
        image_zero += weights[k] * np.kron(dicke_state(copies, k), label)
        image_one += weights[copies - 1 - k] * np.kron(dicke_state(copies, k + 1), label)

    unitary = complete_unitary({0: image_zero, ancilla_dim: image_one}, dim)
    logger.debug("built Gisin-Massar cloner for M=%d (dimension %d)", copies, dim)
    return BroadcastChannel(unitary, _pinned_spectrum(ancilla_dim), copies=copies)


def known_basis_broadcaster(theta: float, omega: float, copies: int, reverse: bool = False) -> BroadcastChannel:
    """
    Perfect broadcaster for the states diagonal in the (psi, psi_perp) basis.

    U|psi>|0..0> = |psi>^M and U|psi_perp>|0..0> = |psi_perp>^M; ``reverse``
    only changes how the unused columns are completed.
    """
    if not 2 <= copies <= MAX_KNOWN_BASIS_COPIES:
        raise ValueError(f"M must lie in 2..{MAX_KNOWN_BASIS_COPIES}, got {copies}")
    psi_m = _power(pure_state(theta, omega), copies)
    perp_m = _power(orthogonal_state(theta, omega), copies)
    dim = 2 ** copies
    ancilla_dim = dim // 2
    columns = {
        0: math.cos(theta) * psi_m - math.sin(theta) * perp_m,
        ancilla_dim: np.exp(-1j * omega) * (math.sin(theta) * psi_m + math.cos(theta) * perp_m),
    }
    unitary = complete_unitary(columns, dim, reverse=reverse)
    return BroadcastChannel(unitary, _pinned_spectrum(ancilla_dim), copies=copies)


def commutes(first, second) -> bool:
    r1 = check_density(first, "r1")
    r2 = check_density(second, "r2")
    if r1.shape != r2.shape:
        raise ValueError(f"operators differ in shape: {r1.shape} and {r2.shape}")
    return bool(np.max(np.abs(r1 @ r2 - r2 @ r1)) < COMMUTE_TOL)


def bloch_length(rho) -> float:
    return bloch_vector(rho).norm
