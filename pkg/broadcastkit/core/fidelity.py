"""
Uhlmann fidelity, its closed qubit form and shrinking-factor extraction
"""
import logging
import math
from typing import Optional

import numpy as np
import scipy.linalg

from broadcastkit.core.densops import (
    EIGEN_FLOOR,
    IDENTITY_2,
    QubitParams,
    bloch_vector,
    check_density,
    hermitize,
    mat_sqrt_psd,
)
from broadcastkit.core.errors import DimensionError, NotDensityOperatorError

logger = logging.getLogger(__name__)

RADICAND_TOL = 1e-10
SHRINKING_TOL = 1e-9


def _clip_fidelity(value: float) -> float:
    return float(min(max(value, 0.0), 1.0))


def uhlmann_fidelity(rho1, rho2) -> float:
    """
    F(rho1, rho2) = [tr sqrt(sqrt(rho1) rho2 sqrt(rho1))]^2

    Raises:
        DimensionError: If the operators differ in size
    """
    first = check_density(rho1, "rho1")
    second = check_density(rho2, "rho2")
    if first.shape != second.shape:
        raise DimensionError(f"fidelity needs equal shapes, got {first.shape} and {second.shape}")

    root = mat_sqrt_psd(first)
    values = scipy.linalg.eigvalsh(hermitize(root @ second @ root))
    values = np.where(values < EIGEN_FLOOR, 0.0, values)
    return _clip_fidelity(float(np.sum(np.sqrt(values)) ** 2))


def qubit_fidelity_closed_form(x: float, y: complex, params: QubitParams) -> float:
    """
    Fidelity between rho_A = [[x, y], [y*, 1 - x]] and rho_s(theta, omega, lambda).

    Raises:
        NotDensityOperatorError: If the radicand is below -1e-10
    """
    lam, theta, omega = params.lam, params.theta, params.omega
    y = complex(y)
    phase_term = (np.exp(1j * omega) * y + np.exp(-1j * omega) * y.conjugate()).real

    output_det = x - x * x - abs(y) ** 2
    if abs(output_det) < EIGEN_FLOOR:
        output_det = 0.0
    radicand = (lam - lam * lam) * output_det
    if radicand < -RADICAND_TOL:
        raise NotDensityOperatorError(f"negative radicand {radicand:.3e}: rho_A is not a density operator")

    value = (
        0.5
        + 0.5 * (2 * lam - 1) * (2 * x - 1) * math.cos(2 * theta)
        + 0.5 * (2 * lam - 1) * phase_term * math.sin(2 * theta)
        + 2.0 * math.sqrt(max(radicand, 0.0))
    )
    return _clip_fidelity(value)


def qubit_fidelity_batch(rho_a: np.ndarray, rho_s: np.ndarray) -> np.ndarray:
    """
    Vectorised qubit fidelity tr(rho sigma) + 2 sqrt(det rho det sigma).

    Both arguments have shape (..., 2, 2); no validation is performed.
    """
    overlap = np.einsum("...ij,...ji->...", rho_a, rho_s).real
    det_a = (rho_a[..., 0, 0] * rho_a[..., 1, 1] - rho_a[..., 0, 1] * rho_a[..., 1, 0]).real
    det_s = (rho_s[..., 0, 0] * rho_s[..., 1, 1] - rho_s[..., 0, 1] * rho_s[..., 1, 0]).real
    det_a = np.where(det_a < EIGEN_FLOOR, 0.0, det_a)
    det_s = np.where(det_s < EIGEN_FLOOR, 0.0, det_s)
    return np.clip(overlap + 2.0 * np.sqrt(det_a * det_s), 0.0, 1.0)


def apply_shrinking(rho, factor: float) -> np.ndarray:
    """Scaling channel rho -> ((1 - f)/2) I + f rho, valid for f in [-1, 1]."""
    if not -1.0 <= factor <= 1.0:
        raise ValueError(f"shrinking factor must lie in [-1, 1], got {factor}")
    arr = check_density(rho)
    if arr.shape != (2, 2):
        raise DimensionError(f"shrinking acts on qubits, got shape {arr.shape}")
    return 0.5 * (1.0 - factor) * IDENTITY_2 + factor * arr


def shrinking_factor(rho_in, rho_out) -> Optional[float]:
    """
    Solve rho_out = ((1 - f)/2) I + f rho_in for f.

    Returns:
        Optional[float]: f, or None when rho_out is not a scaled copy of rho_in
        (including rho_in = I/2, where f is undetermined)
    """
    source = check_density(rho_in, "rho_in")
    target = check_density(rho_out, "rho_out")
    if source.shape != (2, 2) or target.shape != (2, 2):
        raise DimensionError("shrinking factors are defined for qubits only")

    r_in = bloch_vector(source).as_array()
    r_out = bloch_vector(target).as_array()
    norm_sq = float(r_in @ r_in)
    if norm_sq <= SHRINKING_TOL ** 2:
        logger.debug("input is maximally mixed; shrinking factor undetermined")
        return None

    factor = float(r_out @ r_in) / norm_sq
    rebuilt = 0.5 * (1.0 - factor) * IDENTITY_2 + factor * source
    residual = float(np.max(np.abs(target - rebuilt)))
    if residual >= SHRINKING_TOL:
        logger.debug("not a scaling channel output (residual %.3e)", residual)
        return None
    return factor
