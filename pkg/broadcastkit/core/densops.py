"""
Dense complex matrix core for broadcastkit
Qubit state construction, tensor products, partial traces and PSD square roots.

Basis ordering is row-major with the left tensor factor most significant:
for a system qubit and a d-level ancilla the joint index is i_sys * d + i_anc.
"""
import logging
import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group

from broadcastkit.core.errors import DimensionError, NotDensityOperatorError

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
SQRT_CLAMP_TOL = 1e-8
BLOCH_TOL = 1e-10
UNITARY_TOL = 1e-10
# eigenvalues and determinants below this are rounding noise on unit-trace operators
EIGEN_FLOOR = 1e-14

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

Keep = Union[int, Sequence[int]]


@dataclass(frozen=True)
class QubitParams:
    """The (theta, omega, lambda) triple identifying a mixed qubit"""

    theta: float
    omega: float
    lam: float

    def __post_init__(self):
        for name in ("theta", "omega", "lam"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lam must lie in [0, 1], got {self.lam}")

    def with_lam(self, lam: float) -> "QubitParams":
        return QubitParams(self.theta, self.omega, lam)


class BlochVector(NamedTuple):
    x: float
    y: float
    z: float

    @property
    def norm(self) -> float:
        return math.sqrt(self.x ** 2 + self.y ** 2 + self.z ** 2)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def as_complex_matrix(matrix, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    arr = np.asarray(matrix, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return arr


def hermitize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.conj().T)


def check_density(rho, name: str = "rho") -> np.ndarray:
    """
    Validate a density operator.

    Returns:
        np.ndarray: The matrix as a complex array

    Raises:
        NotDensityOperatorError: If rho is not Hermitian, unit-trace and PSD
    """
    arr = as_complex_matrix(rho, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")

    deviation = np.max(np.abs(arr - arr.conj().T))
    if deviation > HERMITIAN_TOL:
        raise NotDensityOperatorError(f"{name} is not Hermitian (max deviation {deviation:.3e})")

    trace = np.trace(arr)
    if abs(trace - 1.0) > TRACE_TOL:
        raise NotDensityOperatorError(f"{name} has trace {trace.real:.15g}, expected 1")

    smallest = scipy.linalg.eigvalsh(hermitize(arr))[0]
    if smallest < -PSD_TOL:
        raise NotDensityOperatorError(f"{name} has negative eigenvalue {smallest:.3e}")
    return arr


def pure_state(theta: float, omega: float) -> np.ndarray:
    """|psi> = cos(theta)|0> + e^{i omega} sin(theta)|1>"""
    return np.array([math.cos(theta), np.exp(1j * omega) * math.sin(theta)], dtype=complex)


def orthogonal_state(theta: float, omega: float) -> np.ndarray:
    """|psi_perp> = -sin(theta)|0> + e^{i omega} cos(theta)|1>"""
    return np.array([-math.sin(theta), np.exp(1j * omega) * math.cos(theta)], dtype=complex)


def projector(vector: np.ndarray) -> np.ndarray:
    return np.outer(vector, vector.conj())


def qubit_from_params(params: QubitParams) -> np.ndarray:
    """
    Build lambda |psi><psi| + (1 - lambda) |psi_perp><psi_perp|.

    Raises:
        ValueError: If lambda lies outside [0, 1]
    """
    if not 0.0 <= params.lam <= 1.0:
        raise ValueError(f"lam must lie in [0, 1], got {params.lam}")
    psi = pure_state(params.theta, params.omega)
    perp = orthogonal_state(params.theta, params.omega)
    rho = params.lam * projector(psi) + (1.0 - params.lam) * projector(perp)
    return hermitize(rho)


def tensor(first, second, *rest) -> np.ndarray:
    """Kronecker product; the left operand is the most significant factor."""
    result = np.kron(as_complex_matrix(first, "first"), as_complex_matrix(second, "second"))
    for extra in rest:
        result = np.kron(result, as_complex_matrix(extra, "operand"))
    return result


def partial_trace(rho, dims: Sequence[int], keep: Keep, validate: bool = True) -> np.ndarray:
    """
    Reduce a joint operator to the subsystems listed in keep.

    Args:
        rho: Joint operator on prod(dims) levels
        dims: Subsystem dimensions, most significant first
        keep: Index (or indices) of the subsystems that survive
        validate: Check that rho is a density operator first

    Raises:
        DimensionError: If dims do not multiply to the size of rho or keep is invalid
    """
    arr = as_complex_matrix(rho, "rho")
    dims = [int(dim) for dim in dims]
    if arr.shape[0] != arr.shape[1] or math.prod(dims) != arr.shape[0]:
        raise DimensionError(f"subsystem dims {dims} do not match operator shape {arr.shape}")

    keep_list = [int(keep)] if isinstance(keep, (int, np.integer)) else sorted(int(k) for k in keep)
    count = len(dims)
    if not keep_list or len(set(keep_list)) != len(keep_list) or not all(0 <= k < count for k in keep_list):
        raise DimensionError(f"invalid subsystem selection {keep} for {count} subsystems")
    if validate:
        check_density(arr)

    kept = set(keep_list)
    rows = list(range(count))
    cols = [count + i if i in kept else i for i in range(count)]
    out = keep_list + [count + k for k in keep_list]
    reduced = np.einsum(arr.reshape(dims + dims), rows + cols, out)

    size = math.prod(dims[k] for k in keep_list)
    return reduced.reshape(size, size)


def mat_sqrt_psd(rho) -> np.ndarray:
    """
    Hermitian PSD square root via eigendecomposition.

    Eigenvalues in [-1e-8, EIGEN_FLOOR) are clamped to zero.

    Raises:
        NotDensityOperatorError: If an eigenvalue lies below -1e-8
    """
    arr = as_complex_matrix(rho, "rho")
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"rho must be square, got shape {arr.shape}")
    values, vectors = scipy.linalg.eigh(hermitize(arr))
    if values[0] < -SQRT_CLAMP_TOL:
        raise NotDensityOperatorError(f"not a density operator: eigenvalue {values[0]:.3e}")
    values = np.where(values < EIGEN_FLOOR, 0.0, values)
    return hermitize((vectors * np.sqrt(values)) @ vectors.conj().T)


def is_unitary(matrix, tol: float = UNITARY_TOL) -> bool:
    arr = np.asarray(matrix, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        return False
    deviation = np.abs(arr.conj().T @ arr - np.eye(arr.shape[0]))
    return bool(np.max(deviation) <= tol)


def complete_unitary(columns: Mapping[int, np.ndarray], dim: int, reverse: bool = False) -> np.ndarray:
    """
    Complete orthonormal columns placed at fixed positions to a unitary.

    The remaining columns come from a QR factorisation of the specified
    columns followed by the canonical basis (reversed when ``reverse``),
    so the completion is deterministic for a given ordering.

    Raises:
        ValueError: If the specified columns are not orthonormal
    """
    fixed = sorted(columns)
    if any(not 0 <= k < dim for k in fixed):
        raise DimensionError(f"column positions {fixed} out of range for dimension {dim}")
    specified = np.column_stack([np.asarray(columns[k], dtype=complex) for k in fixed])
    if specified.shape[0] != dim:
        raise DimensionError(f"columns have length {specified.shape[0]}, expected {dim}")
    gram = specified.conj().T @ specified
    if np.max(np.abs(gram - np.eye(len(fixed)))) > UNITARY_TOL:
        raise ValueError("specified columns are not orthonormal")

    candidates = np.eye(dim, dtype=complex)
    if reverse:
        candidates = candidates[:, ::-1]
    q, _ = scipy.linalg.qr(np.hstack([specified, candidates]), mode="economic")

    unitary = np.empty((dim, dim), dtype=complex)
    unitary[:, fixed] = specified
    unitary[:, [k for k in range(dim) if k not in columns]] = q[:, len(fixed):dim]
    return unitary


def bloch_vector(rho) -> BlochVector:
    arr = as_complex_matrix(rho, "rho")
    if arr.shape != (2, 2):
        raise DimensionError(f"Bloch vectors need a 2x2 operator, got shape {arr.shape}")
    return BlochVector(
        float(np.trace(arr @ PAULI_X).real),
        float(np.trace(arr @ PAULI_Y).real),
        float(np.trace(arr @ PAULI_Z).real),
    )


def density_from_bloch(vector: Sequence[float]) -> np.ndarray:
    x, y, z = (float(c) for c in vector)
    if math.sqrt(x * x + y * y + z * z) > 1.0 + BLOCH_TOL:
        raise ValueError(f"Bloch vector {vector} lies outside the unit ball")
    return 0.5 * (IDENTITY_2 + x * PAULI_X + y * PAULI_Y + z * PAULI_Z)


def bloch_roundtrip(params: QubitParams) -> BlochVector:
    """Bloch vector of qubit_from_params(params); its norm is |2 lambda - 1|."""
    return bloch_vector(qubit_from_params(params))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=rng)


def random_density(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    """Ginibre-distributed density operator of the given rank (full rank by default)."""
    rank = dim if rank is None else rank
    ginibre = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = ginibre @ ginibre.conj().T
    return hermitize(rho / np.trace(rho).real)


def random_qubit_params(rng: np.random.Generator) -> QubitParams:
    return QubitParams(
        theta=rng.uniform(0.0, math.pi / 2),
        omega=rng.uniform(0.0, 2 * math.pi),
        lam=rng.uniform(0.0, 1.0),
    )
