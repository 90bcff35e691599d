"""
Broadcast channels: a unitary acting on one input qubit and a diagonal ancilla.

The joint output U (rho (x) diag(c)) U^dagger lives on M clone qubits followed
by a residual register of 2d / 2^M levels. The analysis helpers extract the
affine-in-lambda structure of one clone marginal and evaluate the conditions
a universal broadcaster would have to satisfy.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from broadcastkit.core.densops import (
    QubitParams,
    as_complex_matrix,
    check_density,
    hermitize,
    is_unitary,
    partial_trace,
    qubit_from_params,
)
from broadcastkit.core.errors import ConsistencyError, DimensionError
from broadcastkit.core.fidelity import uhlmann_fidelity

logger = logging.getLogger(__name__)

SPECTRUM_TOL = 1e-12
COEFFICIENT_TOL = 1e-9
SCHWARZ_TOL = 1e-9

DEFAULT_THETA_GRID: Tuple[float, ...] = (0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2)
DEFAULT_OMEGA_GRID: Tuple[float, ...] = (0.0, math.pi / 3, 2 * math.pi / 3, math.pi, 3 * math.pi / 2)


@dataclass(frozen=True, eq=False)
class BroadcastChannel:
    """
    A cloning machine: unitary U (2d x 2d), ancilla spectrum c_0..c_{d-1}, copy count M.

    Arrays are copied and frozen on construction so channels can be shared
    between threads.
    """

    unitary: np.ndarray
    ancilla_spectrum: np.ndarray
    copies: int = 2

    def __post_init__(self):
        unitary = as_complex_matrix(self.unitary, "unitary").copy()
        dim = unitary.shape[0]
        if unitary.shape[0] != unitary.shape[1] or dim % 2:
            raise DimensionError(f"unitary must be square with even size, got shape {unitary.shape}")
        copies = int(self.copies)
        if copies < 2:
            raise ValueError(f"copies must be at least 2, got {copies}")
        if dim % (2 ** copies):
            raise DimensionError(f"dimension {dim} is not divisible by 2^{copies}")
        if not is_unitary(unitary):
            raise ValueError("unitary fails U^dagger U = I at tolerance 1e-10")

        spectrum = np.asarray(self.ancilla_spectrum, dtype=float).ravel().copy()
        if spectrum.shape != (dim // 2,):
            raise DimensionError(f"ancilla spectrum needs {dim // 2} entries, got {spectrum.size}")
        if np.any(spectrum < -SPECTRUM_TOL) or abs(spectrum.sum() - 1.0) > SPECTRUM_TOL:
            raise ValueError("ancilla spectrum must be non-negative and sum to 1")
        spectrum = np.clip(spectrum, 0.0, None)

        unitary.setflags(write=False)
        spectrum.setflags(write=False)
        object.__setattr__(self, "unitary", unitary)
        object.__setattr__(self, "ancilla_spectrum", spectrum)
        object.__setattr__(self, "copies", copies)

    @property
    def dim(self) -> int:
        return self.unitary.shape[0]

    @property
    def ancilla_dim(self) -> int:
        return self.dim // 2

    @property
    def block_dim(self) -> int:
        return self.dim // 2 ** self.copies

    @property
    def subsystem_dims(self) -> List[int]:
        return [2] * self.copies + [self.block_dim]

    @classmethod
    def identity(cls, ancilla_dim: int = 4, copies: int = 2) -> "BroadcastChannel":
        """The do-nothing channel with the ancilla in |0>."""
        spectrum = np.zeros(ancilla_dim)
        spectrum[0] = 1.0
        return cls(np.eye(2 * ancilla_dim, dtype=complex), spectrum, copies)


@dataclass(frozen=True, eq=False)
class BlockPartition:
    """
    The column blocks |u^i_{j,k}> of U, stored as vectors[i, j, k].

    U[j * b + r, i * d + k] == vectors[i, j, k, r] with b the block dimension.
    """

    vectors: np.ndarray

    @property
    def copies(self) -> int:
        return int(round(math.log2(self.vectors.shape[1])))

    def u(self, i: int, j: int, k: int) -> np.ndarray:
        return self.vectors[i, j, k]

    def reassemble(self) -> np.ndarray:
        _, rows, ancilla_dim, block_dim = self.vectors.shape
        return self.vectors.transpose(1, 3, 0, 2).reshape(rows * block_dim, 2 * ancilla_dim)


@dataclass(frozen=True)
class ChannelCoefficients:
    """x(lambda) = a lambda + b and y(lambda) = c lambda + d for one copy at fixed (theta, omega)."""

    theta: float
    omega: float
    a: float
    b: float
    c: complex
    d: complex
    e_x: float
    e_y: complex
    copy_index: int = 0

    @property
    def delta(self) -> float:
        return float(np.angle(self.e_y))

    def x(self, lam: float) -> float:
        return self.a * lam + self.b

    def y(self, lam: float) -> complex:
        return self.c * lam + self.d


@dataclass(frozen=True, eq=False)
class LVectors:
    l0: np.ndarray
    l1: np.ndarray
    w: np.ndarray

    @property
    def b_value(self) -> float:
        return float(np.vdot(self.l0, self.l0).real)

    @property
    def d_value(self) -> complex:
        return complex(np.vdot(self.l1, self.l0))


class SchwarzResult(NamedTuple):
    saturated: bool
    g: Optional[complex]


class ThetaFit(NamedTuple):
    a: float
    residual: float


def _check_copy_index(channel: BroadcastChannel, copy_index: int) -> int:
    if not 0 <= copy_index < channel.copies:
        raise DimensionError(f"copy index {copy_index} out of range for {channel.copies} copies")
    return int(copy_index)


def _copy_pairs(copies: int, copy_index: int) -> Tuple[np.ndarray, np.ndarray]:
    """Clone-register rows whose chosen copy bit is 0, and their partners with the bit set."""
    bit = 1 << (copies - 1 - copy_index)
    low = np.array([j for j in range(2 ** copies) if not j & bit], dtype=int)
    return low, low + bit


def _propagate(channel: BroadcastChannel, operator: np.ndarray) -> np.ndarray:
    joint = np.kron(operator, np.diag(channel.ancilla_spectrum).astype(complex))
    return channel.unitary @ joint @ channel.unitary.conj().T


def apply_broadcast(channel: BroadcastChannel, rho) -> np.ndarray:
    """Joint output U (rho (x) rho_anc) U^dagger before marginalisation."""
    arr = check_density(rho)
    if arr.shape != (2, 2):
        raise DimensionError(f"broadcast input must be a qubit, got shape {arr.shape}")
    return hermitize(_propagate(channel, arr))


def clone_marginal(
    channel: BroadcastChannel,
    rho,
    copy_index: int = 0,
    subsystem_dims: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """Marginal of apply_broadcast on one subsystem (a clone by default layout)."""
    dims = channel.subsystem_dims if subsystem_dims is None else [int(dim) for dim in subsystem_dims]
    if math.prod(dims) != channel.dim:
        raise DimensionError(f"subsystem dims {dims} do not multiply to {channel.dim}")
    if not 0 <= copy_index < len(dims):
        raise DimensionError(f"subsystem index {copy_index} out of range for dims {dims}")
    joint = apply_broadcast(channel, rho)
    return hermitize(partial_trace(joint, dims, copy_index, validate=False))


def copy_transfer(channel: BroadcastChannel, copy_index: int = 0) -> np.ndarray:
    """
    The linear map of one copy as an array T[a, b] = marginal of |a><b|.

    marginal(rho) == einsum("ab,abij->ij", rho, T)
    """
    _check_copy_index(channel, copy_index)
    transfer = np.empty((2, 2, 2, 2), dtype=complex)
    for a in range(2):
        for b in range(2):
            unit = np.zeros((2, 2), dtype=complex)
            unit[a, b] = 1.0
            transfer[a, b] = partial_trace(
                _propagate(channel, unit), channel.subsystem_dims, copy_index, validate=False
            )
    return transfer


def clone_fidelity(channel: BroadcastChannel, params: QubitParams, copy_index: int = 0) -> float:
    rho = qubit_from_params(params)
    return uhlmann_fidelity(clone_marginal(channel, rho, copy_index), rho)


def extract_blocks(channel: BroadcastChannel) -> BlockPartition:
    """Slice U into the |u^i_{j,k}> grid; lossless."""
    rows = 2 ** channel.copies
    if channel.dim % rows:
        raise DimensionError(f"dimension {channel.dim} is not divisible by {rows}")
    shaped = channel.unitary.reshape(rows, channel.block_dim, 2, channel.ancilla_dim)
    return BlockPartition(np.ascontiguousarray(shaped.transpose(2, 0, 3, 1)))


def block_sums(partition: BlockPartition, ancilla_spectrum, copy_index: int = 0) -> Tuple[float, complex]:
    """
    E_x and E_y from the column blocks, i.e. the copy marginal of the identity input.

    For copy_index == M - 1 the row pairs are (k, k + 1) with k even.
    """
    spectrum = np.asarray(ancilla_spectrum, dtype=float)
    low, high = _copy_pairs(partition.copies, copy_index)
    vectors = partition.vectors
    norms = np.sum(np.abs(vectors[:, low]) ** 2, axis=(0, 1, 3))
    overlaps = np.einsum("ijkr,ijkr->k", vectors[:, high].conj(), vectors[:, low])
    return float(spectrum @ norms), complex(spectrum @ overlaps)


def compute_coefficients(
    channel: BroadcastChannel, theta: float, omega: float, copy_index: int = 0
) -> ChannelCoefficients:
    """
    Extract a, b, c, d by simulating lambda = 0 and lambda = 1.

    Raises:
        ConsistencyError: If a + 2b, c + 2d disagree with the block sums
    """
    _check_copy_index(channel, copy_index)
    at_zero = clone_marginal(channel, qubit_from_params(QubitParams(theta, omega, 0.0)), copy_index)
    at_one = clone_marginal(channel, qubit_from_params(QubitParams(theta, omega, 1.0)), copy_index)

    b = float(at_zero[0, 0].real)
    a = float(at_one[0, 0].real) - b
    d = complex(at_zero[0, 1])
    c = complex(at_one[0, 1]) - d
    e_x = a + 2 * b
    e_y = c + 2 * d

    block_x, block_y = block_sums(extract_blocks(channel), channel.ancilla_spectrum, copy_index)
    if abs(e_x - block_x) > COEFFICIENT_TOL or abs(e_y - block_y) > COEFFICIENT_TOL:
        raise ConsistencyError(
            f"simulated (E_x, E_y) = ({e_x:.12g}, {e_y:.12g}) disagree with block sums "
            f"({block_x:.12g}, {block_y:.12g}); basis convention mismatch"
        )
    return ChannelCoefficients(theta, omega, a, b, c, d, e_x, e_y, copy_index)


def coefficient_grid(
    channel: BroadcastChannel,
    theta_grid: Sequence[float] = DEFAULT_THETA_GRID,
    omega_grid: Sequence[float] = DEFAULT_OMEGA_GRID,
    copy_index: int = 0,
) -> List[ChannelCoefficients]:
    return [
        compute_coefficients(channel, theta, omega, copy_index)
        for theta in theta_grid
        for omega in omega_grid
    ]


def universality_residual(
    channel: BroadcastChannel,
    theta_grid: Sequence[float] = DEFAULT_THETA_GRID,
    omega_grid: Sequence[float] = DEFAULT_OMEGA_GRID,
    copy_index: int = 0,
) -> Tuple[float, float]:
    """
    (max |E_x - 1|, max |E_y|) over the grid.

    A channel at (0, 0) maps I/2 to I/2 on the copy, hence has fidelity 1 at lambda = 1/2.
    """
    grid = coefficient_grid(channel, theta_grid, omega_grid, copy_index)
    if not grid:
        raise ValueError("universality residual needs a non-empty grid")
    r_x = max(abs(item.e_x - 1.0) for item in grid)
    r_y = max(abs(item.e_y) for item in grid)
    return float(r_x), float(r_y)


def build_l_vectors(channel: BroadcastChannel, theta: float, omega: float, copy_index: int = 0) -> LVectors:
    """
    Stack sqrt(c_k) w_{j,k} over the copy-bit-0 rows (L0) and their partners (L1).

    The rows follow copy_index. The usual L0 = (w_0, w_2), L1 = (w_1, w_3) grouping
    is copy_index = M - 1 = 1; the default copy 0 pairs rows (0, 1) with (2, 3).

    Raises:
        ValueError: If the channel is not a 1 -> 2 cloner
        ConsistencyError: If <L0|L0>, <L1|L0> disagree with the simulated b, d
    """
    if channel.copies != 2:
        raise ValueError(f"L-vectors are defined for 1 -> 2 cloners, got {channel.copies} copies")
    _check_copy_index(channel, copy_index)
    vectors = extract_blocks(channel).vectors
    w = -math.sin(theta) * vectors[0] + np.exp(1j * omega) * math.cos(theta) * vectors[1]

    low, high = _copy_pairs(channel.copies, copy_index)
    weights = np.sqrt(channel.ancilla_spectrum)[:, None, None]
    l0 = (weights * w[low].transpose(1, 0, 2)).ravel()
    l1 = (weights * w[high].transpose(1, 0, 2)).ravel()
    result = LVectors(l0, l1, w)

    coefficients = compute_coefficients(channel, theta, omega, copy_index)
    if abs(result.b_value - coefficients.b) > COEFFICIENT_TOL or abs(result.d_value - coefficients.d) > COEFFICIENT_TOL:
        raise ConsistencyError("L-vector inner products disagree with the simulated b, d")
    return result


def schwarz_proportionality(lvectors: LVectors) -> SchwarzResult:
    """Is <L0|L0><L1|L1> = |<L1|L0>|^2, i.e. L0 = g L1?"""
    norm0 = float(np.vdot(lvectors.l0, lvectors.l0).real)
    norm1 = float(np.vdot(lvectors.l1, lvectors.l1).real)
    overlap = complex(np.vdot(lvectors.l1, lvectors.l0))
    saturated = norm0 * norm1 - abs(overlap) ** 2 < SCHWARZ_TOL
    if saturated and norm1 > SCHWARZ_TOL:
        return SchwarzResult(True, overlap / norm1)
    return SchwarzResult(saturated, None)


def orthogonality_residual(partition: BlockPartition, ancilla_spectrum, copy_index: int = 0) -> float:
    """
    max over c_k > 0 of |sum over copy-bit-1 rows j of <u^0_{j,k}|u^1_{j,k}>|

    The sum over rows j in {1, 3} is copy_index = M - 1 = 1; the default copy 0
    sums rows {2, 3}, so a defect placed only on row 1 shows up at copy_index=1.
    """
    if partition.copies != 2:
        raise ValueError(f"orthogonality residual is defined for 1 -> 2 cloners, got {partition.copies} copies")
    spectrum = np.asarray(ancilla_spectrum, dtype=float)
    _, high = _copy_pairs(2, copy_index)
    vectors = partition.vectors
    sums = np.einsum("jkr,jkr->k", vectors[0, high].conj(), vectors[1, high])
    active = np.abs(sums[spectrum > 0])
    return float(active.max()) if active.size else 0.0


def theta_fit(
    channel: BroadcastChannel, omega: float, theta_samples: Sequence[float], copy_index: int = 0
) -> ThetaFit:
    """
    Least-squares fit of the theta-symmetrised lambda = 0 fidelity to 1/2 + (a/2) cos^2(2 theta).
    """
    if channel.copies != 2:
        raise ValueError(f"theta fit is defined for 1 -> 2 cloners, got {channel.copies} copies")
    thetas = np.asarray(theta_samples, dtype=float)
    averaged = np.array([
        0.5 * (
            clone_fidelity(channel, QubitParams(theta, omega, 0.0), copy_index)
            + clone_fidelity(channel, QubitParams(-theta, omega, 0.0), copy_index)
        )
        for theta in thetas
    ])
    basis = np.cos(2 * thetas) ** 2
    denom = float(basis @ basis)
    a = 2.0 * float((averaged - 0.5) @ basis) / denom if denom > 0 else 0.0
    residual = float(np.max(np.abs(averaged - 0.5 - 0.5 * a * basis))) if thetas.size else 0.0
    logger.debug("theta fit at omega=%.6g: a=%.6g residual=%.3e", omega, a, residual)
    return ThetaFit(a, residual)
