"""
Search over broadcast channels for input-independent clone fidelity.

A channel is encoded as a Hermitian generator (U = exp(iH)) plus softmax
logits for the ancilla spectrum. Nelder-Mead restarts minimise the worst-clone
fidelity spread, penalised towards a target fidelity level; the resulting
trade-off curve is numerical evidence, not proof, that no universal
broadcaster exists.
"""
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, List, NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd
import scipy.linalg
from scipy.optimize import minimize
from scipy.special import softmax

from broadcastkit.core.channels import BroadcastChannel, copy_transfer
from broadcastkit.core.densops import QubitParams, hermitize, qubit_from_params
from broadcastkit.core.errors import DimensionError, SearchBudgetError
from broadcastkit.core.fidelity import qubit_fidelity_batch
from broadcastkit.modules.cloners import omega_dqcm

logger = logging.getLogger(__name__)

PENALTY_WEIGHT = 10.0
UNIVERSALITY_TOL = 1e-6
DEFAULT_BUDGET = 20_000
DEFAULT_RESTARTS = 8
DEFAULT_ANCILLA_DIM = 4
DEFAULT_COPIES = 2
MAX_ANCILLA_DIM = 8
DEFAULT_SAMPLE_SIZE = 64
DEFAULT_LEVELS: Tuple[float, ...] = (0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 1.0)
START_SCALE = 1.0
LOGIT_FLOOR = 1e-30
INFEASIBLE = 1e6

ANCHOR_LAMBDAS = (0.0, 0.5, 1.0)
ANCHOR_THETAS = (0.0, math.pi / 4, math.pi / 2)
ANCHOR_OMEGAS = (0.0, math.pi / 2)

CURVE_COLUMNS = ["target_level", "achieved_spread", "achieved_mean", "evaluations_used"]


@dataclass(frozen=True, eq=False)
class ChannelParameterization:
    """
    Coordinates of a channel on 2d levels.

    hermitian_params holds the real diagonal of H, then the real and the
    imaginary parts of its strict upper triangle (row-major); simplex_params
    are d - 1 logits, the last logit being pinned to 0.
    """

    dim_total: int
    hermitian_params: np.ndarray
    simplex_params: np.ndarray

    def __post_init__(self):
        dim_total = int(self.dim_total)
        if dim_total < 2 or dim_total % 2:
            raise DimensionError(f"dim_total must be a positive even number, got {dim_total}")
        hermitian = np.array(self.hermitian_params, dtype=float).ravel()
        simplex = np.array(self.simplex_params, dtype=float).ravel()
        if hermitian.size != dim_total ** 2:
            raise DimensionError(f"expected {dim_total ** 2} generator coordinates, got {hermitian.size}")
        if simplex.size != dim_total // 2 - 1:
            raise DimensionError(f"expected {dim_total // 2 - 1} spectrum coordinates, got {simplex.size}")
        if not (np.all(np.isfinite(hermitian)) and np.all(np.isfinite(simplex))):
            raise ValueError("channel parameters must be finite")
        hermitian.setflags(write=False)
        simplex.setflags(write=False)
        object.__setattr__(self, "dim_total", dim_total)
        object.__setattr__(self, "hermitian_params", hermitian)
        object.__setattr__(self, "simplex_params", simplex)

    @property
    def size(self) -> int:
        return self.hermitian_params.size + self.simplex_params.size

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.hermitian_params, self.simplex_params])

    @classmethod
    def from_vector(cls, dim_total: int, vector) -> "ChannelParameterization":
        vector = np.asarray(vector, dtype=float).ravel()
        split = dim_total ** 2
        return cls(dim_total, vector[:split], vector[split:])

    @classmethod
    def zeros(cls, dim_total: int) -> "ChannelParameterization":
        return cls(dim_total, np.zeros(dim_total ** 2), np.zeros(dim_total // 2 - 1))

    @classmethod
    def random(cls, dim_total: int, rng: np.random.Generator, scale: float = START_SCALE) -> "ChannelParameterization":
        count = dim_total ** 2 + dim_total // 2 - 1
        return cls.from_vector(dim_total, rng.uniform(-scale, scale, size=count))


class ConstancyScore(NamedTuple):
    mean: float
    spread: float
    copy_means: Tuple[float, ...]
    copy_spreads: Tuple[float, ...]


@dataclass(frozen=True)
class StateSample:
    """Anchor states plus seeded random states; ``omega`` pins every phase when set."""

    states: Tuple[QubitParams, ...]
    seed: int
    omega: Optional[float] = None

    @classmethod
    def generate(cls, seed: int, size: int = DEFAULT_SAMPLE_SIZE, omega: Optional[float] = None) -> "StateSample":
        if size < 0:
            raise ValueError(f"sample size must be non-negative, got {size}")
        omegas = ANCHOR_OMEGAS if omega is None else (float(omega),)
        anchors = [
            QubitParams(theta, phase, lam)
            for lam in ANCHOR_LAMBDAS
            for theta in ANCHOR_THETAS
            for phase in omegas
        ]
        rng = np.random.default_rng(seed)
        thetas = rng.uniform(0.0, math.pi / 2, size)
        phases = rng.uniform(0.0, 2 * math.pi, size)
        lams = rng.uniform(0.0, 1.0, size)
        if omega is not None:
            phases = np.full(size, float(omega))
        randoms = [QubitParams(t, w, l) for t, w, l in zip(thetas, phases, lams)]
        return cls(tuple(anchors + randoms), int(seed), None if omega is None else float(omega))

    def __len__(self) -> int:
        return len(self.states)

    def densities(self) -> np.ndarray:
        return np.stack([qubit_from_params(params) for params in self.states])


@dataclass(frozen=True, eq=False)
class TradeoffPoint:
    target_level: float
    achieved_spread: float
    achieved_mean: float
    evaluations_used: int
    params: ChannelParameterization
    restart: int = 0


@dataclass(frozen=True)
class TradeoffCurve:
    points: Tuple[TradeoffPoint, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(sorted(self.points, key=lambda point: point.target_level)))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def min_spread(self) -> Optional[float]:
        return min((point.achieved_spread for point in self.points), default=None)

    def any_universal(self, tol: float = UNIVERSALITY_TOL) -> bool:
        return any(point.achieved_spread < tol for point in self.points)

    def to_frame(self) -> pd.DataFrame:
        rows = [
            [point.target_level, point.achieved_spread, point.achieved_mean, point.evaluations_used]
            for point in self.points
        ]
        frame = pd.DataFrame(rows, columns=CURVE_COLUMNS)
        return frame.astype({"target_level": float, "achieved_spread": float,
                             "achieved_mean": float, "evaluations_used": int})


def hermitian_from_params(params, dim: int) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    upper_count = dim * (dim - 1) // 2
    rows, cols = np.triu_indices(dim, 1)
    upper = np.zeros((dim, dim), dtype=complex)
    upper[rows, cols] = params[dim:dim + upper_count] + 1j * params[dim + upper_count:]
    return np.diag(params[:dim]).astype(complex) + upper + upper.conj().T


def params_from_hermitian(matrix: np.ndarray) -> np.ndarray:
    dim = matrix.shape[0]
    rows, cols = np.triu_indices(dim, 1)
    upper = matrix[rows, cols]
    return np.concatenate([np.diag(matrix).real, upper.real, upper.imag])


def spectrum_from_logits(simplex_params) -> np.ndarray:
    return softmax(np.append(np.asarray(simplex_params, dtype=float), 0.0))


def decode(params: ChannelParameterization, copies: int = DEFAULT_COPIES) -> BroadcastChannel:
    """
    Map coordinates to a channel; all-zero coordinates give U = I and a uniform spectrum.

    Raises:
        DimensionError: If 2d is not divisible by 2^M
    """
    generator = hermitian_from_params(params.hermitian_params, params.dim_total)
    unitary = scipy.linalg.expm(1j * generator)
    return BroadcastChannel(unitary, spectrum_from_logits(params.simplex_params), copies)


def encode(channel: BroadcastChannel) -> ChannelParameterization:
    """Coordinates that decode back to ``channel`` up to rounding."""
    schur_form, vectors = scipy.linalg.schur(channel.unitary, output="complex")
    angles = np.angle(np.diag(schur_form))
    generator = hermitize((vectors * angles) @ vectors.conj().T)

    logs = np.log(np.maximum(channel.ancilla_spectrum, LOGIT_FLOOR))
    return ChannelParameterization(channel.dim, params_from_hermitian(generator), logs[:-1] - logs[-1])


def clone_fidelities(channel: BroadcastChannel, densities: np.ndarray) -> np.ndarray:
    """Fidelity of every copy against every input; shape (M, n) for densities of shape (n, 2, 2)."""
    rows = []
    for copy_index in range(channel.copies):
        outputs = np.einsum("nab,abij->nij", densities, copy_transfer(channel, copy_index))
        rows.append(qubit_fidelity_batch(outputs, densities))
    return np.stack(rows)


def _score(channel: BroadcastChannel, densities: np.ndarray) -> ConstancyScore:
    fidelities = clone_fidelities(channel, densities)
    means = fidelities.mean(axis=1)
    spreads = fidelities.max(axis=1) - fidelities.min(axis=1)
    return ConstancyScore(
        float(means.min()),
        float(spreads.max()),
        tuple(float(value) for value in means),
        tuple(float(value) for value in spreads),
    )


def constancy_objective(channel: BroadcastChannel, sample: StateSample) -> ConstancyScore:
    """
    Worst-clone constancy: spread is the largest per-copy (max - min) fidelity,
    mean the smallest per-copy mean fidelity.
    """
    if not len(sample):
        raise ValueError("state sample is empty")
    return _score(channel, sample.densities())


def _check_search_args(copies: int, ancilla_dim: int, budget: int, restarts: int) -> int:
    if budget < 1:
        raise SearchBudgetError(f"evaluation budget must be at least 1, got {budget}")
    if restarts < 1:
        raise SearchBudgetError(f"restart count must be at least 1, got {restarts}")
    if not 1 <= ancilla_dim <= MAX_ANCILLA_DIM:
        raise ValueError(f"ancilla dimension must lie in 1..{MAX_ANCILLA_DIM}, got {ancilla_dim}")
    dim_total = 2 * ancilla_dim
    if dim_total % 2 ** copies:
        raise DimensionError(f"2d = {dim_total} is not divisible by 2^{copies}")
    return dim_total


def minimize_spread_at_level(
    copies: int,
    ancilla_dim: int,
    target_level: float,
    sample: StateSample,
    budget: int = DEFAULT_BUDGET,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    initial: Optional[ChannelParameterization] = None,
    threads: Optional[int] = None,
) -> TradeoffPoint:
    """
    Minimise spread + 10 (mean - level)^2 over channels with Nelder-Mead restarts.

    Restart r starts from a box draw of default_rng([seed, r]); restart 0 starts
    from ``initial`` when given. The best restart wins, ties going to the lowest
    index, so the result does not depend on the thread count.

    Raises:
        SearchBudgetError: If budget or restarts is below 1
    """
    if not 0.0 < target_level <= 1.0:
        raise ValueError(f"target level must lie in (0, 1], got {target_level}")
    dim_total = _check_search_args(copies, ancilla_dim, budget, restarts)
    if not len(sample):
        raise ValueError("state sample is empty")
    if initial is not None and initial.dim_total != dim_total:
        raise DimensionError(f"initial parameters are for {initial.dim_total} levels, expected {dim_total}")
    densities = sample.densities()

    def objective(vector: np.ndarray) -> float:
        try:
            channel = decode(ChannelParameterization.from_vector(dim_total, vector), copies)
        except ValueError:
            return INFEASIBLE
        score = _score(channel, densities)
        return score.spread + PENALTY_WEIGHT * (score.mean - target_level) ** 2

    def run(restart: int) -> Tuple[float, int, ChannelParameterization]:
        rng = np.random.default_rng([seed, restart])
        if restart == 0 and initial is not None:
            start = initial.to_vector()
        else:
            start = ChannelParameterization.random(dim_total, rng).to_vector()
        result = minimize(
            objective,
            start,
            method="Nelder-Mead",
            options={"maxfev": budget, "adaptive": True, "xatol": 1e-12, "fatol": 1e-15},
        )
        logger.debug(
            "level %.4g restart %d: objective %.3e after %d evaluations",
            target_level, restart, result.fun, result.nfev,
        )
        return float(result.fun), int(result.nfev), ChannelParameterization.from_vector(dim_total, result.x)

    workers = max(1, min(restarts, threads or os.cpu_count() or 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(run, range(restarts)))

    best = min(range(restarts), key=lambda index: (outcomes[index][0], index))
    params = outcomes[best][2]
    score = _score(decode(params, copies), densities)
    used = sum(outcome[1] for outcome in outcomes)
    logger.info(
        "level %.4g: spread %.3e, mean %.6f (restart %d, %d evaluations)",
        target_level, score.spread, score.mean, best, used,
    )
    return TradeoffPoint(target_level, score.spread, score.mean, used, params, best)


def tradeoff_sweep(
    copies: int,
    ancilla_dim: int,
    levels: Iterable[float],
    sample: StateSample,
    budget: int = DEFAULT_BUDGET,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    threads: Optional[int] = None,
) -> TradeoffCurve:
    levels = sorted(float(level) for level in levels)
    _check_search_args(copies, ancilla_dim, budget, restarts)
    points: List[TradeoffPoint] = [
        minimize_spread_at_level(copies, ancilla_dim, level, sample, budget, restarts, seed, threads=threads)
        for level in levels
    ]
    return TradeoffCurve(tuple(points))


def negative_control(
    omega: float = 0.0,
    seed: int = 42,
    level: float = 0.5,
    budget: int = 200,
    restarts: int = 1,
    sample_size: int = DEFAULT_SAMPLE_SIZE,
    threads: Optional[int] = None,
) -> TradeoffPoint:
    """
    Search over a fixed-omega sample starting from the omega-DQCM.

    A spread near zero here shows the optimiser keeps a known constant-fidelity
    point once it has it.
    """
    sample = StateSample.generate(seed, sample_size, omega=omega)
    initial = encode(omega_dqcm(omega))
    return minimize_spread_at_level(
        DEFAULT_COPIES, DEFAULT_ANCILLA_DIM, level, sample, budget, restarts, seed,
        initial=initial, threads=threads,
    )
