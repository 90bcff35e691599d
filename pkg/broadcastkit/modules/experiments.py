"""
Command bodies for the broadcastkit CLI.

Each command takes a resolved RunConfig and returns a CommandResult; printing,
CSV emission and exit codes are handled by broadcastkit.cli.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import pandas as pd

from broadcastkit.core.channels import BroadcastChannel, clone_marginal, compute_coefficients
from broadcastkit.core.densops import QubitParams, qubit_from_params
from broadcastkit.core.fidelity import shrinking_factor, uhlmann_fidelity
from broadcastkit.modules.cloners import (
    bloch_length,
    gisin_massar_channel,
    known_basis_broadcaster,
    omega_dqcm,
    optimal_mixed_fidelity,
)
from broadcastkit.modules.nutsearch import (
    UNIVERSALITY_TOL,
    StateSample,
    clone_fidelities,
    negative_control,
    tradeoff_sweep,
)
from broadcastkit.utils.config_utils import RunConfig
from broadcastkit.utils.validation_utils import ParamValidator

logger = logging.getLogger(__name__)

EVIDENCE_NOTE = (
    "Search floors are numerical evidence, not proof: a finite search cannot "
    "certify that no universal broadcaster exists."
)

FIDELITY_CURVE_COLUMNS = ["lambda", "fidelity"]
CLONE_COLUMNS = [
    "copy", "x", "y_real", "y_imag", "fidelity", "bloch_length_in", "bloch_length_out", "shrinking_factor",
]
UNIVERSALITY_COLUMNS = [
    "theta", "omega", "e_x", "e_y_real", "e_y_imag", "r_x", "r_y", "fidelity_min", "fidelity_max",
]


@dataclass
class CommandResult:
    command: str
    frame: pd.DataFrame
    summary: List[str] = field(default_factory=list)
    universal: Optional[bool] = None
    evidence_note: Optional[str] = None


def build_machine(config: RunConfig) -> BroadcastChannel:
    """Construct the cloner named by config.machine from its machine_* settings."""
    machine = ParamValidator.validate_machine(config.machine)
    if machine == "gm":
        return gisin_massar_channel(ParamValidator.validate_gm_copies(config.M))
    if machine == "omega-dqcm":
        return omega_dqcm(config.machine_omega)
    copies = ParamValidator.validate_known_basis_copies(config.M)
    return known_basis_broadcaster(config.machine_theta, config.machine_omega, copies)


def cmd_fidelity_curve(config: RunConfig) -> CommandResult:
    copies = ParamValidator.validate_copies(config.M)
    steps = ParamValidator.validate_int(config.lambda_steps, "lambda_steps", minimum=2)
    lambdas = np.linspace(0.0, 1.0, steps)
    frame = pd.DataFrame({
        "lambda": lambdas,
        "fidelity": [optimal_mixed_fidelity(copies, float(lam)) for lam in lambdas],
    })
    summary = [
        f"optimal 1->{copies} fidelity on {steps} lambda points",
        f"minimum {frame['fidelity'].min():.10g} at lambda in {{0, 1}}, maximum 1 at lambda = 1/2",
    ]
    return CommandResult("fidelity-curve", frame[FIDELITY_CURVE_COLUMNS], summary)


def cmd_clone(config: RunConfig) -> CommandResult:
    channel = build_machine(config)
    params = QubitParams(config.theta, config.omega, config.lam)
    rho = qubit_from_params(params)
    length_in = bloch_length(rho)

    rows = []
    for copy_index in range(channel.copies):
        marginal = clone_marginal(channel, rho, copy_index)
        factor = shrinking_factor(rho, marginal)
        rows.append({
            "copy": copy_index,
            "x": float(marginal[0, 0].real),
            "y_real": float(marginal[0, 1].real),
            "y_imag": float(marginal[0, 1].imag),
            "fidelity": uhlmann_fidelity(marginal, rho),
            "bloch_length_in": length_in,
            "bloch_length_out": bloch_length(marginal),
            "shrinking_factor": math.nan if factor is None else factor,
        })
    frame = pd.DataFrame(rows, columns=CLONE_COLUMNS)
    summary = [
        f"machine {config.machine} with {channel.copies} copies, input (theta={params.theta:.10g}, "
        f"omega={params.omega:.10g}, lambda={params.lam:.10g})",
        f"worst clone fidelity {frame['fidelity'].min():.10g}",
    ]
    return CommandResult("clone", frame, summary)


def _grid(fixed: Optional[float], stop: float, steps: int, endpoint: bool) -> List[float]:
    if fixed is not None:
        return [float(fixed)]
    return [float(value) for value in np.linspace(0.0, stop, steps, endpoint=endpoint)]


def cmd_universality_check(config: RunConfig) -> CommandResult:
    """
    E_x / E_y residuals per (theta, omega) grid point plus the worst-clone fidelity
    spread over the (theta, omega, lambda) grid.
    """
    channel = build_machine(config)
    steps = ParamValidator.validate_int(config.grid_steps, "grid_steps", minimum=2)
    thetas = _grid(config.fixed_theta, math.pi / 2, steps, endpoint=True)
    omegas = _grid(config.fixed_omega, 2 * math.pi, steps, endpoint=False)
    lambdas = np.linspace(0.0, 1.0, steps)

    rows = []
    all_fidelities = []
    for theta in thetas:
        for omega in omegas:
            coefficients = compute_coefficients(channel, theta, omega)
            sample = StateSample(tuple(QubitParams(theta, omega, float(lam)) for lam in lambdas), config.seed)
            fidelities = clone_fidelities(channel, sample.densities())
            all_fidelities.append(fidelities)
            rows.append([
                theta, omega, coefficients.e_x, coefficients.e_y.real, coefficients.e_y.imag,
                abs(coefficients.e_x - 1.0), abs(coefficients.e_y),
                float(fidelities.min()), float(fidelities.max()),
            ])

    stacked = np.concatenate(all_fidelities, axis=1)
    spread = float(np.max(stacked.max(axis=1) - stacked.min(axis=1)))
    universal = spread < UNIVERSALITY_TOL
    frame = pd.DataFrame(rows, columns=UNIVERSALITY_COLUMNS)
    summary = [
        f"max |E_x - 1| = {frame['r_x'].max():.3e}, max |E_y| = {frame['r_y'].max():.3e}",
        f"worst-clone fidelity spread {spread:.3e} over {stacked.shape[1]} inputs",
        f"verdict at tolerance {UNIVERSALITY_TOL:g}: {'UNIVERSAL' if universal else 'NOT-UNIVERSAL'}",
    ]
    return CommandResult("universality-check", frame, summary, universal=universal)


def cmd_nut_sweep(config: RunConfig, with_negative_control: bool = False) -> CommandResult:
    """
    Raises:
        SearchBudgetError: If budget or restarts is below 1
    """
    copies = ParamValidator.validate_copies(config.M)
    levels = ParamValidator.validate_levels(config.levels)
    sample = StateSample.generate(config.seed, config.sample_size)
    logger.info("sweeping %d levels with %d states, budget %d x %d restarts",
                len(levels), len(sample), config.budget, config.restarts)

    curve = tradeoff_sweep(
        copies, config.d, levels, sample, config.budget, config.restarts, config.seed, threads=config.threads,
    )
    frame = curve.to_frame()

    summary = []
    universal = None
    if len(curve):
        universal = curve.any_universal(UNIVERSALITY_TOL)
        verdict = "a channel reached" if universal else "no channel reached"
        summary.append(f"minimum spread observed {curve.min_spread:.3e} over {len(curve)} levels")
        summary.append(f"{verdict} spread < {UNIVERSALITY_TOL:g} (evidence, not proof)")
    else:
        summary.append("no levels requested")

    if with_negative_control:
        point = negative_control(
            omega=config.machine_omega, seed=config.seed, budget=config.budget, threads=config.threads,
        )
        summary.append(
            f"negative control (fixed omega = {config.machine_omega:.6g}, seeded at the omega-DQCM): "
            f"spread {point.achieved_spread:.3e}, mean {point.achieved_mean:.10g}"
        )
    return CommandResult("nut-sweep", frame, summary, universal=universal, evidence_note=EVIDENCE_NOTE)
