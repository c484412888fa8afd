"""Brute-force evolution of a finite pulse and leading-order error checks.

The pulse is propagated exactly, segment by segment, and compared with the
ideal instantaneous pulse placed at tau_s. The deviation in the control
frame is compared against the operator error assembled from the scalar
functionals, and convergence orders are measured by log-log fits.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from models.error_functionals import eta_eps0, eta_eps1, eta_tau
from models.operator_algebra import (
    InvolutionOperator,
    as_operator,
    commutator,
    hermitian_propagator,
    hermiticity_residual,
    is_hermitian,
    operator_norm,
    split_by_involution,
)
from models.pulse_core import DesignedPulse, cumulative_phase, scale_pulse
from monitoring.error_handling import DegenerateFitError, OperatorContractError
from monitoring.observability import get_metrics
from utils.config import get_settings

logger = logging.getLogger(__name__)

OMEGA_PRIME_TOLERANCE = 1e-12
MIN_SCALING_SAMPLES = 4


@dataclass(frozen=True, eq=False)
class SystemModel:
    """System plus bath Hamiltonian H, control axis Omega and axis tilt epsilon * Omega'."""

    H: np.ndarray
    omega: InvolutionOperator
    omega_prime: np.ndarray
    epsilon: float

    def __post_init__(self):
        h = as_operator(self.H)
        omega_prime = as_operator(self.omega_prime)
        dimension = self.omega.dimension
        if h.shape[0] != dimension or omega_prime.shape[0] != dimension:
            raise OperatorContractError(
                f"dimension mismatch: H {h.shape}, Omega {self.omega.matrix.shape}, "
                f"Omega' {omega_prime.shape}"
            )
        if hermiticity_residual(omega_prime) > OMEGA_PRIME_TOLERANCE:
            raise OperatorContractError("Omega' must be Hermitian")
        if not is_hermitian(h):
            raise OperatorContractError("H must be Hermitian")
        if not math.isfinite(self.epsilon):
            raise OperatorContractError(f"epsilon must be finite, got {self.epsilon!r}")
        object.__setattr__(self, "H", h)
        object.__setattr__(self, "omega_prime", omega_prime)

    @property
    def dimension(self) -> int:
        return self.omega.dimension

    def with_epsilon(self, epsilon: float) -> "SystemModel":
        return SystemModel(self.H, self.omega, self.omega_prime, epsilon)


@dataclass(frozen=True, eq=False)
class ErrorComponents:
    """The three leading-order operator errors and their sum."""

    duration: np.ndarray
    direction_zeroth: np.ndarray
    direction_first: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.duration + self.direction_zeroth + self.direction_first


class ScalingMetric(Enum):
    DEVIATION = "deviation"
    REMAINDER = "remainder"
    RELATIVE_REMAINDER = "relative_remainder"


@dataclass
class ScalingSeries:
    """Norms measured along a geometric sweep and their log-log fit."""

    samples: List[Tuple[float, float]]
    fitted_slope: float
    fit_residual: float
    metric: ScalingMetric = ScalingMetric.DEVIATION
    diagnostics: List[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.samples) < MIN_SCALING_SAMPLES:
            raise DegenerateFitError(
                f"a scaling series needs at least {MIN_SCALING_SAMPLES} samples"
            )
        params = [p for p, _ in self.samples]
        ratios = [b / a for a, b in zip(params, params[1:])]
        if any(r >= 1.0 for r in ratios) or max(ratios) - min(ratios) > 1e-9:
            raise DegenerateFitError("parameters must decrease by a constant ratio")

    @property
    def ok(self) -> bool:
        return not self.diagnostics


def _identity(dimension: int) -> np.ndarray:
    return np.eye(dimension, dtype=complex)


def propagate(model: SystemModel, pulse: DesignedPulse) -> np.ndarray:
    """
    U(tau_p, 0) for the piecewise-constant control.

    Later segments multiply on the left.
    """
    generator_axis = model.omega.matrix + model.epsilon * model.omega_prime
    unitary = _identity(model.dimension)
    for segment in pulse.shape.segments:
        generator = model.H + segment.amplitude * generator_axis
        unitary = hermitian_propagator(generator, segment.duration) @ unitary
    return unitary


def instantaneous_control(model: SystemModel, pulse: DesignedPulse) -> np.ndarray:
    """P_Omega = cos(phi_+) - i sin(phi_+) Omega."""
    phi_plus = cumulative_phase(pulse.shape, pulse.tau_p)
    return math.cos(phi_plus) * _identity(model.dimension) - 1j * math.sin(phi_plus) * model.omega.matrix


def ideal_target(model: SystemModel, pulse: DesignedPulse) -> np.ndarray:
    """Free evolution around an instantaneous pulse applied at tau_s."""
    after = hermitian_propagator(model.H, pulse.tau_p - pulse.tau_s)
    before = hermitian_propagator(model.H, pulse.tau_s)
    return after @ instantaneous_control(model, pulse) @ before


def control_frame_error(model: SystemModel, pulse: DesignedPulse) -> np.ndarray:
    """delta P = U_C - P_Omega, with the free evolution stripped from both sides of U."""
    undo_after = hermitian_propagator(model.H, -(pulse.tau_p - pulse.tau_s))
    undo_before = hermitian_propagator(model.H, -pulse.tau_s)
    u_control = undo_after @ propagate(model, pulse) @ undo_before
    return u_control - instantaneous_control(model, pulse)


def eta_components(model: SystemModel, pulse: DesignedPulse) -> ErrorComponents:
    """
    Assemble the leading-order operator error from the scalar functionals.

    H and Omega' are split into parts anticommuting (a) and commuting (c)
    with Omega; each scalar is multiplied by its operator prefactor.
    """
    omega = model.omega.matrix
    h_a, h_c = split_by_involution(model.H, model.omega)
    w_a, w_c = split_by_involution(model.omega_prime, model.omega)

    tau_1, tau_2 = eta_tau(pulse)
    duration = 2j * h_a * tau_1 + 2.0 * (h_a @ omega) * tau_2

    z1, z2, z3, z4 = eta_eps0(pulse, model.epsilon)
    direction_zeroth = (
        -(omega @ w_a) * z1 - 1j * w_a * z2 - (omega @ w_c) * z3 - 1j * w_c * z4
    )

    f1, f2, f3, f4 = eta_eps1(pulse, model.epsilon)
    commuting = commutator(h_a, w_a) + commutator(h_c, w_c)
    cross = 2.0 * (h_a @ w_c + h_c @ w_a)
    direction_first = (
        -1j * (omega @ commuting) * f1
        + commuting * f2
        - 1j * (omega @ cross) * f3
        + cross * f4
    )

    return ErrorComponents(duration, direction_zeroth, direction_first)


def assemble_eta(model: SystemModel, pulse: DesignedPulse) -> np.ndarray:
    return eta_components(model, pulse).total


def commutator_grouping_residual(model: SystemModel) -> float:
    """
    Norm of the Omega-anticommuting part of [H, Omega'] minus 2(H_a Omega'_c + H_c Omega'_a).

    Zero when the cross-term grouping used by `eta_components` is exact for
    this model.
    """
    h_a, h_c = split_by_involution(model.H, model.omega)
    w_a, w_c = split_by_involution(model.omega_prime, model.omega)
    anti, _ = split_by_involution(commutator(model.H, model.omega_prime), model.omega)
    return operator_norm(anti - 2.0 * (h_a @ w_c + h_c @ w_a))


def default_tau_p(model: SystemModel, scale: Optional[float] = None) -> float:
    """Pulse duration scale / ||H||, or scale itself when H vanishes."""
    if scale is None:
        scale = get_settings().default_tau_p_scale
    norm = operator_norm(model.H)
    return scale / norm if norm > 0 else scale


def fit_scaling(samples: Sequence[Tuple[float, float]]) -> Tuple[float, float]:
    """
    Least-squares slope of log(value) against log(parameter).

    Returns:
        (slope, residual) where residual is the largest absolute deviation
        from the fitted line in log space

    Raises:
        DegenerateFitError: fewer than four samples or non-positive entries
    """
    if len(samples) < MIN_SCALING_SAMPLES:
        raise DegenerateFitError(f"need at least {MIN_SCALING_SAMPLES} samples, got {len(samples)}")
    params = np.array([p for p, _ in samples], dtype=float)
    values = np.array([v for _, v in samples], dtype=float)
    if np.any(params <= 0) or np.any(values <= 0):
        raise DegenerateFitError("scaling fit needs positive parameters and values")

    x = np.log(params)
    y = np.log(values)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.max(np.abs(y - (slope * x + intercept))))
    return float(slope), residual


def _evaluate_metric(model: SystemModel, pulse: DesignedPulse, metric: ScalingMetric) -> float:
    if metric == ScalingMetric.DEVIATION:
        return operator_norm(propagate(model, pulse) - ideal_target(model, pulse))

    delta = control_frame_error(model, pulse)
    remainder = operator_norm(delta - assemble_eta(model, pulse))
    if metric == ScalingMetric.REMAINDER:
        return remainder
    delta_norm = operator_norm(delta)
    if delta_norm == 0.0:
        raise DegenerateFitError("relative remainder undefined: delta P vanishes")
    return remainder / delta_norm


def scaling_sweep(
    model: SystemModel,
    pulse: DesignedPulse,
    metric: ScalingMetric = ScalingMetric.DEVIATION,
    shrink_factor: Optional[float] = None,
    steps: Optional[int] = None,
    workers: Optional[int] = None,
) -> ScalingSeries:
    """
    Shrink the pulse by shrink_factor**k, k = 0..steps-1, and fit the metric.

    The deviation metric keeps epsilon fixed; the remainder metrics shrink
    epsilon together with tau_p. Points may be evaluated concurrently and are
    collected in k order.
    """
    settings = get_settings()
    shrink_factor = settings.shrink_factor if shrink_factor is None else shrink_factor
    steps = settings.scaling_steps if steps is None else steps
    workers = settings.sweep_workers if workers is None else workers

    if not (0.0 < shrink_factor < 1.0):
        raise DegenerateFitError(f"shrink factor must lie in (0, 1), got {shrink_factor!r}")
    if steps < MIN_SCALING_SAMPLES:
        raise DegenerateFitError(f"need at least {MIN_SCALING_SAMPLES} steps, got {steps}")

    metrics = get_metrics()
    joint = metric != ScalingMetric.DEVIATION

    def evaluate(k: int) -> Tuple[float, float]:
        start = time.perf_counter()
        factor = shrink_factor**k
        scaled = scale_pulse(pulse, factor)
        scaled_model = model.with_epsilon(model.epsilon * factor) if joint else model
        value = _evaluate_metric(scaled_model, scaled, metric)
        metrics.record_timer("scaling_point_ms", (time.perf_counter() - start) * 1000)
        return scaled.tau_p, value

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        samples = list(pool.map(evaluate, range(steps)))

    slope, residual = fit_scaling(samples)
    diagnostics = []
    if residual > settings.fit_residual_threshold:
        diagnostics.append(
            f"fit residual {residual:.3g} exceeds {settings.fit_residual_threshold:.3g}"
        )

    logger.info(
        f"Scaling sweep {metric.value}: slope={slope:.4f}, residual={residual:.3g}, steps={steps}"
    )
    return ScalingSeries(samples, slope, residual, metric, diagnostics)


def leading_order_agreement(
    model: SystemModel,
    pulse: DesignedPulse,
    shrink_factor: Optional[float] = None,
    steps: Optional[int] = None,
) -> ScalingSeries:
    """
    Joint (tau_p, epsilon) shrink of ||delta P - eta||.

    The remainder is second order in the joint small parameters, so the
    fitted slope must reach 2 - slope_tolerance. Shortfalls are reported in
    `diagnostics`.
    """
    settings = get_settings()
    series = scaling_sweep(model, pulse, ScalingMetric.REMAINDER, shrink_factor, steps)
    required = 2.0 - settings.slope_tolerance
    if series.fitted_slope < required:
        series.diagnostics.append(
            f"remainder slope {series.fitted_slope:.4f} below {required:.4f}"
        )
        logger.warning(f"Leading-order agreement failed: {series.diagnostics}")
    return series


def deviation_scaling(
    model: SystemModel,
    pulse: DesignedPulse,
    shrink_factor: Optional[float] = None,
    steps: Optional[int] = None,
) -> ScalingSeries:
    """||U - target|| under a tau_p-only shrink."""
    return scaling_sweep(model, pulse, ScalingMetric.DEVIATION, shrink_factor, steps)
