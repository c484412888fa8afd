"""Leading-order error functionals of a finite pulse with a tilted rotation axis.

Ten scalar integrals decide which first-order deviations from an ideal
instantaneous pulse survive:

    eta_tau_1,2   duration errors              (t - tau_s) V sin/cos(phi_- - psi)
    eta_eps0_1,2  direction errors, order 0    V sin/cos(phi_- - psi)
    eta_eps0_3,4  direction errors, order 0    V sin/cos(phi_+)
    eta_eps1_1,2  direction errors, order 1    (t - tau_s) V sin/cos(phi_+)
    eta_eps1_3,4  direction errors, order 1    (t - tau_s) V sin/cos(phi_- - psi)

On every segment V is constant and phi_- - psi(t) is affine in t, so each
integral has an exact antiderivative; `QuadratureOracle` evaluates the same
integrals by adaptive quadrature as an independent check.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from models.pulse_core import DesignedPulse, cumulative_phase
from monitoring.error_handling import OracleError
from utils.config import get_settings

logger = logging.getLogger(__name__)

SERIES_THRESHOLD = 1e-8
ZERO_TOLERANCE = 1e-9


class Functional(Enum):
    """The ten error functionals, in CSV column order."""

    ETA_TAU_1 = "eta_tau_1"
    ETA_TAU_2 = "eta_tau_2"
    ETA_EPS0_1 = "eta_eps0_1"
    ETA_EPS0_2 = "eta_eps0_2"
    ETA_EPS0_3 = "eta_eps0_3"
    ETA_EPS0_4 = "eta_eps0_4"
    ETA_EPS1_1 = "eta_eps1_1"
    ETA_EPS1_2 = "eta_eps1_2"
    ETA_EPS1_3 = "eta_eps1_3"
    ETA_EPS1_4 = "eta_eps1_4"

    @property
    def label(self) -> str:
        """Conventional notation, e.g. eta_1^(eps,1)(tau_p,0)."""
        family, index = self.value.rsplit("_", 1)
        superscripts = {
            "eta_tau": "(tau_p,1)",
            "eta_eps0": "(eps,1)(tau_p,0)",
            "eta_eps1": "(eps,1)(tau_p,1)",
        }
        return f"eta_{index}^{superscripts[family]}"


FUNCTIONAL_ORDER: Tuple[Functional, ...] = tuple(Functional)


class PulseFamily(Enum):
    SYMMETRIC = "symmetric"
    ASYMMETRIC = "asymmetric"


class ZeroFlag(Enum):
    ZERO = "=0"
    NONZERO = "!=0"


@dataclass(frozen=True)
class CellGroup:
    """One group of the published symmetric/asymmetric comparison."""

    terms: Tuple[Functional, ...]
    symmetric: ZeroFlag
    asymmetric: ZeroFlag
    condition: str


PUBLISHED_CELLS: Tuple[CellGroup, ...] = (
    CellGroup(
        (Functional.ETA_TAU_1, Functional.ETA_TAU_2, Functional.ETA_EPS1_3, Functional.ETA_EPS1_4),
        ZeroFlag.ZERO,
        ZeroFlag.ZERO,
        "no AC",
    ),
    CellGroup(
        (Functional.ETA_EPS0_1, Functional.ETA_EPS0_4, Functional.ETA_EPS1_2),
        ZeroFlag.ZERO,
        ZeroFlag.ZERO,
        "Phi=pi",
    ),
    CellGroup(
        (Functional.ETA_EPS0_2, Functional.ETA_EPS0_3),
        ZeroFlag.NONZERO,
        ZeroFlag.NONZERO,
        "Phi=pi",
    ),
    CellGroup((Functional.ETA_EPS1_1,), ZeroFlag.ZERO, ZeroFlag.NONZERO, "triangle"),
)


@dataclass(frozen=True)
class ErrorBudget:
    """
    The ten functionals of one placed pulse, stored as epsilon-coefficients.

    `values()` multiplies the direction-error terms back by epsilon.
    """

    eta_tau_1: float
    eta_tau_2: float
    eta_eps0_1: float
    eta_eps0_2: float
    eta_eps0_3: float
    eta_eps0_4: float
    eta_eps1_1: float
    eta_eps1_2: float
    eta_eps1_3: float
    eta_eps1_4: float
    epsilon: float = 1.0
    tau_p: float = 1.0

    def coefficient(self, functional: Functional) -> float:
        return getattr(self, functional.value)

    def coefficients(self) -> Dict[Functional, float]:
        return {f: self.coefficient(f) for f in FUNCTIONAL_ORDER}

    def values(self) -> Dict[Functional, float]:
        """Functionals including the epsilon factor; duration terms carry none."""
        result = {}
        for functional in FUNCTIONAL_ORDER:
            value = self.coefficient(functional)
            if functional not in (Functional.ETA_TAU_1, Functional.ETA_TAU_2):
                value = self.epsilon * value
            result[functional] = value
        return result

    def as_row(self) -> List[float]:
        return [self.coefficient(f) for f in FUNCTIONAL_ORDER]


@dataclass(frozen=True)
class BudgetClassification:
    """Zero / nonzero flag per functional and the cut that produced it."""

    flags: Dict[Functional, ZeroFlag]
    tol: float
    threshold: float

    def flag(self, functional: Functional) -> ZeroFlag:
        return self.flags[functional]

    def row_flags(self, row: CellGroup) -> Tuple[ZeroFlag, ...]:
        return tuple(self.flags[f] for f in row.terms)


@dataclass
class _PhaseIntegrals:
    """Raw per-pulse integrals shared by all closed forms."""

    phi_plus: float = 0.0
    sin_term: float = 0.0  # integral V sin(phi_- - psi)
    cos_term: float = 0.0
    weighted_sin: float = 0.0  # integral (t - tau_s) V sin(phi_- - psi)
    weighted_cos: float = 0.0
    moment: float = 0.0  # integral (t - tau_s) V


def _segment_integrals(
    alpha: float, beta: float, d: float, threshold: float
) -> Tuple[float, float, float, float]:
    """
    Integrals over u in [0, d] of sin, cos, u*sin, u*cos of (alpha + beta*u).

    Uses product-to-sum forms to avoid subtracting nearly equal sines, and a
    Taylor branch when |beta*d| is below `threshold`.
    """
    bd = beta * d
    if abs(bd) < threshold:
        sa, ca = math.sin(alpha), math.cos(alpha)
        d2, d3, d4 = d * d, d * d * d, d * d * d * d
        b2 = beta * beta
        s0 = d * sa + beta * d2 / 2 * ca - b2 * d3 / 6 * sa
        c0 = d * ca - beta * d2 / 2 * sa - b2 * d3 / 6 * ca
        s1 = d2 / 2 * sa + beta * d3 / 3 * ca - b2 * d4 / 8 * sa
        c1 = d2 / 2 * ca - beta * d3 / 3 * sa - b2 * d4 / 8 * ca
        return s0, c0, s1, c1

    half = 0.5 * bd
    sin_half = math.sin(half)
    s0 = 2.0 * math.sin(alpha + half) * sin_half / beta
    c0 = 2.0 * math.cos(alpha + half) * sin_half / beta
    end = alpha + bd
    s1 = (c0 - d * math.cos(end)) / beta
    c1 = (d * math.sin(end) - s0) / beta
    return s0, c0, s1, c1


def _phase_integrals(pulse: DesignedPulse, threshold: float = SERIES_THRESHOLD) -> _PhaseIntegrals:
    shape = pulse.shape
    totals = _PhaseIntegrals(phi_plus=cumulative_phase(shape, shape.tau_p))

    start = 0.0
    accumulated = 0.0
    for segment in shape.segments:
        v, d = segment.amplitude, segment.duration
        offset = start - pulse.tau_s
        alpha = totals.phi_plus - 2.0 * accumulated
        beta = -2.0 * v

        s0, c0, s1, c1 = _segment_integrals(alpha, beta, d, threshold)
        totals.sin_term += v * s0
        totals.cos_term += v * c0
        totals.weighted_sin += v * (offset * s0 + s1)
        totals.weighted_cos += v * (offset * c0 + c1)
        totals.moment += v * (offset * d + 0.5 * d * d)

        accumulated += segment.area
        start += d
    return totals


def eta_tau(pulse: DesignedPulse) -> Tuple[float, float]:
    """Duration-error functionals (eta_1, eta_2) of the placed pulse."""
    integrals = _phase_integrals(pulse)
    return integrals.weighted_sin, integrals.weighted_cos


def _eps0_coefficients(integrals: _PhaseIntegrals) -> Tuple[float, float, float, float]:
    phi = integrals.phi_plus
    return (
        integrals.sin_term,
        integrals.cos_term,
        math.sin(phi) * phi,
        math.cos(phi) * phi,
    )


def _eps1_coefficients(integrals: _PhaseIntegrals) -> Tuple[float, float, float, float]:
    phi = integrals.phi_plus
    return (
        math.sin(phi) * integrals.moment,
        math.cos(phi) * integrals.moment,
        integrals.weighted_sin,
        integrals.weighted_cos,
    )


def eta_eps0(pulse: DesignedPulse, epsilon: float) -> Tuple[float, float, float, float]:
    """Zeroth-order-in-tau_p direction-error functionals, including epsilon."""
    coefficients = _eps0_coefficients(_phase_integrals(pulse))
    return tuple(epsilon * c for c in coefficients)  # type: ignore[return-value]


def eta_eps1(pulse: DesignedPulse, epsilon: float) -> Tuple[float, float, float, float]:
    """First-order-in-tau_p direction-error functionals, including epsilon."""
    coefficients = _eps1_coefficients(_phase_integrals(pulse))
    return tuple(epsilon * c for c in coefficients)  # type: ignore[return-value]


def eta1_asym_closed_form(tau_p: float, tau_1: float, tau_s: float, a_max: float) -> float:
    """a_max (tau_1^2 - tau_p^2/2 - 2 tau_1 tau_s + tau_p tau_s) for the two-segment pi pulse."""
    return a_max * (tau_1**2 - tau_p**2 / 2 - 2 * tau_1 * tau_s + tau_p * tau_s)


def error_budget(pulse: DesignedPulse, epsilon: float = 1.0) -> ErrorBudget:
    """All ten functionals of a pulse, as epsilon-coefficients."""
    integrals = _phase_integrals(pulse)
    eps0 = _eps0_coefficients(integrals)
    eps1 = _eps1_coefficients(integrals)
    return ErrorBudget(
        integrals.weighted_sin,
        integrals.weighted_cos,
        *eps0,
        *eps1,
        epsilon=epsilon,
        tau_p=pulse.tau_p,
    )


def classify_budget(budget: ErrorBudget, tol: float = ZERO_TOLERANCE) -> BudgetClassification:
    """
    Flag each functional as zero or nonzero.

    A coefficient counts as zero when |value| <= tol * max(1, tau_p).
    """
    threshold = tol * max(1.0, budget.tau_p)
    flags = {
        f: ZeroFlag.ZERO if abs(value) <= threshold else ZeroFlag.NONZERO
        for f, value in budget.coefficients().items()
    }
    return BudgetClassification(flags=flags, tol=tol, threshold=threshold)


def published_expectation(functional: Functional, family: PulseFamily) -> ZeroFlag:
    """Published zero / nonzero cell for a functional and pulse family."""
    for row in PUBLISHED_CELLS:
        if functional in row.terms:
            return row.symmetric if family == PulseFamily.SYMMETRIC else row.asymmetric
    raise KeyError(functional)


def compare_with_published(
    classification: BudgetClassification, family: PulseFamily
) -> List[Tuple[Functional, ZeroFlag, ZeroFlag]]:
    """List (functional, expected, measured) for every disagreeing cell."""
    mismatches = []
    for functional in FUNCTIONAL_ORDER:
        expected = published_expectation(functional, family)
        measured = classification.flag(functional)
        if expected != measured:
            mismatches.append((functional, expected, measured))
    return mismatches


class QuadratureOracle:
    """
    Adaptive quadrature evaluation of the functionals.

    Shares nothing with the closed forms beyond the pulse itself: phases are
    rebuilt from cumulative sums and every segment is integrated separately
    so the integrand is smooth on each piece.
    """

    def __init__(self, abs_tol: float = 1e-11, subdivisions: int = 200):
        self.abs_tol = abs_tol
        self.subdivisions = subdivisions

    def evaluate(self, pulse: DesignedPulse, functional: Functional, epsilon: float = 1.0) -> float:
        """
        Integrate one functional, including epsilon for direction terms.

        Raises:
            OracleError: if any segment fails to converge
        """
        durations = np.array(pulse.shape.durations)
        amplitudes = np.array(pulse.shape.amplitudes)
        edges = np.concatenate(([0.0], np.cumsum(durations)))
        areas = np.concatenate(([0.0], np.cumsum(durations * amplitudes)))
        phi_plus = float(areas[-1])
        tau_s = pulse.tau_s

        weight_for = self._weight(functional, tau_s)
        phase_for = self._phase(functional, phi_plus)

        total = 0.0
        for k in range(len(durations)):
            left, right = float(edges[k]), float(edges[k + 1])
            v = float(amplitudes[k])
            area_before = float(areas[k])

            def integrand(t: float, v=v, left=left, area_before=area_before) -> float:
                accumulated = area_before + v * (t - left)
                return weight_for(t) * v * phase_for(phi_plus - 2.0 * accumulated)

            total += self._integrate(integrand, left, right, functional, k)

        if functional in (Functional.ETA_TAU_1, Functional.ETA_TAU_2):
            return total
        return epsilon * total

    def evaluate_all(self, pulse: DesignedPulse, epsilon: float = 1.0) -> Dict[Functional, float]:
        return {f: self.evaluate(pulse, f, epsilon) for f in FUNCTIONAL_ORDER}

    def _integrate(self, integrand, left: float, right: float, functional: Functional, k: int) -> float:
        with warnings.catch_warnings():
            warnings.simplefilter("error", IntegrationWarning)
            try:
                value, _ = quad(
                    integrand,
                    left,
                    right,
                    epsabs=self.abs_tol,
                    epsrel=1e-12,
                    limit=self.subdivisions,
                )
            except IntegrationWarning as e:
                raise OracleError(
                    f"{functional.value}: quadrature did not converge on segment {k}: {e}"
                ) from e
        return value

    @staticmethod
    def _weight(functional: Functional, tau_s: float) -> Callable[[float], float]:
        if functional in (Functional.ETA_EPS0_1, Functional.ETA_EPS0_2,
                          Functional.ETA_EPS0_3, Functional.ETA_EPS0_4):
            return lambda t: 1.0
        return lambda t: t - tau_s

    @staticmethod
    def _phase(functional: Functional, phi_plus: float) -> Callable[[float], float]:
        # argument is phi_- - psi(t); the phi_+ terms ignore it
        if functional in (Functional.ETA_EPS0_3, Functional.ETA_EPS1_1):
            constant = math.sin(phi_plus)
            return lambda x: constant
        if functional in (Functional.ETA_EPS0_4, Functional.ETA_EPS1_2):
            constant = math.cos(phi_plus)
            return lambda x: constant
        if functional in (Functional.ETA_TAU_1, Functional.ETA_EPS0_1, Functional.ETA_EPS1_3):
            return math.sin
        return math.cos


def create_oracle(abs_tol: Optional[float] = None, subdivisions: Optional[int] = None) -> QuadratureOracle:
    """Create an oracle, taking unset parameters from settings."""
    settings = get_settings()
    return QuadratureOracle(
        abs_tol if abs_tol is not None else settings.quadrature_abs_tol,
        subdivisions if subdivisions is not None else settings.quadrature_subdivisions,
    )


def quadrature_oracle(pulse: DesignedPulse, functional: Functional, epsilon: float = 1.0) -> float:
    """Evaluate one functional with a default-configured oracle."""
    return QuadratureOracle().evaluate(pulse, functional, epsilon)
