"""First-order-optimized pi pulse design.

A pulse is first-order optimized when both duration-error functionals
vanish. The symmetric three-segment ansatz is solved numerically in the
dimensionless switching time u = tau_1 / tau_p; the asymmetric family is
taken in closed form and re-verified.
"""

import logging
import math
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator
from scipy.optimize import brentq

from models.error_functionals import PulseFamily, eta_tau
from models.pulse_core import (
    DesignedPulse,
    asymmetric_family,
    make_symmetric,
    rotation_angle,
)
from monitoring.error_handling import DesignFailure, PulseDomainError, VerificationFailure
from monitoring.observability import get_metrics
from utils.config import get_settings

logger = logging.getLogger(__name__)


class DesignSpec(BaseModel):
    """What to design."""

    tau_p: float = Field(..., gt=0, description="Pulse duration")
    target_angle: float = Field(math.pi, gt=0, le=2 * math.pi, description="Rotation angle")
    family: PulseFamily = PulseFamily.SYMMETRIC
    n: int = Field(1, ge=1, description="Asymmetric family index")


class DesignReport(BaseModel):
    """Outcome of checking the first-order design conditions."""

    verified: bool
    eta_tau_1: float
    eta_tau_2: float
    tolerance: float
    rotation_angle: float
    notes: List[str] = Field(default_factory=list)

    @field_validator("tolerance")
    @classmethod
    def _positive_tolerance(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("tolerance must be positive")
        return value


class PulseDesigner:
    """Designs symmetric and asymmetric pi pulses with vanishing duration errors."""

    def __init__(self, scan_points: int = 512, xtol: float = 1e-12, tolerance: float = 1e-9):
        """
        Initialize the designer.

        Args:
            scan_points: Grid size used to bracket the first root in u
            xtol: Root-finder tolerance on u = tau_1 / tau_p
            tolerance: Acceptance bound on |eta_tau_1|, |eta_tau_2|
        """
        if scan_points < 2:
            raise ValueError("scan_points must be at least 2")
        self.scan_points = scan_points
        self.xtol = xtol
        self.tolerance = tolerance

    @staticmethod
    def _unit_symmetric(u: float) -> DesignedPulse:
        # unit duration, amplitude fixed by the pi-rotation constraint
        a_max = (math.pi / 2) / (1.0 - 4.0 * u)
        shape = make_symmetric(1.0, u, a_max)
        return DesignedPulse.create(shape, shape.tau_p / 2)

    def _objective(self, u: float) -> float:
        return eta_tau(self._unit_symmetric(u))[0]

    def bracket_first_root(self) -> Tuple[float, float]:
        """
        Scan u over (0, 1/4) and return the first sign-change bracket.

        Raises:
            DesignFailure: with the scanned (u, eta_1) values if no sign change exists
        """
        grid = [0.25 * j / self.scan_points for j in range(1, self.scan_points)]
        scanned = [(u, self._objective(u)) for u in grid]

        for (u_left, f_left), (u_right, f_right) in zip(scanned, scanned[1:]):
            if f_left == 0.0:
                return u_left, u_left
            if f_left * f_right < 0:
                return u_left, u_right

        raise DesignFailure(
            "no sign change of eta_tau_1 found for tau_1 in (0, tau_p/4)", scanned=scanned
        )

    def solve_unit_switch_time(self) -> float:
        """Smallest u = tau_1 / tau_p with eta_tau_1 = 0."""
        with get_metrics().timed("design_root_ms"):
            left, right = self.bracket_first_root()
            if left == right:
                return left
            return brentq(self._objective, left, right, xtol=self.xtol)

    def design_symmetric_pi(self, tau_p: float) -> DesignedPulse:
        """
        Symmetric pi pulse with eta_tau_1 = eta_tau_2 = 0, placed at tau_p / 2.

        eta_tau_2 vanishes by symmetry; eta_tau_1 is zeroed by the root find.
        """
        if tau_p <= 0:
            raise PulseDomainError(f"tau_p must be positive, got {tau_p!r}")

        u = self.solve_unit_switch_time()
        tau_1 = u * tau_p
        a_max = (math.pi / 2) / ((1.0 - 4.0 * u) * tau_p)
        shape = make_symmetric(tau_p, tau_1, a_max)
        pulse = DesignedPulse(shape, shape.tau_p / 2, math.pi)

        logger.info(
            f"Designed symmetric pi pulse: tau_p={tau_p!r}, tau_1/tau_p={u!r}, "
            f"a_max*tau_p={a_max * tau_p!r}"
        )
        return pulse

    def design_asymmetric_pi(self, tau_p: float, n: int) -> DesignedPulse:
        """
        Member n of the asymmetric pi family, re-verified.

        Raises:
            VerificationFailure: carrying the DesignReport when the duration
                errors do not vanish within tolerance
        """
        pulse = asymmetric_family(n, tau_p)
        verified, report = verify_first_order(pulse, self.tolerance)
        if not verified:
            logger.warning(
                f"Asymmetric family n={n} fails first-order conditions: "
                f"eta_tau=({report.eta_tau_1!r}, {report.eta_tau_2!r})"
            )
            raise VerificationFailure(
                f"asymmetric family n={n} does not satisfy eta_tau = 0 within {self.tolerance}",
                report=report,
            )
        return pulse

    def design(self, spec: DesignSpec) -> DesignedPulse:
        """Dispatch on the requested family."""
        if abs(spec.target_angle - math.pi) > 1e-12:
            raise PulseDomainError("only pi pulses can be designed")
        if spec.family == PulseFamily.SYMMETRIC:
            return self.design_symmetric_pi(spec.tau_p)
        return self.design_asymmetric_pi(spec.tau_p, spec.n)


def verify_first_order(pulse: DesignedPulse, tol: float = 1e-9) -> Tuple[bool, DesignReport]:
    """
    Check |eta_tau_1| <= tol and |eta_tau_2| <= tol.

    Returns:
        (verified, report)
    """
    eta_1, eta_2 = eta_tau(pulse)
    angle = rotation_angle(pulse.shape)
    verified = abs(eta_1) <= tol and abs(eta_2) <= tol

    notes = []
    if abs(angle) <= 1e-12:
        notes.append("zero rotation angle: degenerate pulse")
    if not verified:
        notes.append("duration errors do not vanish")

    report = DesignReport(
        verified=verified,
        eta_tau_1=eta_1,
        eta_tau_2=eta_2,
        tolerance=tol,
        rotation_angle=angle,
        notes=notes,
    )
    return verified, report


def create_designer(
    scan_points: Optional[int] = None, xtol: Optional[float] = None, tolerance: Optional[float] = None
) -> PulseDesigner:
    """Create a designer, taking unset parameters from settings."""
    settings = get_settings()
    return PulseDesigner(
        scan_points if scan_points is not None else settings.design_scan_points,
        xtol if xtol is not None else settings.design_xtol,
        tolerance if tolerance is not None else settings.design_tolerance,
    )


def design_symmetric_pi(tau_p: float) -> DesignedPulse:
    return create_designer().design_symmetric_pi(tau_p)


def design_asymmetric_pi(tau_p: float, n: int) -> DesignedPulse:
    return create_designer().design_asymmetric_pi(tau_p, n)
