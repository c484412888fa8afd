"""Piecewise-constant pulse shapes, their phase functions and the two canonical families.

Rotation-angle convention: a pulse with shape V(t) rotates by
2 * integral(V, 0, tau_p). A pi pulse therefore has integral(V) = pi/2, and the
phase phi_plus is half of the rotation angle.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from monitoring.error_handling import InvalidGeometryError, PulseDomainError

logger = logging.getLogger(__name__)

ANGLE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class Segment:
    """One constant stretch of a pulse."""

    duration: float
    amplitude: float

    @property
    def area(self) -> float:
        return self.duration * self.amplitude


@dataclass(frozen=True)
class PulseShape:
    """Piecewise-constant amplitude profile V(t) on [0, tau_p]."""

    segments: Tuple[Segment, ...]
    tau_p: float = field(init=False)

    def __post_init__(self):
        segments = tuple(
            s if isinstance(s, Segment) else Segment(float(s[0]), float(s[1]))
            for s in self.segments
        )
        if not segments:
            raise InvalidGeometryError("a pulse shape needs at least one segment")
        for index, segment in enumerate(segments):
            if not (math.isfinite(segment.duration) and math.isfinite(segment.amplitude)):
                raise InvalidGeometryError(f"segment {index} has non-finite values")
            if segment.duration <= 0:
                raise InvalidGeometryError(
                    f"segment {index} has non-positive duration {segment.duration!r}"
                )
        object.__setattr__(self, "segments", segments)
        object.__setattr__(self, "tau_p", sum(s.duration for s in segments))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]]) -> "PulseShape":
        """Build a shape from (duration, amplitude) pairs."""
        return cls(tuple(Segment(float(d), float(a)) for d, a in pairs))

    @property
    def durations(self) -> List[float]:
        return [s.duration for s in self.segments]

    @property
    def amplitudes(self) -> List[float]:
        return [s.amplitude for s in self.segments]

    def breakpoints(self) -> List[float]:
        """Segment start times followed by tau_p."""
        points = [0.0]
        for segment in self.segments:
            points.append(points[-1] + segment.duration)
        points[-1] = self.tau_p
        return points

    def value(self, t: float) -> float:
        """V(t), right-continuous at switch points; V(tau_p) is the last amplitude."""
        self._check_time(t)
        start = 0.0
        for segment in self.segments:
            start += segment.duration
            if t < start:
                return segment.amplitude
        return self.segments[-1].amplitude

    def _check_time(self, t: float):
        if not (0.0 <= t <= self.tau_p):
            raise PulseDomainError(f"t={t!r} outside [0, {self.tau_p!r}]")


@dataclass(frozen=True)
class PhasePair:
    """The accumulated phases phi_plus and phi_minus of a placed pulse."""

    phi_plus: float
    phi_minus: float


@dataclass(frozen=True)
class DesignedPulse:
    """A shape together with its placement instant tau_s and intended rotation angle."""

    shape: PulseShape
    tau_s: float
    intended_angle: float

    def __post_init__(self):
        if not (0.0 <= self.tau_s <= self.shape.tau_p):
            raise PulseDomainError(
                f"tau_s={self.tau_s!r} outside [0, {self.shape.tau_p!r}]"
            )
        angle = rotation_angle(self.shape)
        if abs(angle - self.intended_angle) > ANGLE_TOLERANCE:
            raise InvalidGeometryError(
                f"shape rotates by {angle!r}, intended angle is {self.intended_angle!r}"
            )

    @classmethod
    def create(
        cls, shape: PulseShape, tau_s: Optional[float] = None, intended_angle: Optional[float] = None
    ) -> "DesignedPulse":
        """Place a shape, defaulting to the midpoint and to the shape's own angle."""
        if tau_s is None:
            tau_s = shape.tau_p / 2
        if intended_angle is None:
            intended_angle = rotation_angle(shape)
        return cls(shape, tau_s, intended_angle)

    @property
    def tau_p(self) -> float:
        return self.shape.tau_p


def cumulative_phase(shape: PulseShape, t: float) -> float:
    """
    Exact integral of V from 0 to t.

    Args:
        shape: Pulse shape
        t: Upper limit, inside [0, tau_p]

    Returns:
        Accumulated phase as a sum of duration x amplitude pieces
    """
    if not (0.0 <= t <= shape.tau_p):
        raise PulseDomainError(f"t={t!r} outside [0, {shape.tau_p!r}]")

    total = 0.0
    start = 0.0
    for segment in shape.segments:
        end = start + segment.duration
        if t >= end:
            total += segment.area
            start = end
            continue
        return total + segment.amplitude * (t - start)
    return total


def rotation_angle(shape: PulseShape) -> float:
    """Total rotation angle, twice the pulse area."""
    return 2.0 * cumulative_phase(shape, shape.tau_p)


def phase_functions(pulse: DesignedPulse) -> Tuple[PhasePair, Callable[[float], float]]:
    """
    Phases of a placed pulse.

    Returns:
        (PhasePair, psi) where psi(t) = 2 * integral(V, tau_s, t)
    """
    shape = pulse.shape
    phi_plus = cumulative_phase(shape, shape.tau_p)
    before = cumulative_phase(shape, pulse.tau_s)
    phi_minus = phi_plus - 2.0 * before

    def psi(t: float) -> float:
        return 2.0 * (cumulative_phase(shape, t) - before)

    return PhasePair(phi_plus=phi_plus, phi_minus=phi_minus), psi


def phase_difference(pulse: DesignedPulse, t: float) -> float:
    """phi_minus - psi(t), which reduces to phi_plus - 2 * integral(V, 0, t)."""
    phi_plus = cumulative_phase(pulse.shape, pulse.shape.tau_p)
    return phi_plus - 2.0 * cumulative_phase(pulse.shape, t)


def is_symmetric(shape: PulseShape, tol: float = 1e-10) -> bool:
    """
    Check V(t) = V(tau_p - t).

    Compares V at the midpoint of every cell of the partition refined by the
    mirrored switch points. Each switch point borders two such cells, so both
    of its one-sided limits are compared, and every segment midpoint lies in
    one of them.
    """
    tau_p = shape.tau_p
    points = shape.breakpoints()

    refined = sorted(set(points) | {tau_p - p for p in points if 0.0 <= tau_p - p <= tau_p})
    min_cell = 1e-12 * max(1.0, tau_p)
    for left, right in zip(refined, refined[1:]):
        if right - left <= min_cell:
            continue
        mid = 0.5 * (left + right)
        mirrored = min(max(tau_p - mid, 0.0), tau_p)
        if abs(shape.value(mid) - shape.value(mirrored)) > tol:
            return False
    return True


def make_symmetric(tau_p: float, tau_1: float, a_max: float) -> PulseShape:
    """
    Three-segment symmetric shape: -a_max, +a_max, -a_max.

    Rotation angle is 2 * a_max * (tau_p - 4 * tau_1).
    """
    if a_max <= 0:
        raise InvalidGeometryError(f"a_max must be positive, got {a_max!r}")
    if not (0.0 < tau_1 < tau_p / 2):
        raise InvalidGeometryError(
            f"symmetric shape needs 0 < tau_1 < tau_p/2, got tau_1={tau_1!r}, tau_p={tau_p!r}"
        )
    return PulseShape(
        (
            Segment(tau_1, -a_max),
            Segment(tau_p - 2.0 * tau_1, a_max),
            Segment(tau_1, -a_max),
        )
    )


def make_asymmetric(tau_p: float, tau_1: float, a_max: float) -> PulseShape:
    """
    Two-segment shape: +a_max until tau_1, then -a_max.

    Rotation angle is 2 * a_max * (2 * tau_1 - tau_p).
    """
    if a_max <= 0:
        raise InvalidGeometryError(f"a_max must be positive, got {a_max!r}")
    if not (0.0 < tau_1 < tau_p):
        raise InvalidGeometryError(
            f"asymmetric shape needs 0 < tau_1 < tau_p, got tau_1={tau_1!r}, tau_p={tau_p!r}"
        )
    return PulseShape((Segment(tau_1, a_max), Segment(tau_p - tau_1, -a_max)))


def asymmetric_family(n: int, tau_p: float) -> DesignedPulse:
    """
    The asymmetric pi pulse family indexed by a positive integer n.

    tau_1 = (2n+1) tau_p / (4n), a_max = pi n / tau_p and
    tau_s = tau_p (1/2 + (-1)^n / (2 n pi)).
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise PulseDomainError(f"family index must be a positive integer, got {n!r}")
    if tau_p <= 0:
        raise PulseDomainError(f"tau_p must be positive, got {tau_p!r}")
    n = int(n)

    tau_1 = (2 * n + 1) * tau_p / (4 * n)
    a_max = math.pi * n / tau_p
    sign = -1.0 if n % 2 else 1.0
    shape = make_asymmetric(tau_p, tau_1, a_max)
    tau_s = tau_p * (0.5 + sign / (2 * n * math.pi))
    return DesignedPulse(shape, tau_s, math.pi)


def constant_pulse(tau_p: float, angle: float = math.pi) -> DesignedPulse:
    """Single-segment pulse of the given angle placed at its midpoint."""
    if tau_p <= 0:
        raise PulseDomainError(f"tau_p must be positive, got {tau_p!r}")
    shape = PulseShape((Segment(tau_p, angle / (2.0 * tau_p)),))
    return DesignedPulse(shape, shape.tau_p / 2, rotation_angle(shape))


def scale_pulse(pulse: DesignedPulse, factor: float) -> DesignedPulse:
    """Stretch time by `factor` and divide amplitudes by it; the angle is kept."""
    if factor <= 0:
        raise PulseDomainError(f"scale factor must be positive, got {factor!r}")
    shape = PulseShape(
        tuple(Segment(s.duration * factor, s.amplitude / factor) for s in pulse.shape.segments)
    )
    tau_s = min(pulse.tau_s * factor, shape.tau_p)
    return DesignedPulse(shape, tau_s, rotation_angle(shape))


def rescale_to_angle(shape: PulseShape, angle: float) -> PulseShape:
    """Multiply all amplitudes so that the shape rotates by `angle`."""
    current = rotation_angle(shape)
    if current == 0.0:
        raise InvalidGeometryError("cannot rescale a shape with zero rotation angle")
    factor = angle / current
    return PulseShape(tuple(Segment(s.duration, s.amplitude * factor) for s in shape.segments))


def mirror_symmetric(half: PulseShape) -> PulseShape:
    """Append the time reverse of `half`, giving a shape with V(t) = V(tau_p - t)."""
    return PulseShape(half.segments + tuple(reversed(half.segments)))
