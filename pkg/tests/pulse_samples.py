"""Seeded random pulse generators shared by the property suites."""

import math

import numpy as np

from models.pulse_core import (
    DesignedPulse,
    PulseShape,
    Segment,
    mirror_symmetric,
    rescale_to_angle,
)


def random_shape(rng: np.random.Generator, min_segments: int = 2, max_segments: int = 8) -> PulseShape:
    """Random piecewise-constant shape: 2-8 segments, amplitudes in [-10, 10], tau_p in [0.1, 2]."""
    count = int(rng.integers(min_segments, max_segments + 1))
    weights = rng.uniform(0.05, 1.0, size=count)
    tau_p = rng.uniform(0.1, 2.0)
    durations = weights / weights.sum() * tau_p
    amplitudes = rng.uniform(-10.0, 10.0, size=count)
    return PulseShape(tuple(Segment(float(d), float(a)) for d, a in zip(durations, amplitudes)))


def random_pi_pulse(rng: np.random.Generator) -> DesignedPulse:
    """Random shape rescaled to a pi rotation, placed at a random tau_s."""
    while True:
        shape = random_shape(rng)
        # keep the rescaled amplitudes moderate
        if abs(sum(s.area for s in shape.segments)) > 0.2:
            break
    shape = rescale_to_angle(shape, math.pi)
    return DesignedPulse.create(shape, float(rng.uniform(0.0, shape.tau_p)), math.pi)


def random_symmetric_pi_pulse(rng: np.random.Generator) -> DesignedPulse:
    """Random half mirrored into a symmetric pi pulse placed at tau_p / 2."""
    while True:
        half = random_shape(rng, 1, 4)
        if abs(sum(s.area for s in half.segments)) > 0.1:
            break
    shape = rescale_to_angle(mirror_symmetric(half), math.pi)
    return DesignedPulse.create(shape, shape.tau_p / 2, math.pi)
