"""Reading and writing pulse description files and operator matrix files.

Pulse files hold one "<duration> <amplitude>" pair per line. Lines starting
with '#' and blank lines are skipped. Optional header lines "tau_s <value>"
and "angle <value>" place the pulse and state its intended rotation angle.
"""

import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from models.pulse_core import (
    ANGLE_TOLERANCE,
    DesignedPulse,
    PulseShape,
    Segment,
    rotation_angle,
)
from monitoring.error_handling import InvalidGeometryError, PulseDomainError, PulseParseError

logger = logging.getLogger(__name__)

HEADER_KEYS = ("tau_s", "angle")


def _parse_float(token: str, line_number: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise PulseParseError(line_number, f"{what} is not a number: {token!r}") from None
    if not math.isfinite(value):
        raise PulseParseError(line_number, f"{what} is not finite: {token!r}")
    return value


def _scan(text: str) -> Tuple[List[Segment], Dict[str, float], int]:
    segments: List[Segment] = []
    headers: Dict[str, float] = {}
    line_count = 0

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line_count = line_number
        line = raw.strip()
        if not line or line.startswith("#"):
            continue

        tokens = line.split()
        if len(tokens) != 2:
            raise PulseParseError(
                line_number, f"expected two fields, found {len(tokens)}: {line!r}"
            )

        key = tokens[0].lower()
        if key in HEADER_KEYS:
            if key in headers:
                raise PulseParseError(line_number, f"duplicate header {key!r}")
            headers[key] = _parse_float(tokens[1], line_number, key)
            continue

        duration = _parse_float(tokens[0], line_number, "duration")
        amplitude = _parse_float(tokens[1], line_number, "amplitude")
        if duration <= 0:
            raise PulseParseError(line_number, f"non-positive duration {duration!r}")
        segments.append(Segment(duration, amplitude))

    if not segments:
        raise PulseParseError(line_count, "no segments found")
    return segments, headers, line_count


def parse_pulse_file(text: str) -> PulseShape:
    """
    Parse pulse file text into a shape.

    Args:
        text: File contents

    Returns:
        PulseShape with segments in file order

    Raises:
        PulseParseError: naming the offending line
    """
    segments, _, _ = _scan(text)
    return PulseShape(tuple(segments))


def parse_designed_pulse(text: str, default_tau_s: Optional[float] = None) -> DesignedPulse:
    """
    Parse pulse file text into a placed pulse.

    tau_s defaults to `default_tau_s`, then to the midpoint; the angle
    defaults to the rotation angle of the parsed shape.
    """
    segments, headers, line_count = _scan(text)
    shape = PulseShape(tuple(segments))

    tau_s = headers.get("tau_s", default_tau_s)
    if tau_s is None:
        tau_s = shape.tau_p / 2

    actual = rotation_angle(shape)
    angle = headers.get("angle", actual)
    if abs(angle - actual) > ANGLE_TOLERANCE:
        raise PulseParseError(
            line_count, f"stated angle {angle!r} disagrees with shape angle {actual!r}"
        )

    try:
        return DesignedPulse(shape, tau_s, angle)
    except (PulseDomainError, InvalidGeometryError) as e:
        raise PulseParseError(line_count, str(e)) from e


def serialize_pulse(pulse: Union[PulseShape, DesignedPulse]) -> str:
    """Render a shape or placed pulse in the pulse file format, losslessly."""
    lines: List[str] = []
    if isinstance(pulse, DesignedPulse):
        lines.append(f"tau_s {pulse.tau_s!r}")
        lines.append(f"angle {pulse.intended_angle!r}")
        shape = pulse.shape
    else:
        shape = pulse

    lines.extend(f"{s.duration!r} {s.amplitude!r}" for s in shape.segments)
    return "\n".join(lines) + "\n"


def load_designed_pulse(path: Union[str, Path], default_tau_s: Optional[float] = None) -> DesignedPulse:
    """Read and parse a pulse file from disk."""
    text = Path(path).read_text(encoding="utf-8")
    pulse = parse_designed_pulse(text, default_tau_s)
    logger.info(f"Loaded {len(pulse.shape.segments)}-segment pulse from {path}")
    return pulse


def _parse_complex(token: str, line_number: int) -> complex:
    normalised = token.replace("I", "i").replace("i", "j")
    try:
        value = complex(normalised)
    except ValueError:
        raise PulseParseError(line_number, f"bad complex entry {token!r}") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise PulseParseError(line_number, f"non-finite entry {token!r}")
    return value


def parse_matrix_file(text: str) -> np.ndarray:
    """
    Parse a dense complex matrix.

    The first content line holds the dimension d, followed by d rows of d
    whitespace-separated entries written as "a+bi".
    """
    rows: List[List[complex]] = []
    dimension: Optional[int] = None
    last_line = 0

    for line_number, raw in enumerate(text.splitlines(), start=1):
        last_line = line_number
        line = raw.strip()
        if not line or line.startswith("#"):
            continue

        if dimension is None:
            try:
                dimension = int(line)
            except ValueError:
                raise PulseParseError(line_number, f"expected dimension, found {line!r}") from None
            if dimension <= 0:
                raise PulseParseError(line_number, f"dimension must be positive, got {dimension}")
            continue

        tokens = line.split()
        if len(tokens) != dimension:
            raise PulseParseError(
                line_number, f"expected {dimension} entries, found {len(tokens)}"
            )
        rows.append([_parse_complex(token, line_number) for token in tokens])

    if dimension is None:
        raise PulseParseError(last_line, "empty matrix file")
    if len(rows) != dimension:
        raise PulseParseError(last_line, f"expected {dimension} rows, found {len(rows)}")
    return np.array(rows, dtype=complex)


def serialize_matrix(matrix: np.ndarray) -> str:
    """Render a square matrix in the matrix file format."""
    matrix = np.asarray(matrix, dtype=complex)
    lines = [str(matrix.shape[0])]
    for row in matrix:
        lines.append(" ".join(f"{z.real!r}{z.imag:+}i" for z in row))
    return "\n".join(lines) + "\n"
