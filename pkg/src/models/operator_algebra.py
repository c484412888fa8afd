"""Dense complex operator support: Hermiticity, involution splitting, propagators, norms."""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from monitoring.error_handling import OperatorContractError

logger = logging.getLogger(__name__)

MAX_DIMENSION = 64
HERMITIAN_TOLERANCE = 1e-10
INVOLUTION_TOLERANCE = 1e-12


def as_operator(matrix, max_dimension: int = MAX_DIMENSION) -> np.ndarray:
    """
    Validate and convert to a square complex array.

    Raises:
        OperatorContractError: non-square, too large or non-finite input
    """
    array = np.asarray(matrix, dtype=complex)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise OperatorContractError(f"operator must be square, got shape {array.shape}")
    if array.shape[0] == 0 or array.shape[0] > max_dimension:
        raise OperatorContractError(
            f"operator dimension {array.shape[0]} outside 1..{max_dimension}"
        )
    if not np.all(np.isfinite(array)):
        raise OperatorContractError("operator has non-finite entries")
    return array


def hermiticity_residual(matrix: np.ndarray) -> float:
    """Largest entry of |A - A^dagger|."""
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def is_hermitian(matrix: np.ndarray, tol: float = HERMITIAN_TOLERANCE) -> bool:
    return hermiticity_residual(np.asarray(matrix, dtype=complex)) <= tol


@dataclass(frozen=True)
class InvolutionOperator:
    """A Hermitian operator squaring to the identity (the parity kick)."""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = as_operator(self.matrix)
        if hermiticity_residual(matrix) > INVOLUTION_TOLERANCE:
            raise OperatorContractError("involution must be Hermitian")
        identity = np.eye(matrix.shape[0])
        if np.max(np.abs(matrix @ matrix - identity)) > INVOLUTION_TOLERANCE:
            raise OperatorContractError("involution must square to the identity")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def split_by_involution(
    matrix: np.ndarray, omega: InvolutionOperator
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Split A into parts anticommuting and commuting with omega.

    Returns:
        (A_anti, A_comm) with A_anti = (A - wAw)/2 and A_comm = A - A_anti
    """
    matrix = as_operator(matrix)
    if matrix.shape != omega.matrix.shape:
        raise OperatorContractError(
            f"dimension mismatch: {matrix.shape} vs {omega.matrix.shape}"
        )
    w = omega.matrix
    anti = 0.5 * (matrix - w @ matrix @ w)
    comm = matrix - anti
    return anti, comm


def hermitian_propagator(
    matrix: np.ndarray, t: float, tol: float = HERMITIAN_TOLERANCE
) -> np.ndarray:
    """
    exp(-i A t) for Hermitian A via eigendecomposition.

    Raises:
        OperatorContractError: if A is not Hermitian within `tol`
    """
    matrix = as_operator(matrix)
    residual = hermiticity_residual(matrix)
    if residual > tol:
        raise OperatorContractError(f"generator is not Hermitian (residual {residual:.3e})")

    hermitian = 0.5 * (matrix + matrix.conj().T)
    eigenvalues, eigenvectors = np.linalg.eigh(hermitian)
    phases = np.exp(-1j * eigenvalues * t)
    return (eigenvectors * phases) @ eigenvectors.conj().T


def operator_norm(matrix: np.ndarray) -> float:
    """Spectral norm (largest singular value)."""
    return float(np.linalg.norm(np.asarray(matrix, dtype=complex), 2))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a
