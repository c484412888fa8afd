"""Built-in system models: a qubit coupled to two bath spins, and a bare qubit."""

from functools import reduce
from typing import Union

import numpy as np

from models.evolution_sim import SystemModel
from models.operator_algebra import InvolutionOperator, as_operator
from monitoring.error_handling import OperatorContractError

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def kron(*factors: np.ndarray) -> np.ndarray:
    return reduce(np.kron, factors)


def default_hamiltonian() -> np.ndarray:
    """Qubit dephasing, Ising couplings to two bath spins and transverse bath fields."""
    return (
        0.5 * kron(SIGMA_Z, IDENTITY, IDENTITY)
        + 0.3 * kron(SIGMA_Z, SIGMA_Z, IDENTITY)
        + 0.2 * kron(SIGMA_Z, IDENTITY, SIGMA_Z)
        + 0.15 * (kron(IDENTITY, SIGMA_X, IDENTITY) + kron(IDENTITY, IDENTITY, SIGMA_X))
    )


def default_model(epsilon: float = 1e-3) -> SystemModel:
    """
    Eight-dimensional qubit plus bath model.

    The pulse rotates the qubit about x; the axis tilt (sigma_y + sigma_z)
    acts on the qubit only.
    """
    omega = InvolutionOperator(kron(SIGMA_X, IDENTITY, IDENTITY))
    omega_prime = kron(SIGMA_Y + SIGMA_Z, IDENTITY, IDENTITY)
    return SystemModel(default_hamiltonian(), omega, omega_prime, epsilon)


def single_qubit_model(
    h: Union[float, np.ndarray] = 0.0, eps_y: float = 0.0, eps_z: float = 0.0
) -> SystemModel:
    """
    A qubit rotated about x with axis deviations eps_y and eps_z.

    Args:
        h: sigma_z coefficient, or a full 2x2 Hamiltonian
        eps_y: Tilt towards y
        eps_z: Tilt towards z

    Returns:
        SystemModel with epsilon = hypot(eps_y, eps_z) and unit-scaled Omega'
    """
    hamiltonian = np.asarray(h, dtype=complex)
    if hamiltonian.ndim == 0:
        hamiltonian = complex(h) * SIGMA_Z

    epsilon = float(np.hypot(eps_y, eps_z))
    if epsilon > 0:
        omega_prime = (eps_y * SIGMA_Y + eps_z * SIGMA_Z) / epsilon
    else:
        omega_prime = np.zeros((2, 2), dtype=complex)
    return SystemModel(hamiltonian, InvolutionOperator(SIGMA_X), omega_prime, epsilon)


def model_from_hamiltonian(hamiltonian: np.ndarray, epsilon: float) -> SystemModel:
    """
    Wrap a user Hamiltonian: the first tensor factor is the controlled qubit.

    Omega = sigma_x (x) I and Omega' = (sigma_y + sigma_z) (x) I, as in the
    default model.
    """
    hamiltonian = as_operator(hamiltonian)
    dimension = hamiltonian.shape[0]
    if dimension % 2:
        raise OperatorContractError(
            f"Hamiltonian dimension {dimension} is odd; the first factor must be a qubit"
        )
    bath = np.eye(dimension // 2, dtype=complex)
    omega = InvolutionOperator(np.kron(SIGMA_X, bath))
    return SystemModel(hamiltonian, omega, np.kron(SIGMA_Y + SIGMA_Z, bath), epsilon)
