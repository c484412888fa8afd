"""Shared fixtures for the pulse error budget tests."""

import os
import sys

import numpy as np
import pytest

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from data.reference_models import default_model  # noqa: E402
from models.pulse_core import DesignedPulse, asymmetric_family, constant_pulse  # noqa: E402
from models.pulse_design import create_designer  # noqa: E402


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def designer():
    return create_designer()


@pytest.fixture(scope="session")
def symmetric_pi(designer) -> DesignedPulse:
    return designer.design_symmetric_pi(1.0)


@pytest.fixture
def asymmetric_pi() -> DesignedPulse:
    return asymmetric_family(1, 1.0)


@pytest.fixture
def constant_pi() -> DesignedPulse:
    return constant_pulse(1.0)


@pytest.fixture
def qubit_bath_model():
    return default_model(1e-3)
