"""Tests for exact propagation, the assembled operator error and scaling fits."""

import math

import numpy as np
import pytest

from data.reference_models import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    default_model,
    model_from_hamiltonian,
    single_qubit_model,
)
from models.evolution_sim import (
    ScalingMetric,
    ScalingSeries,
    SystemModel,
    assemble_eta,
    commutator_grouping_residual,
    control_frame_error,
    default_tau_p,
    deviation_scaling,
    eta_components,
    fit_scaling,
    ideal_target,
    instantaneous_control,
    leading_order_agreement,
    propagate,
    scaling_sweep,
)
from models.operator_algebra import InvolutionOperator, hermitian_propagator, operator_norm
from models.pulse_core import DesignedPulse, PulseShape, asymmetric_family, constant_pulse
from monitoring.error_handling import DegenerateFitError, OperatorContractError


class TestSystemModel:
    def test_rejects_dimension_mismatch(self):
        with pytest.raises(OperatorContractError):
            SystemModel(np.eye(4), InvolutionOperator(SIGMA_X), SIGMA_Y, 0.1)

    def test_rejects_non_hermitian_tilt(self):
        with pytest.raises(OperatorContractError):
            SystemModel(SIGMA_Z, InvolutionOperator(SIGMA_X), 1j * SIGMA_Y, 0.1)

    def test_rejects_non_finite_epsilon(self):
        with pytest.raises(OperatorContractError):
            SystemModel(SIGMA_Z, InvolutionOperator(SIGMA_X), SIGMA_Y, float("nan"))

    def test_single_qubit_tilt_is_normalised(self):
        model = single_qubit_model(eps_y=0.3, eps_z=0.4)
        assert model.epsilon == pytest.approx(0.5)
        assert np.allclose(model.omega_prime, 0.6 * SIGMA_Y + 0.8 * SIGMA_Z)
        assert np.array_equal(single_qubit_model().omega_prime, np.zeros((2, 2)))

    def test_user_hamiltonian_needs_a_qubit_factor(self):
        with pytest.raises(OperatorContractError):
            model_from_hamiltonian(np.eye(3), 0.1)
        model = model_from_hamiltonian(np.kron(SIGMA_Z, SIGMA_X), 0.1)
        assert model.dimension == 4

    def test_with_epsilon(self, qubit_bath_model):
        assert qubit_bath_model.with_epsilon(0.25).epsilon == 0.25
        assert qubit_bath_model.epsilon == 1e-3


class TestPropagation:
    def test_bare_pi_pulse(self):
        unitary = propagate(single_qubit_model(), constant_pulse(1.0))
        assert np.allclose(unitary, -1j * SIGMA_X, atol=1e-12)

    def test_zero_amplitude_is_free_evolution(self, qubit_bath_model):
        pulse = DesignedPulse.create(PulseShape.from_pairs([(0.7, 0.0)]))
        expected = hermitian_propagator(qubit_bath_model.H, 0.7)
        assert np.max(np.abs(propagate(qubit_bath_model, pulse) - expected)) <= 1e-12

    def test_unitary(self, qubit_bath_model, symmetric_pi):
        unitary = propagate(qubit_bath_model, symmetric_pi)
        assert np.max(np.abs(unitary @ unitary.conj().T - np.eye(8))) <= 1e-11

    def test_subdividing_a_segment_changes_nothing(self, qubit_bath_model):
        whole = constant_pulse(0.8)
        amplitude = whole.shape.segments[0].amplitude
        split = DesignedPulse.create(PulseShape.from_pairs([(0.3, amplitude), (0.5, amplitude)]), 0.4)
        difference = propagate(qubit_bath_model, whole) - propagate(qubit_bath_model, split)
        assert np.max(np.abs(difference)) <= 1e-12

    def test_target_without_hamiltonian_is_the_ideal_pulse(self, symmetric_pi):
        model = single_qubit_model()
        target = ideal_target(model, symmetric_pi)
        assert np.allclose(target, instantaneous_control(model, symmetric_pi), atol=1e-14)
        assert np.allclose(target, -1j * SIGMA_X, atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2])
    def test_no_error_without_hamiltonian_or_tilt(self, n):
        delta = control_frame_error(single_qubit_model(), asymmetric_family(n, 1.3))
        assert np.max(np.abs(delta)) <= 1e-12

    def test_deterministic(self, qubit_bath_model, asymmetric_pi):
        first = control_frame_error(qubit_bath_model, asymmetric_pi)
        second = control_frame_error(qubit_bath_model, asymmetric_pi)
        assert np.array_equal(first, second)


class TestAssembledError:
    def test_designed_pulse_without_tilt(self, symmetric_pi):
        eta = assemble_eta(default_model(0.0), symmetric_pi)
        assert operator_norm(eta) <= 1e-8

    def test_tilt_towards_y(self):
        epsilon = 1e-6
        model = single_qubit_model(eps_y=epsilon)
        pulse = constant_pulse(1.0)
        expected = -1j * epsilon * SIGMA_Y
        delta = control_frame_error(model, pulse)
        eta = assemble_eta(model, pulse)
        assert operator_norm(delta - expected) <= 1e-3 * epsilon
        assert operator_norm(eta - expected) <= 1e-3 * epsilon

    def test_short_pulse_limit_is_the_tilt(self, designer):
        epsilon = 1e-6
        model = default_model(epsilon)
        pulse = designer.design_symmetric_pi(1e-5)
        ratio = operator_norm(control_frame_error(model, pulse)) / epsilon
        assert ratio == pytest.approx(math.sqrt(2), rel=1e-2)

    def test_first_order_direction_terms_shrink_with_the_pulse(self, qubit_bath_model):
        def ratio(tau_p):
            parts = eta_components(qubit_bath_model, asymmetric_family(1, tau_p))
            return operator_norm(parts.direction_first) / operator_norm(parts.direction_zeroth)

        assert 0 < ratio(1e-2) < 1
        assert ratio(1e-3) / ratio(1e-2) == pytest.approx(0.1, rel=1e-6)

    def test_components_sum_to_total(self, qubit_bath_model, constant_pi):
        parts = eta_components(qubit_bath_model, constant_pi)
        total = parts.duration + parts.direction_zeroth + parts.direction_first
        assert np.array_equal(parts.total, total)
        assert np.array_equal(assemble_eta(qubit_bath_model, constant_pi), total)

    def test_grouping_residual(self, qubit_bath_model):
        assert commutator_grouping_residual(single_qubit_model(eps_y=0.1)) == 0.0
        assert commutator_grouping_residual(qubit_bath_model) > 0.0


class TestFitScaling:
    def test_quadratic(self):
        samples = [(0.5**k, 3.0 * 0.5 ** (2 * k)) for k in range(6)]
        slope, residual = fit_scaling(samples)
        assert slope == pytest.approx(2.0, abs=1e-9)
        assert residual <= 1e-9

    def test_linear(self):
        slope, _ = fit_scaling([(0.5**k, 0.2 * 0.5**k) for k in range(6)])
        assert slope == pytest.approx(1.0, abs=1e-9)

    def test_constant(self):
        slope, _ = fit_scaling([(0.5**k, 4.0) for k in range(6)])
        assert slope == pytest.approx(0.0, abs=1e-9)

    def test_too_few_samples(self):
        with pytest.raises(DegenerateFitError):
            fit_scaling([(1.0, 1.0), (0.5, 0.5), (0.25, 0.25)])

    def test_non_positive_values(self):
        with pytest.raises(DegenerateFitError):
            fit_scaling([(0.5**k, 0.0 if k == 2 else 1.0) for k in range(5)])

    def test_series_needs_geometric_parameters(self):
        with pytest.raises(DegenerateFitError):
            ScalingSeries([(1.0, 1.0), (0.5, 1.0), (0.3, 1.0), (0.1, 1.0)], 0.0, 0.0)


class TestScalingSweeps:
    def test_designed_pulse_is_second_order(self, designer):
        model = default_model(0.0)
        pulse = designer.design_symmetric_pi(default_tau_p(model))
        series = deviation_scaling(model, pulse, 0.5, 6)
        assert series.fitted_slope == pytest.approx(2.0, abs=0.15)

    def test_constant_pulse_is_first_order(self):
        model = default_model(0.0)
        series = deviation_scaling(model, constant_pulse(default_tau_p(model)), 0.5, 6)
        assert series.fitted_slope == pytest.approx(1.0, abs=0.15)

    def test_samples_follow_the_shrink(self, qubit_bath_model, constant_pi):
        series = deviation_scaling(qubit_bath_model, constant_pi, 0.5, 4)
        assert [p for p, _ in series.samples] == pytest.approx([1.0, 0.5, 0.25, 0.125])

    def test_remainder_is_second_order(self, designer, qubit_bath_model):
        pulse = designer.design_symmetric_pi(default_tau_p(qubit_bath_model))
        series = leading_order_agreement(qubit_bath_model, pulse, 0.5, 6)
        assert series.fitted_slope >= 1.85
        assert series.ok
        assert series.metric == ScalingMetric.REMAINDER

    def test_duration_term_tracks_the_simulation(self):
        model = default_model(0.0)
        pulse = constant_pulse(default_tau_p(model))
        assert operator_norm(eta_components(model, pulse).duration) > 0
        series = leading_order_agreement(model, pulse, 0.5, 6)
        assert series.fitted_slope >= 1.85
        assert series.ok

    def test_first_order_direction_term_tracks_the_simulation(self, qubit_bath_model):
        pulse = asymmetric_family(1, default_tau_p(qubit_bath_model))
        assert operator_norm(eta_components(qubit_bath_model, pulse).direction_first) > 0
        series = leading_order_agreement(qubit_bath_model, pulse, 0.5, 6)
        assert series.fitted_slope >= 1.85
        assert series.ok

    def test_relative_remainder_vanishes(self, designer, qubit_bath_model):
        pulse = designer.design_symmetric_pi(default_tau_p(qubit_bath_model))
        series = scaling_sweep(qubit_bath_model, pulse, ScalingMetric.RELATIVE_REMAINDER, 0.5, 6)
        assert series.fitted_slope >= 0.85

    def test_sequential_and_concurrent_agree(self, qubit_bath_model, asymmetric_pi):
        sequential = scaling_sweep(qubit_bath_model, asymmetric_pi, steps=5, workers=1)
        concurrent = scaling_sweep(qubit_bath_model, asymmetric_pi, steps=5, workers=4)
        assert sequential.samples == concurrent.samples

    @pytest.mark.parametrize("shrink_factor", [0.0, 1.0, 1.5])
    def test_rejects_bad_shrink_factor(self, qubit_bath_model, constant_pi, shrink_factor):
        with pytest.raises(DegenerateFitError):
            scaling_sweep(qubit_bath_model, constant_pi, shrink_factor=shrink_factor)

    def test_rejects_short_sweep(self, qubit_bath_model, constant_pi):
        with pytest.raises(DegenerateFitError):
            scaling_sweep(qubit_bath_model, constant_pi, steps=3)
