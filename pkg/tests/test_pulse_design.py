"""Tests for first-order pi pulse design."""

import math

import pytest
from pydantic import ValidationError

from models.error_functionals import PulseFamily, eta_tau
from models.pulse_core import DesignedPulse, PulseShape, constant_pulse, is_symmetric, rotation_angle
from models.pulse_design import (
    DesignReport,
    DesignSpec,
    PulseDesigner,
    design_asymmetric_pi,
    design_symmetric_pi,
    verify_first_order,
)
from monitoring.error_handling import DesignFailure, PulseDomainError, VerificationFailure


class TestSymmetricDesign:
    @pytest.mark.parametrize("tau_p", [0.01, 0.1, 1.0, 10.0])
    def test_duration_errors_vanish(self, designer, tau_p):
        pulse = designer.design_symmetric_pi(tau_p)
        eta_1, eta_2 = eta_tau(pulse)
        assert abs(eta_1) <= 1e-9 * tau_p
        assert abs(eta_2) <= 1e-9 * tau_p
        assert rotation_angle(pulse.shape) == pytest.approx(math.pi, abs=1e-10)
        assert is_symmetric(pulse.shape)
        assert pulse.tau_s == pytest.approx(tau_p / 2)

    @pytest.mark.parametrize("tau_p", [0.01, 0.1, 1.0, 10.0])
    def test_smallest_root_is_one_seventh(self, designer, tau_p):
        pulse = designer.design_symmetric_pi(tau_p)
        first = pulse.shape.segments[0]
        assert first.duration / tau_p == pytest.approx(1 / 7, abs=1e-10)
        assert -first.amplitude * tau_p == pytest.approx(7 * math.pi / 6, abs=1e-8)

    def test_scale_covariance(self, designer):
        reference = designer.design_symmetric_pi(1.0).shape.segments[0]
        for tau_p in (0.01, 10.0):
            segment = designer.design_symmetric_pi(tau_p).shape.segments[0]
            assert segment.duration / tau_p == pytest.approx(reference.duration, abs=1e-10)
            assert segment.amplitude * tau_p == pytest.approx(reference.amplitude, abs=1e-10)

    def test_deterministic(self):
        assert design_symmetric_pi(0.3) == design_symmetric_pi(0.3)

    def test_rejects_non_positive_duration(self, designer):
        with pytest.raises(PulseDomainError):
            designer.design_symmetric_pi(0.0)

    def test_no_sign_change_reports_scan(self):
        designer = PulseDesigner(scan_points=2)
        with pytest.raises(DesignFailure) as excinfo:
            designer.design_symmetric_pi(1.0)
        assert excinfo.value.scanned
        u, value = excinfo.value.scanned[0]
        assert u == pytest.approx(0.125)
        assert value < 0


class TestAsymmetricDesign:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_family_verifies(self, n):
        pulse = design_asymmetric_pi(2.0, n)
        assert pulse.tau_p == pytest.approx(2.0)

    def test_failed_verification_carries_report(self, monkeypatch):
        monkeypatch.setattr(
            "models.pulse_design.asymmetric_family", lambda n, tau_p: constant_pulse(tau_p)
        )
        with pytest.raises(VerificationFailure) as excinfo:
            design_asymmetric_pi(1.0, 1)
        report = excinfo.value.report
        assert isinstance(report, DesignReport)
        assert not report.verified
        assert report.eta_tau_1 == pytest.approx(-1 / math.pi)


class TestVerification:
    def test_constant_pulse_fails(self, constant_pi):
        verified, report = verify_first_order(constant_pi, 1e-9)
        assert not verified
        assert report.eta_tau_1 == pytest.approx(-1 / math.pi)
        assert "duration errors do not vanish" in report.notes

    def test_zero_angle_is_noted(self):
        pulse = DesignedPulse.create(PulseShape.from_pairs([(1.0, 0.0)]))
        verified, report = verify_first_order(pulse)
        assert verified
        assert any("zero rotation angle" in note for note in report.notes)

    def test_designed_pulse_passes(self, symmetric_pi):
        verified, report = verify_first_order(symmetric_pi)
        assert verified
        assert report.rotation_angle == pytest.approx(math.pi)


class TestDesignSpec:
    def test_dispatch(self, designer):
        pulse = designer.design(DesignSpec(tau_p=1.0, family=PulseFamily.ASYMMETRIC, n=2))
        assert len(pulse.shape.segments) == 2
        pulse = designer.design(DesignSpec(tau_p=1.0))
        assert len(pulse.shape.segments) == 3

    def test_only_pi_pulses(self, designer):
        with pytest.raises(PulseDomainError):
            designer.design(DesignSpec(tau_p=1.0, target_angle=math.pi / 2))

    def test_validation(self):
        with pytest.raises(ValidationError):
            DesignSpec(tau_p=-1.0)
        with pytest.raises(ValidationError):
            DesignSpec(tau_p=1.0, n=0)
        with pytest.raises(ValidationError):
            DesignSpec(tau_p=1.0, target_angle=7.0)
