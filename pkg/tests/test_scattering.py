"""Tests for the two-body scattering map and its trajectory oracle."""

import math

import numpy as np
import pytest

from hydrolimit.errors import DomainError
from hydrolimit.potential import make_potential
from hydrolimit.scattering import (
    ScatteringQuery,
    impact_for_deflection,
    interaction_time_bound,
    lab_deflection,
    pericenter_angle,
    pericenter_radius,
    scatter,
    simulate_encounter,
)

UNIT = make_potential(1.0)


class TestScatteringQuery:
    """Tests for query validation."""

    def test_energy_two_body(self):
        """With coupling 1/2 the energy is v²/2."""
        assert ScatteringQuery(0.1, 2.0).energy == pytest.approx(2.0)

    def test_energy_scales_with_coupling(self):
        """E = v²/(4c)."""
        assert ScatteringQuery(0.1, 2.0, coupling=0.25).energy == pytest.approx(4.0)

    def test_rejects_zero_speed(self):
        """Speed must be positive."""
        with pytest.raises(DomainError):
            ScatteringQuery(0.1, 0.0)

    def test_rejects_negative_alpha(self):
        """Impact parameter must be nonnegative."""
        with pytest.raises(DomainError):
            ScatteringQuery(-0.1, 1.0)


class TestPericenterRadius:
    """Tests for the distance of closest approach."""

    def test_grazing(self):
        """At α = σ the pericenter is σ."""
        assert pericenter_radius(ScatteringQuery(1.0, 1.0), UNIT) == pytest.approx(1.0)

    def test_head_on_closed_form(self):
        """At α = 0, E = 1: root of 1/r + r − 2 = 1."""
        r = pericenter_radius(ScatteringQuery(0.0, math.sqrt(2.0)), UNIT)
        assert r == pytest.approx((3.0 - math.sqrt(5.0)) / 2.0, abs=1e-10)

    def test_root_satisfies_equation(self):
        """The returned radius zeroes the radicand."""
        q = ScatteringQuery(0.5, 2.0)
        r = pericenter_radius(q, UNIT)
        radicand = 1.0 - (0.5 / r) ** 2 - float(UNIT.value(r)) / q.energy
        assert abs(radicand) < 1e-10

    def test_nondecreasing_in_alpha(self):
        """r_min grows with the impact parameter."""
        radii = [pericenter_radius(ScatteringQuery(a, 1.0), UNIT) for a in np.linspace(0.0, 1.0, 21)]
        assert all(b >= a - 1e-12 for a, b in zip(radii[:-1], radii[1:]))

    def test_alpha_beyond_range_rejected(self):
        """α > σ is outside the domain."""
        with pytest.raises(DomainError):
            pericenter_radius(ScatteringQuery(1.5, 1.0), UNIT)


class TestPericenterAngle:
    """Tests for the pericenter angle quadrature."""

    def test_grazing_is_right_angle(self):
        """No interaction at α = σ."""
        assert abs(pericenter_angle(ScatteringQuery(1.0, 1.0), UNIT) - math.pi / 2) < 1e-8

    def test_head_on_is_zero(self):
        """A head-on collision reflects."""
        assert pericenter_angle(ScatteringQuery(0.0, 1.0), UNIT) < 1e-6

    def test_range_on_grid(self):
        """φ stays in [0, π/2] and moves continuously."""
        alphas = np.linspace(0.0, 1.0, 41)
        angles = np.array([pericenter_angle(ScatteringQuery(a, 1.0), UNIT) for a in alphas])
        assert np.all(angles >= 0.0)
        assert np.all(angles <= math.pi / 2)
        assert np.max(np.abs(np.diff(angles))) < 0.5

    def test_independent_of_sigma(self):
        """The angle depends on α/σ only."""
        small = make_potential(0.01)
        a = pericenter_angle(ScatteringQuery(0.004, 1.3), small)
        b = pericenter_angle(ScatteringQuery(0.4, 1.3), UNIT)
        assert a == pytest.approx(b, abs=1e-12)


class TestLabDeflection:
    """Tests for θ = π/2 − φ."""

    def test_no_deflection_at_range(self):
        """Grazing particles pass undeflected."""
        assert lab_deflection(ScatteringQuery(1.0, 1.0), UNIT) == pytest.approx(0.0, abs=1e-8)

    def test_head_on_stops(self):
        """Head-on: θ = π/2."""
        assert lab_deflection(ScatteringQuery(0.0, 1.0), UNIT) == pytest.approx(math.pi / 2, abs=1e-6)

    def test_scatter_bundles_everything(self):
        """scatter returns r_min, φ, θ and the time bound consistently."""
        result = scatter(ScatteringQuery(0.3, 2.0), UNIT)
        assert result.deflection == pytest.approx(math.pi / 2 - result.pericenter_angle)
        assert result.time_bound == pytest.approx(2.0)
        assert 0.0 < result.r_min < 1.0


class TestTrajectoryOracle:
    """Cross-checks of the quadrature against direct trajectory integration."""

    @pytest.mark.parametrize("speed", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("ratio", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    def test_deflection_matches(self, ratio, speed):
        """Quadrature and ODE deflections agree within 1e−5 rad."""
        q = ScatteringQuery(ratio, speed)
        measured = simulate_encounter(q, UNIT)
        assert abs(abs(measured.deflection) - lab_deflection(q, UNIT)) < 1e-5

    @pytest.mark.parametrize("ratio", [0.0, 0.25, 0.5, 0.75, 1.0])
    def test_interaction_time_below_bound(self, ratio):
        """Measured time inside the range is below 4σ/v."""
        q = ScatteringQuery(ratio, 1.0)
        assert simulate_encounter(q, UNIT).interaction_time < interaction_time_bound(1.0, 1.0)

    def test_invariants_conserved(self):
        """Energy and angular momentum drift below 1e−8."""
        measured = simulate_encounter(ScatteringQuery(0.5, 1.0), UNIT)
        assert measured.energy_drift < 1e-8
        assert measured.angular_momentum_drift < 1e-8

    def test_pericenter_radius_matches(self):
        """The radial turning point is the pericenter radius."""
        q = ScatteringQuery(0.4, 1.0)
        assert simulate_encounter(q, UNIT).r_min == pytest.approx(pericenter_radius(q, UNIT), abs=1e-6)

    def test_target_on_left_turns_clockwise(self):
        """A target left of the incident ray gives a negative (clockwise) deflection."""
        q = ScatteringQuery(0.5, 1.0)
        assert simulate_encounter(q, UNIT, offset_sign=1).deflection < 0.0
        assert simulate_encounter(q, UNIT, offset_sign=-1).deflection > 0.0

    def test_inverse_square_profile(self):
        """The oracle agreement holds for the second profile too."""
        p = make_potential(1.0, "inverse-square")
        q = ScatteringQuery(0.5, 1.0)
        assert abs(abs(simulate_encounter(q, p).deflection) - lab_deflection(q, p)) < 1e-5


class TestImpactForDeflection:
    """Tests for inverting the deflection map."""

    def test_zero_deflection(self):
        """θ = 0 needs α = σ."""
        assert impact_for_deflection(0.0, 1.0, UNIT) == 1.0

    def test_right_angle(self):
        """θ = π/2 needs a head-on collision."""
        assert impact_for_deflection(math.pi / 2, 1.0, UNIT) == 0.0

    def test_inversion_residual(self):
        """The returned α reproduces the target deflection."""
        target = math.asin(1.0 / math.sqrt(3.0))
        alpha = impact_for_deflection(target, math.sqrt(3.0), UNIT)
        assert 0.0 < alpha < 1.0
        assert abs(lab_deflection(ScatteringQuery(alpha, math.sqrt(3.0)), UNIT) - target) < 1e-10

    def test_inversion_confirmed_by_trajectory(self):
        """Forward simulation at the inverted α gives the target deflection."""
        target = math.asin(1.0 / math.sqrt(3.0))
        alpha = impact_for_deflection(target, math.sqrt(3.0), UNIT)
        measured = simulate_encounter(ScatteringQuery(alpha, math.sqrt(3.0)), UNIT)
        assert abs(abs(measured.deflection) - target) < 1e-5

    def test_target_out_of_range(self):
        """Targets beyond π/2 are rejected."""
        with pytest.raises(DomainError):
            impact_for_deflection(2.0, 1.0, UNIT)


class TestInteractionTimeBound:
    """Tests for 4σ/v."""

    def test_arithmetic(self):
        """4σ/v for two inputs."""
        assert interaction_time_bound(0.01, 2.0) == pytest.approx(0.02)
        assert interaction_time_bound(1.0, 1.0) == pytest.approx(4.0)

    def test_rejects_nonpositive(self):
        """σ and v must be positive."""
        with pytest.raises(DomainError):
            interaction_time_bound(0.0, 1.0)
