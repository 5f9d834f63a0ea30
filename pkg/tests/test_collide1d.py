"""Tests for the 1D collision model and the layer systems."""

import math

import numpy as np
import pytest

from hydrolimit.collide1d import (
    System1D,
    field_sup_difference,
    free_transport_equivalence,
    layer_fields_closed_form,
    layer_crossing_times,
    layer_fields_on_grid,
    layer_fields_quadrature,
    layer_jump_mask,
    layer_moments_closed_form,
    next_events,
    nonuniqueness_report,
    simulate_1d,
    state_at,
    three_layer_init,
    two_layer_init,
)
from hydrolimit.constants import CollisionType, LayerKind
from hydrolimit.errors import DomainError, UnsupportedCollisionError
from hydrolimit.hydro import euler_1d_fields_check, standard_battery

C = math.sqrt(6.0) / 2.0


class TestSystem1D:
    """Tests for state validation."""

    def test_unsorted_rejected(self):
        """Positions must be nondecreasing."""
        with pytest.raises(DomainError):
            System1D([1.0, 0.0], [0.0, 0.0])

    def test_length_mismatch(self):
        """One velocity per particle."""
        with pytest.raises(DomainError):
            System1D([0.0, 1.0], [0.0])


class TestCollisions:
    """Tests for event detection and resolution."""

    def test_binary_exchange(self):
        """Two approaching particles swap velocities at the meeting time."""
        run = simulate_1d(System1D([0.0, 1.0], [1.0, -1.0]), 2.0)
        assert len(run.events) == 1
        event = run.events[0]
        assert event.kind is CollisionType.BINARY
        assert event.time == pytest.approx(0.5)
        np.testing.assert_allclose(run.final.velocities, [-1.0, 1.0])
        np.testing.assert_allclose(run.final.positions, [-1.0, 2.0])

    def test_triple_with_resting_middle(self):
        """The outer particles swap; the middle stays at rest."""
        run = simulate_1d(three_layer_init(3), 1.0)
        assert len(run.events) == 1
        event = run.events[0]
        assert event.kind is CollisionType.TRIPLE
        assert event.indices == (0, 1, 2)
        assert event.time == pytest.approx(1.0 / (3.0 * C))
        np.testing.assert_allclose(run.final.velocities, [-C, 0.0, C])

    def test_no_approach(self):
        """Separating particles never collide."""
        assert next_events(System1D([0.0, 1.0], [-1.0, 1.0])) == []

    def test_moving_middle_unsupported(self):
        """Three particles meeting with a moving middle are not resolved."""
        s = System1D([0.0, 1.0, 2.0], [1.0, 0.5, 0.0])
        with pytest.raises(UnsupportedCollisionError):
            next_events(s)

    def test_end_before_start(self):
        """The end time must lie after the start."""
        with pytest.raises(DomainError):
            simulate_1d(System1D([0.0], [1.0]), 0.0)

    def test_sample_snapshots(self):
        """Sample times are recorded between events."""
        run = simulate_1d(System1D([0.0, 1.0], [1.0, -1.0]), 1.0, sample_times=[0.25, 0.75])
        times = [s.time for s in run.snapshots]
        assert times == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])

    def test_state_at_interpolates(self):
        """Free flight from the last snapshot before t."""
        run = simulate_1d(System1D([0.0, 1.0], [1.0, -1.0]), 1.0)
        np.testing.assert_allclose(state_at(run, 0.7).positions, [0.3, 0.7])


class TestLayerSystems:
    """Tests for the two- and three-layer particle systems."""

    def test_two_layer_event_count(self):
        """N = 4 two-layer particles collide three times."""
        run = simulate_1d(two_layer_init(4), 1.0)
        assert run.event_counts() == {"binary": 3, "triple": 0}
        assert run.wave_times() == pytest.approx([0.125, 0.375])

    def test_three_layer_first_wave(self):
        """The first wave of a three-layer system is one triple collision per group."""
        run = simulate_1d(three_layer_init(9), 1.2 / (9.0 * C))
        assert run.event_counts() == {"binary": 0, "triple": 3}
        assert run.wave_times() == pytest.approx([1.0 / (9.0 * C)])

    @pytest.mark.parametrize("init,N", [(two_layer_init, 20), (three_layer_init, 21)])
    def test_free_transport_equivalence(self, init, N):
        """Collisions only relabel particles: the phase-space multiset is free transport."""
        s0 = init(N)
        run = simulate_1d(s0, 1.0, sample_times=np.linspace(0.1, 0.9, 9))
        for t in np.linspace(0.0, 1.0, 11):
            assert free_transport_equivalence(s0, float(t), run) < 1e-12

    def test_two_layer_odd_n(self):
        """Two layers need an even N."""
        with pytest.raises(DomainError):
            two_layer_init(5)

    def test_three_layer_n(self):
        """Three layers need N divisible by 3."""
        with pytest.raises(DomainError):
            three_layer_init(10)


class TestClosedForms:
    """Tests for the layer solutions."""

    def test_three_layer_point(self):
        """At t = 0.4, x = 0.2: ρ = 2/3, u = −√6/4, e = 3/16."""
        rho, u, e = layer_fields_closed_form(LayerKind.THREE, 0.4, 0.2)
        assert rho == pytest.approx(2.0 / 3.0)
        assert u == pytest.approx(-math.sqrt(6.0) / 4.0)
        assert e == pytest.approx(3.0 / 16.0)

    def test_two_layer_overlap(self):
        """Where both layers overlap the mean velocity vanishes and e = 1/2."""
        rho, u, e = layer_fields_closed_form(LayerKind.TWO, 0.25, 0.5)
        assert (rho, u, e) == pytest.approx((1.0, 0.0, 0.5))

    def test_vacuum(self):
        """Outside every layer all fields are zero."""
        assert layer_fields_closed_form(LayerKind.TWO, 0.5, 5.0) == (0.0, 0.0, 0.0)

    def test_three_layer_moments(self):
        """Two symmetric layers: ξ² = 3/8 and no third moment."""
        m = layer_moments_closed_form(LayerKind.THREE, 0.4, 0.2)
        assert m.xi2 == pytest.approx(3.0 / 8.0)
        assert m.xi3 == pytest.approx(0.0, abs=1e-15)

    def test_identical_at_zero(self):
        """Both solutions share their initial data."""
        grid = np.linspace(-1.0, 2.0, 601)
        assert max(field_sup_difference(0.0, grid)) <= 1e-12

    def test_density_gap(self):
        """sup |ρ − ρ̃| = 1/3 at t = 1/2."""
        grid = np.linspace(-1.5, 2.5, 4001)
        d_rho, _, _ = field_sup_difference(0.5, grid)
        assert d_rho == pytest.approx(1.0 / 3.0)

    def test_grid_mass(self):
        """Cell integrals of the layer density sum to one."""
        edges = np.linspace(-2.0, 3.0, 51)
        fields = layer_fields_on_grid(LayerKind.THREE, 0.3, edges)
        assert fields.mass.sum() == pytest.approx(1.0)
        assert np.sum(fields.momentum) == pytest.approx(0.0, abs=1e-12)

    def test_jump_mask(self):
        """Bins holding a layer endpoint are flagged."""
        edges = np.linspace(-1.0, 2.0, 13)
        mask = layer_jump_mask(LayerKind.TWO, 0.0, edges)
        centers = 0.5 * (edges[:-1] + edges[1:])
        assert mask[np.argmin(np.abs(centers - 0.125))]
        assert not mask[np.argmin(np.abs(centers - 0.625))]


class TestLayerQuadrature:
    """Tests for the exact layer fields at Gauss-Legendre times."""

    def test_two_layer_crossing(self):
        """The two layers' facing endpoints meet at t = 1/2."""
        np.testing.assert_allclose(layer_crossing_times(LayerKind.TWO, 1.0), [0.5])

    def test_three_layer_crossings(self):
        """Outer layers meet at 1/(2c), each outer layer passes the resting one at 1/c."""
        np.testing.assert_allclose(layer_crossing_times(LayerKind.THREE, 1.0), [0.5 / C, 1.0 / C])

    def test_endpoints_are_edges(self):
        """Every layer endpoint inside the grid is a bin edge, so bins hold constant fields."""
        _, nodes, weights = layer_fields_quadrature(LayerKind.TWO, 1.0, cells=64)
        assert weights.sum() == pytest.approx(1.0)
        for fields in nodes[::17]:
            edges = fields.edges[0]
            for end in (fields.time, 1.0 + fields.time, -fields.time, 1.0 - fields.time):
                assert np.min(np.abs(edges - end)) < 1e-9
            assert np.max(np.abs(fields.central3)) <= 1e-12

    @pytest.mark.parametrize("kind", list(LayerKind))
    def test_closed_forms_solve_euler(self, kind):
        """The exact layer solutions leave weak Euler residuals below 1e-6."""
        initial, nodes, weights = layer_fields_quadrature(kind, 1.0)
        grid = initial.edges[0]
        battery = standard_battery(1, (0.0, 1.0), [(grid[0], grid[-1])])
        report = euler_1d_fields_check(nodes, battery, tolerance=1e-6, time_weights=weights, initial=initial)
        assert report.passed, [c.name for c in report.failed()]

    def test_needs_positive_horizon(self):
        """The horizon must be positive."""
        with pytest.raises(DomainError):
            layer_fields_quadrature(LayerKind.TWO, 0.0)


class TestNonUniqueness:
    """Tests for the comparison report."""

    def test_report_passes(self):
        """Identical at t = 0, densities differ by at least 1/6 later."""
        report = nonuniqueness_report(60, [0.0, 0.25, 0.5, 1.0])
        assert report.passed
        assert set(report.differences) == {0.0, 0.25, 0.5, 1.0}

    def test_times_outside_unit_interval(self):
        """Times beyond [0, 1] are rejected."""
        with pytest.raises(DomainError):
            nonuniqueness_report(60, [1.5])
