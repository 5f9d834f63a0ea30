"""Tests for empirical measures, macroscopic fields and W1 distances."""

import math

import numpy as np
import pytest

from hydrolimit.constants import LimitTag, W1Mode
from hydrolimit.errors import DomainError
from hydrolimit.measures import (
    EmpiricalMeasure,
    LimitMeasureSpec,
    default_edges,
    discretize_limit,
    energy_split,
    from_state,
    lipschitz_gap,
    macro_fields,
    mean_abs_projection,
    push_forward_free,
    velocity_covariance,
    w1_distance,
)
from hydrolimit.collide1d import System1D


def uniform(positions, velocities):
    n = len(positions)
    return EmpiricalMeasure(np.asarray(positions, dtype=float), np.asarray(velocities, dtype=float), np.full(n, 1.0 / n))


@pytest.fixture
def four_atoms():
    """Two slow atoms in [0, 1/2) and two fast ones in [1/2, 1]."""
    return uniform([0.1, 0.2, 0.6, 0.7], [1.0, -1.0, 2.0, 2.0])


class TestEmpiricalMeasure:
    """Tests for measure construction."""

    def test_weights_must_sum_to_one(self):
        """Unnormalized weights are rejected."""
        with pytest.raises(DomainError):
            EmpiricalMeasure([0.0, 1.0], [0.0, 0.0], [0.5, 0.6])

    def test_shape_mismatch(self):
        """Positions and velocities must agree."""
        with pytest.raises(DomainError):
            EmpiricalMeasure([0.0, 1.0], [0.0], [0.5, 0.5])

    def test_dimension_three_rejected(self):
        """Only 1D and 2D measures exist."""
        with pytest.raises(DomainError):
            EmpiricalMeasure(np.zeros((1, 3)), np.zeros((1, 3)), [1.0])

    def test_from_state(self):
        """A system of N particles gets weights 1/N."""
        M = from_state(System1D([0.0, 0.5, 1.0, 1.5], [1.0, 0.0, 0.0, -1.0]))
        assert M.dimension == 1
        np.testing.assert_allclose(M.weights, 0.25)

    def test_push_forward_free(self, four_atoms):
        """Atoms move by t·v, velocities unchanged."""
        moved = push_forward_free(four_atoms, 0.5)
        np.testing.assert_allclose(moved.positions[:, 0], [0.6, -0.3, 1.6, 1.7])
        np.testing.assert_array_equal(moved.velocities, four_atoms.velocities)

    def test_restricted_renormalizes(self, four_atoms):
        """A restriction is a probability measure again."""
        sub = four_atoms.restricted([True, False, False, True])
        np.testing.assert_allclose(sub.weights, [0.5, 0.5])


class TestLimitMeasures:
    """Tests for the closed-form limits and their discretization."""

    def test_ghost_at_rest_before_zero(self):
        """For t ≤ 0 the ghost limit is the resting unit segment."""
        M = discretize_limit(LimitMeasureSpec(LimitTag.GHOST, -1.0, 8))
        assert M.size == 8
        assert not np.any(M.velocities)
        np.testing.assert_allclose(M.positions[:, 1], 0.0)

    def test_ghost_splits(self):
        """For t > 0 half the mass moves up from y = t, half down from y = −t."""
        M = discretize_limit(LimitMeasureSpec(LimitTag.GHOST, 0.5, 8))
        up = M.velocities[:, 1] > 0
        assert up.sum() == 4
        np.testing.assert_allclose(M.positions[up, 1], 0.5)
        np.testing.assert_allclose(M.positions[~up, 1], -0.5)
        np.testing.assert_allclose(M.positions[up, 0], [0.125, 0.375, 0.625, 0.875])

    def test_reverse_at_rest_after_zero(self):
        """The reversed flow is at rest for t ≥ 0."""
        M = discretize_limit(LimitMeasureSpec(LimitTag.REVERSE, 0.5, 6))
        assert not np.any(M.velocities)

    def test_three_layer_speed(self):
        """The outer layers move with ±√6/2."""
        M = discretize_limit(LimitMeasureSpec(LimitTag.THREE_LAYER, 0.0, 9))
        c = math.sqrt(6.0) / 2.0
        np.testing.assert_allclose(np.unique(M.velocities[:, 0]), [-c, 0.0, c])

    def test_atom_budget(self):
        """At least two atoms."""
        with pytest.raises(DomainError):
            LimitMeasureSpec(LimitTag.GHOST, 0.0, 1)


class TestW1Distance:
    """Tests for exact and sliced W1."""

    def test_identical(self, four_atoms):
        """W1(M, M) = 0."""
        assert w1_distance(four_atoms, four_atoms).value == pytest.approx(0.0, abs=1e-12)

    def test_translation_exact(self, four_atoms):
        """A spatial shift by d costs d."""
        shifted = EmpiricalMeasure(four_atoms.positions + 0.3, four_atoms.velocities, four_atoms.weights)
        result = w1_distance(four_atoms, shifted)
        assert result.mode is W1Mode.EXACT
        assert result.value == pytest.approx(0.3)

    def test_translation_sliced(self, four_atoms):
        """The normalized sliced value recovers a pure translation."""
        shifted = EmpiricalMeasure(four_atoms.positions + 0.3, four_atoms.velocities, four_atoms.weights)
        result = w1_distance(four_atoms, shifted, mode=W1Mode.SLICED)
        assert result.mode is W1Mode.SLICED
        assert result.value == pytest.approx(0.3, rel=1e-3)

    def test_ghost_against_rest(self):
        """Half the mass moving with unit speed at distance 1/2: W1 ≥ the velocity gap."""
        rest = discretize_limit(LimitMeasureSpec(LimitTag.GHOST, 0.0, 16))
        moving = discretize_limit(LimitMeasureSpec(LimitTag.GHOST, 0.5, 16))
        assert w1_distance(rest, moving).value >= 1.0 - 1e-12

    def test_dimension_mismatch(self, four_atoms):
        """1D and 2D measures cannot be compared."""
        planar = discretize_limit(LimitMeasureSpec(LimitTag.GHOST, 0.0, 4))
        with pytest.raises(DomainError):
            w1_distance(four_atoms, planar)

    def test_mean_abs_projection(self):
        """E|⟨θ, e⟩| is 1 on the line and 2/π in the plane."""
        assert mean_abs_projection(1) == pytest.approx(1.0)
        assert mean_abs_projection(2) == pytest.approx(2.0 / math.pi)

    def test_lipschitz_gap_below_w1(self):
        """Bounded 1-Lipschitz test integrals never exceed W1."""
        rng = np.random.default_rng(11)
        A = uniform(rng.uniform(0, 1, 12), rng.normal(size=12))
        B = uniform(rng.uniform(0, 1, 10), rng.normal(size=10))
        gap = lipschitz_gap(A, B)
        assert len(gap.discrepancies) == 16
        assert gap.max_discrepancy <= w1_distance(A, B).value + 1e-12

    def test_raw_and_scale(self, four_atoms):
        """Sliced results keep the plain directional average next to the normalized value."""
        shifted = EmpiricalMeasure(four_atoms.positions + 0.3, four_atoms.velocities, four_atoms.weights)
        sliced = w1_distance(four_atoms, shifted, mode=W1Mode.SLICED)
        assert sliced.scale == pytest.approx(2.0 / math.pi)
        assert sliced.raw == pytest.approx(sliced.value * sliced.scale)
        exact = w1_distance(four_atoms, shifted)
        assert exact.raw == exact.value
        assert exact.scale == 1.0

    def test_sliced_close_to_exact(self):
        """For a dilation about the mean the sliced value is within 15% of the exact one."""
        rng = np.random.default_rng(7)
        A = uniform(rng.uniform(0.0, 1.0, 40), rng.normal(size=40))
        center = A.phase_points.mean(axis=0)
        dilated = center + 1.4 * (A.phase_points - center)
        B = EmpiricalMeasure(dilated[:, :1], dilated[:, 1:], A.weights)
        exact = w1_distance(A, B, mode=W1Mode.EXACT).value
        sliced = w1_distance(A, B, mode=W1Mode.SLICED).value
        assert exact == pytest.approx(0.4 * np.mean(np.linalg.norm(A.phase_points - center, axis=1)))
        assert abs(sliced - exact) <= 0.15 * exact

    def test_symmetric(self):
        """W1(A, B) = W1(B, A)."""
        rng = np.random.default_rng(12)
        A = uniform(rng.uniform(0, 1, 9), rng.normal(size=9))
        B = uniform(rng.uniform(0, 1, 14), rng.normal(size=14))
        assert w1_distance(A, B).value == pytest.approx(w1_distance(B, A).value, abs=1e-12)

    def test_triangle_inequality(self):
        """W1(A, C) ≤ W1(A, B) + W1(B, C)."""
        rng = np.random.default_rng(13)
        A, B, C = (uniform(rng.uniform(0, 1, n), rng.normal(size=n)) for n in (7, 11, 16))
        assert w1_distance(A, C).value <= w1_distance(A, B).value + w1_distance(B, C).value + 1e-9

    @pytest.mark.parametrize("tag, t", [(LimitTag.GHOST, 0.5), (LimitTag.THREE_LAYER, 0.3)])
    @pytest.mark.parametrize("m", [8, 16, 32])
    def test_discretization_refines(self, tag, t, m):
        """Discretizations with m and 2m atoms differ by at most 2/m."""
        coarse = discretize_limit(LimitMeasureSpec(tag, t, m))
        fine = discretize_limit(LimitMeasureSpec(tag, t, 2 * m))
        assert w1_distance(coarse, fine, mode=W1Mode.EXACT).value * m <= 2.0


class TestMacroFields:
    """Tests for bin-integrated moments."""

    def test_moments(self, four_atoms):
        """ρ, u, ξ² and e on two bins."""
        fields = macro_fields(four_atoms, np.array([0.0, 0.5, 1.0]))
        np.testing.assert_allclose(fields.rho, [1.0, 1.0])
        np.testing.assert_allclose(fields.u[:, 0], [0.0, 2.0])
        np.testing.assert_allclose(fields.xi2, [1.0, 0.0])
        np.testing.assert_allclose(fields.xi3, [0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(fields.e, [0.5, 0.0])

    def test_empty_bin(self, four_atoms):
        """Empty bins report zero density, velocity and energy."""
        fields = macro_fields(four_atoms, np.array([0.0, 0.5, 0.55, 1.0]))
        assert fields.rho[1] == 0.0
        assert fields.u[1, 0] == 0.0
        assert fields.e[1] == 0.0

    def test_skewed_third_moment(self):
        """Velocities 0, 0, 3 in one bin: ∫(v − u)³ = (2·(−1)³ + 2³)/3 = 2."""
        M = uniform([0.1, 0.2, 0.3], [0.0, 0.0, 3.0])
        fields = macro_fields(M, np.array([0.0, 1.0]))
        assert fields.central3[0] == pytest.approx(2.0)

    def test_atoms_outside(self, four_atoms):
        """Edges have to cover every atom."""
        with pytest.raises(DomainError):
            macro_fields(four_atoms, np.array([0.0, 0.5]))

    def test_default_width(self, four_atoms):
        """Four atoms give bins of width 1/2."""
        (edges,) = default_edges(four_atoms)
        np.testing.assert_allclose(np.diff(edges), 0.5)
        assert edges[0] <= 0.1 and edges[-1] >= 0.7

    def test_planar_fields(self):
        """2D binning of the split ghost limit separates the two segments."""
        M = discretize_limit(LimitMeasureSpec(LimitTag.GHOST, 0.5, 8))
        fields = macro_fields(M, (np.array([0.0, 1.0]), np.array([-1.0, 0.0, 1.0])))
        np.testing.assert_allclose(fields.mass, [[0.5, 0.5]])
        np.testing.assert_allclose(fields.u[0, :, 1], [-1.0, 1.0])
        np.testing.assert_allclose(fields.xi2, 0.0, atol=1e-15)

    def test_covariance_trace(self, four_atoms):
        """The covariance trace equals ξ²."""
        edges = np.array([0.0, 0.5, 1.0])
        cov = velocity_covariance(four_atoms, edges)
        np.testing.assert_allclose(cov[:, 0, 0], macro_fields(four_atoms, edges).xi2)


class TestEnergySplit:
    """Tests for the macroscopic/fluctuation energy split."""

    def test_split(self, four_atoms):
        """Σ m|u|² plus Σ w|v − u|² equals Σ w|v|²."""
        split = energy_split(four_atoms, np.array([0.0, 0.5, 1.0]))
        assert split.macroscopic == pytest.approx(2.0)
        assert split.fluctuation == pytest.approx(0.5)
        assert split.total == pytest.approx(2.5)

    def test_single_bin_hides_motion(self):
        """Opposite velocities in one bin are all fluctuation."""
        M = uniform([0.1, 0.2], [1.0, -1.0])
        split = energy_split(M, np.array([0.0, 1.0]))
        assert split.macroscopic == pytest.approx(0.0)
        assert split.fluctuation == pytest.approx(1.0)
