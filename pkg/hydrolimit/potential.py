"""Finite-range repulsive pair potentials Φ_σ(r) = Φ(r/σ)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from .errors import DomainError
from .profile import Profile
from .profiles import PROFILES, InverseLinearProfile


@dataclass(frozen=True)
class PairPotential:
    """An admissible profile together with its interaction range σ."""

    sigma: float
    profile: Profile = field(default_factory=InverseLinearProfile)

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise DomainError(f"Interaction range must be positive, got sigma={self.sigma}")

    @property
    def profile_id(self) -> str:
        return self.profile.profile_id

    def value(self, r: ArrayLike) -> np.ndarray:
        """Φ_σ(r)."""
        return self.profile.value(_positive(r, "r") / self.sigma)

    def derivative(self, r: ArrayLike) -> np.ndarray:
        """d/dr Φ_σ(r) = Φ'(r/σ)/σ."""
        return self.profile.derivative(_positive(r, "r") / self.sigma) / self.sigma

    def force_magnitude(self, r: ArrayLike) -> np.ndarray:
        """−d/dr Φ_σ(r), nonnegative for admissible profiles."""
        return -self.derivative(r)

    def rescaled(self, sigma: float) -> PairPotential:
        """The same profile with a different range."""
        return PairPotential(sigma=sigma, profile=self.profile)


def make_potential(sigma: float, profile_id: str = InverseLinearProfile.profile_id) -> PairPotential:
    """
    Build a potential from a registered profile id.

    Raises:
        DomainError: If the profile id is unknown
    """
    try:
        profile_class = PROFILES[profile_id]
    except KeyError:
        raise DomainError(
            f"Unknown profile '{profile_id}' (known: {', '.join(sorted(PROFILES))})"
        )
    return PairPotential(sigma=sigma, profile=profile_class())


def potential_value(r: float, sigma: float, profile: Profile | None = None) -> float:
    """
    Evaluate Φ_σ(r) = Φ(r/σ).

    Args:
        r: Pair distance, positive
        sigma: Interaction range, positive
        profile: Unscaled profile; defaults to Φ(u) = 1/u + u − 2

    Returns:
        The potential value, zero for r ≥ σ

    Raises:
        DomainError: If r or sigma is not positive
    """
    _positive(sigma, "sigma")
    potential = PairPotential(sigma, profile or InverseLinearProfile())
    return float(potential.value(r))


def force_magnitude(r: float, sigma: float, profile: Profile | None = None) -> float:
    """
    Evaluate −(d/dr)Φ_σ(r) = −Φ'(r/σ)/σ.

    Raises:
        DomainError: If r or sigma is not positive
    """
    _positive(sigma, "sigma")
    potential = PairPotential(sigma, profile or InverseLinearProfile())
    return float(potential.force_magnitude(r))


@dataclass
class AdmissibilityReport:
    """Grid checks of the admissibility conditions on a profile."""

    profile_id: str
    blows_up_at_zero: bool
    nonincreasing: bool
    convex: bool
    support_is_unit_interval: bool

    @property
    def passed(self) -> bool:
        return (
            self.blows_up_at_zero
            and self.nonincreasing
            and self.convex
            and self.support_is_unit_interval
        )


def check_admissible(profile: Profile, grid_size: int = 2001) -> AdmissibilityReport:
    """
    Check Φ(0⁺) = +∞, Φ' ≤ 0, Φ'' ≥ 0 and Φ ≠ 0 exactly on (0, 1) on a grid.

    The blow-up is checked at u = 1e−6 (value above 1e5).
    """
    u = np.concatenate([np.geomspace(1e-6, 0.5, grid_size // 2), np.linspace(0.5, 3.0, grid_size)])
    values = profile.value(u)
    inside = u < 1.0
    return AdmissibilityReport(
        profile_id=profile.profile_id,
        blows_up_at_zero=bool(profile.value(1e-6) > 1e5),
        nonincreasing=bool(np.all(profile.derivative(u) <= 0.0)),
        convex=bool(np.all(profile.second_derivative(u[inside]) >= 0.0)),
        support_is_unit_interval=bool(
            np.all(values[inside] > 0.0) and np.all(values[~inside] == 0.0)
        ),
    )


def _positive(x: ArrayLike, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} must be positive and finite, got {x!r}")
    return arr
