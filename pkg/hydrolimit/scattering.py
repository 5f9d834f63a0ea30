"""
Two-body scattering in a finite-range repulsive central field.

All angle computations run in range units (u = r/σ, a = α/σ); the scattering
angles depend on σ only through those ratios.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import bisect

from .errors import DomainError, NumericalError
from .potential import PairPotential

logger = logging.getLogger(__name__)

QUAD_TOLERANCE = 1e-10
ROOT_TOLERANCE = 1e-12
INVERSION_TOLERANCE = 1e-10


@dataclass(frozen=True)
class ScatteringQuery:
    """
    An incident particle of speed v hitting an equal-mass particle at rest.

    `alpha` is the impact parameter, `coupling` the prefactor c of the pair force
    (1/n in an n-particle system). The relative motion sees the energy
    E = v²/(4c), which is ½v² for the two-body system (c = ½).
    """

    alpha: float
    speed: float
    coupling: float = 0.5

    def __post_init__(self):
        if not self.alpha >= 0.0:
            raise DomainError(f"Impact parameter must be nonnegative, got {self.alpha}")
        if not self.speed > 0.0:
            raise DomainError(f"Speed must be positive, got {self.speed}")
        if not self.coupling > 0.0:
            raise DomainError(f"Coupling must be positive, got {self.coupling}")

    @property
    def energy(self) -> float:
        return self.speed**2 / (4.0 * self.coupling)


@dataclass(frozen=True)
class ScatteringResult:
    """Pericenter radius and angles of one encounter."""

    r_min: float
    pericenter_angle: float
    deflection: float
    time_bound: float


def pericenter_radius(q: ScatteringQuery, p: PairPotential) -> float:
    """
    Solve 1 − α²/r² − Φ_σ(r)/E = 0 for the distance of closest approach.

    Args:
        q: The scattering query (0 ≤ α ≤ σ)
        p: The pair potential

    Returns:
        r_min, equal to σ when α = σ

    Raises:
        DomainError: If α exceeds σ
    """
    a = _range_ratio(q, p)
    return _pericenter_ratio(a, q.energy, p) * p.sigma


def pericenter_angle(q: ScatteringQuery, p: PairPotential) -> float:
    """
    Angle swept from pericenter to infinity, φ(α) ∈ [0, π/2].

    The improper integral ∫ α dr / (r² √(1 − α²/r² − Φ_σ/E)) is split at the range:
    beyond r = σ the integrand is potential-free and integrates to arcsin(α/σ);
    inside, r = r_min(1 + s²) removes the inverse square root at the pericenter.

    Raises:
        DomainError: If α exceeds σ
        NumericalError: If the adaptive quadrature does not converge
    """
    a = _range_ratio(q, p)
    if a == 0.0:
        return 0.0
    if a >= 1.0:
        return math.pi / 2

    energy = q.energy
    u_min = _pericenter_ratio(a, energy, p)
    s_max = math.sqrt(max(1.0 / u_min - 1.0, 0.0))
    profile = p.profile

    def integrand(s: float) -> float:
        s2 = s * s
        u = u_min * (1.0 + s2)
        # radicand divided by s², written without cancellation
        g = a * a * (2.0 + s2) / (u * u) - u_min * float(profile.secant_slope(u_min, u_min * s2)) / energy
        return 2.0 * a * u_min / (u * u * math.sqrt(g))

    value, abserr, info, *message = quad(
        integrand, 0.0, s_max, epsabs=QUAD_TOLERANCE, epsrel=QUAD_TOLERANCE, limit=400, full_output=1
    )
    if message:
        raise NumericalError(
            "Pericenter-angle quadrature did not converge",
            {"alpha_ratio": a, "energy": energy, "abserr": abserr, "evaluations": info["neval"],
             "message": message[0].strip().splitlines()[0]},
        )
    angle = value + math.asin(a)
    return min(max(angle, 0.0), math.pi / 2)


def lab_deflection(q: ScatteringQuery, p: PairPotential) -> float:
    """
    Deflection magnitude θ = π/2 − φ(α) of the incident particle, target initially at rest.

    After the encounter the speeds are v cos θ (incident) and v sin θ (target).
    """
    return math.pi / 2 - pericenter_angle(q, p)


def scatter(q: ScatteringQuery, p: PairPotential) -> ScatteringResult:
    """Compute every quantity of one encounter."""
    phi = pericenter_angle(q, p)
    return ScatteringResult(
        r_min=pericenter_radius(q, p),
        pericenter_angle=phi,
        deflection=math.pi / 2 - phi,
        time_bound=interaction_time_bound(p.sigma, q.speed),
    )


def impact_for_deflection(
    theta_target: float,
    speed: float,
    p: PairPotential,
    coupling: float = 0.5,
    scan_points: int = 33,
) -> float:
    """
    Find an impact parameter whose lab deflection equals theta_target.

    The deflection is continuous in α but is not assumed monotone: a scan over [0, σ]
    finds the first sign change of θ(α) − θ_target, refined by doubling the scan
    when none shows, then bisection closes in on the root.

    Args:
        theta_target: Wanted deflection magnitude in [0, π/2]
        speed: Incident speed
        p: The pair potential
        coupling: Pair-force prefactor (see ScatteringQuery)
        scan_points: Initial number of scan points

    Returns:
        α in [0, σ]

    Raises:
        DomainError: If theta_target lies outside [0, π/2]
        NumericalError: If no bracket is found
    """
    if not 0.0 <= theta_target <= math.pi / 2:
        raise DomainError(f"Target deflection must lie in [0, pi/2], got {theta_target}")
    if theta_target == 0.0:
        return p.sigma
    if theta_target == math.pi / 2:
        return 0.0

    def mismatch(a: float) -> float:
        return lab_deflection(ScatteringQuery(a * p.sigma, speed, coupling), p) - theta_target

    points = scan_points
    while points <= 4097:
        grid = np.linspace(0.0, 1.0, points)
        values = [mismatch(a) for a in grid]
        for a_lo, a_hi, f_lo, f_hi in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
            if f_lo == 0.0:
                return float(a_lo) * p.sigma
            if f_lo * f_hi < 0.0:
                a_star = bisect(mismatch, a_lo, a_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
                residual = abs(mismatch(a_star))
                if residual > INVERSION_TOLERANCE:
                    logger.debug("Deflection inversion residual %.3e at a=%.17g", residual, a_star)
                return float(a_star) * p.sigma
        points = 2 * points - 1
    raise NumericalError(
        "No impact parameter brackets the requested deflection",
        {"theta_target": theta_target, "speed": speed, "coupling": coupling, "scan_points": points},
    )


def interaction_time_bound(sigma: float, speed: float) -> float:
    """Upper bound 4σ/v on the time a pair spends within range."""
    if sigma <= 0 or speed <= 0:
        raise DomainError(f"sigma and speed must be positive, got {sigma}, {speed}")
    return 4.0 * sigma / speed


@dataclass(frozen=True)
class EncounterMeasurement:
    """Quantities measured along an integrated two-body trajectory."""

    deflection: float  # signed; negative is clockwise
    r_min: float
    pericenter_angle: float
    interaction_time: float
    energy_drift: float
    angular_momentum_drift: float


def simulate_encounter(q: ScatteringQuery, p: PairPotential, offset_sign: int = 1) -> EncounterMeasurement:
    """
    Integrate the relative motion of the encounter directly (trajectory oracle).

    Relative coordinates in range units obey ρ'' = −Φ'(|ρ|)/(2E) ρ/|ρ| in time units σ/v.
    With `offset_sign` = +1 the target sits to the left of the incident ray and the
    incident particle turns clockwise.

    Raises:
        NumericalError: If the integrator fails or the pair never leaves the range
    """
    a = _range_ratio(q, p)
    energy = q.energy
    profile = p.profile
    start = 2.0

    def rhs(_t, y):
        x, yy, vx, vy = y
        rho = math.hypot(x, yy)
        scale = -float(profile.derivative(rho)) / (2.0 * energy * rho)
        return [vx, vy, scale * x, scale * yy]

    def range_crossing(_t, y):
        return math.hypot(y[0], y[1]) - 1.0

    def radial_turn(_t, y):
        return y[0] * y[2] + y[1] * y[3]

    radial_turn.direction = 1.0

    y0 = [-start, -offset_sign * a, 1.0, 0.0]
    solution = solve_ivp(
        rhs, (0.0, 2.0 * start + 8.0), y0, method="DOP853", rtol=1e-12, atol=1e-14,
        events=(range_crossing, radial_turn),
    )
    if not solution.success:
        raise NumericalError("Encounter integration failed", {"message": solution.message})

    crossings = solution.t_events[0]
    final = solution.y[:, -1]
    chi = math.atan2(final[3], final[2])
    if a < 1.0 and len(crossings) < 2:
        raise NumericalError("Encounter did not leave the interaction range", {"crossings": len(crossings)})
    duration = (crossings[-1] - crossings[0]) * p.sigma / q.speed if len(crossings) >= 2 else 0.0
    if len(solution.y_events[1]):
        turn = solution.y_events[1][0]
        r_min = math.hypot(turn[0], turn[1])
    else:
        r_min = math.hypot(y0[0], y0[1])
    pericenter = 0.5 * (math.pi - abs(chi))

    def invariants(y):
        rho = math.hypot(y[0], y[1])
        e = y[2] ** 2 + y[3] ** 2 + float(profile.value(rho)) / energy
        l = y[0] * y[3] - y[1] * y[2]
        return e, l

    e0, l0 = invariants(y0)
    e1, l1 = invariants(final)
    return EncounterMeasurement(
        deflection=0.5 * chi,
        r_min=r_min * p.sigma,
        pericenter_angle=pericenter,
        interaction_time=duration,
        energy_drift=abs(e1 - e0) / abs(e0),
        angular_momentum_drift=abs(l1 - l0) / max(abs(l0), 1.0),
    )


def _range_ratio(q: ScatteringQuery, p: PairPotential) -> float:
    a = q.alpha / p.sigma
    if a > 1.0 + 1e-12:
        raise DomainError(f"Impact parameter {q.alpha} exceeds the interaction range {p.sigma}")
    return min(a, 1.0)


def _pericenter_ratio(a: float, energy: float, p: PairPotential) -> float:
    """Root u_min of 1 − a²/u² − Φ(u)/E in (0, 1]."""
    if a >= 1.0:
        return 1.0
    profile = p.profile

    def radicand(u: float) -> float:
        return 1.0 - (a / u) ** 2 - float(profile.value(u)) / energy

    lower = 0.5
    while radicand(lower) >= 0.0:
        lower *= 0.1
        if lower < 1e-300:
            raise NumericalError("Pericenter root not bracketed", {"alpha_ratio": a, "energy": energy})
    if radicand(1.0) <= 0.0:
        return 1.0
    return float(bisect(radicand, lower, 1.0, xtol=ROOT_TOLERANCE, rtol=4 * np.finfo(float).eps, maxiter=500))
