"""
Weak-form residuals of the pressureless and the 1D Euler systems.

Measure families are lists of (t, EmpiricalMeasure) with nondecreasing times. A
time may appear twice to carry the left and right states of a velocity jump; the
trapezoid rule then integrates the two smooth pieces separately.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np
from numpy.typing import ArrayLike
from numpy.polynomial.legendre import leggauss
from scipy.integrate import trapezoid

from .checks import CheckList
from .constants import Law, Moment
from .errors import DomainError
from .measures import EmpiricalMeasure, EnergySplit, MacroFields, energy_split, velocity_covariance

logger = logging.getLogger(__name__)

Family = Sequence[tuple[float, EmpiricalMeasure]]

GAUSS_POINTS = 8


def bump(s: np.ndarray) -> np.ndarray:
    """b(s) = exp(−1/(1 − s²)) on |s| < 1, zero elsewhere."""
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1.0
    safe = np.where(inside, s, 0.0)
    return np.where(inside, np.exp(-1.0 / (1.0 - safe**2)), 0.0)


def bump_derivative(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1.0
    safe = np.where(inside, s, 0.0)
    return np.where(inside, bump(safe) * (-2.0 * safe / (1.0 - safe**2) ** 2), 0.0)


class SpaceTimeFunction(Protocol):
    def value(self, t: float, x: np.ndarray) -> np.ndarray: ...

    def dt(self, t: float, x: np.ndarray) -> np.ndarray: ...

    def grad(self, t: float, x: np.ndarray) -> np.ndarray: ...

    @property
    def time_support(self) -> tuple[float, float]: ...


@dataclass(frozen=True)
class TestFunction:
    """
    φ(t, x) = b((t − t0)/τ) Π_i b((x_i − x0_i)/ℓ), smooth with compact support.

    x arguments are (m, d) arrays; values are (m,) arrays, gradients (m, d).
    """

    __test__ = False  # not a pytest class

    t0: float
    x0: tuple[float, ...]
    tau: float
    ell: float
    label: str = ""

    def __post_init__(self):
        if self.tau <= 0 or self.ell <= 0:
            raise DomainError(f"Test function scales must be positive, got tau={self.tau}, ell={self.ell}")

    @property
    def time_support(self) -> tuple[float, float]:
        return self.t0 - self.tau, self.t0 + self.tau

    def _space(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        s = (np.asarray(x, dtype=float).reshape(len(x), -1) - np.asarray(self.x0)) / self.ell
        return bump(s), bump_derivative(s) / self.ell

    def value(self, t: float, x: np.ndarray) -> np.ndarray:
        factors, _ = self._space(x)
        return float(bump((t - self.t0) / self.tau)) * np.prod(factors, axis=1)

    def dt(self, t: float, x: np.ndarray) -> np.ndarray:
        factors, _ = self._space(x)
        return float(bump_derivative((t - self.t0) / self.tau)) / self.tau * np.prod(factors, axis=1)

    def grad(self, t: float, x: np.ndarray) -> np.ndarray:
        factors, derivs = self._space(x)
        time_factor = float(bump((t - self.t0) / self.tau))
        columns = []
        for i in range(factors.shape[1]):
            others = np.prod(np.delete(factors, i, axis=1), axis=1)
            columns.append(time_factor * derivs[:, i] * others)
        return np.column_stack(columns)


@dataclass(frozen=True)
class LinearCombination:
    """Σ c_i φ_i of test functions."""

    terms: tuple[tuple[float, TestFunction], ...]

    @property
    def time_support(self) -> tuple[float, float]:
        lows, highs = zip(*(phi.time_support for _, phi in self.terms))
        return min(lows), max(highs)

    def value(self, t, x):
        return sum(c * phi.value(t, x) for c, phi in self.terms)

    def dt(self, t, x):
        return sum(c * phi.dt(t, x) for c, phi in self.terms)

    def grad(self, t, x):
        return sum(c * phi.grad(t, x) for c, phi in self.terms)


def standard_battery(
    dimension: int,
    t_range: tuple[float, float] = (0.0, 1.0),
    x_ranges: Sequence[tuple[float, float]] | None = None,
) -> list[TestFunction]:
    """Five bumps with centers spread over the region and scales alternating 0.2 and 0.4."""
    x_ranges = list(x_ranges) if x_ranges is not None else [(0.0, 1.0)] * dimension
    if len(x_ranges) != dimension:
        raise DomainError(f"Need {dimension} spatial ranges, got {len(x_ranges)}")
    fractions = [(0.5, 0.5), (0.3, 0.35), (0.7, 0.65), (0.4, 0.8), (0.6, 0.2)]
    scales = [0.4, 0.2, 0.2, 0.4, 0.2]
    battery = []
    t_lo, t_hi = t_range
    for idx, ((ft, fx), scale) in enumerate(zip(fractions, scales)):
        t0 = t_lo + ft * (t_hi - t_lo)
        tau = min(scale, 0.999 * min(t0 - t_lo, t_hi - t0)) if t_hi > t_lo else scale
        x0 = tuple(lo + (fx if axis == 0 else 1.0 - fx) * (hi - lo) for axis, (lo, hi) in enumerate(x_ranges))
        battery.append(TestFunction(t0, x0, tau, scale, label=f"phi{idx + 1}"))
    return battery


def _times(family: Family) -> np.ndarray:
    times = np.array([t for t, _ in family], dtype=float)
    if len(times) < 2:
        raise DomainError("A measure family needs at least two snapshots")
    if np.any(np.diff(times) < 0):
        raise DomainError("Snapshot times must be nondecreasing")
    return times


def _require_cover(times: np.ndarray, phi: SpaceTimeFunction, from_zero: bool = False) -> None:
    lo, hi = phi.time_support
    start = 0.0 if from_zero else lo
    if times[0] > start + 1e-12 or times[-1] < hi - 1e-12:
        raise DomainError(
            f"Snapshots cover [{times[0]}, {times[-1]}] but the test function needs [{start}, {hi}]"
        )


@dataclass(frozen=True)
class PressurelessResidual:
    mass: float
    momentum: np.ndarray


def residual_pressureless(family: Family, phi: SpaceTimeFunction) -> PressurelessResidual:
    """
    ∫∫ (∂_t φ + ∇φ·v) dM_t dt and ∫∫ (∂_t φ + ∇φ·v) v dM_t dt by the trapezoid rule in t.

    Raises:
        DomainError: If the snapshots do not cover the time support of φ
    """
    times = _times(family)
    _require_cover(times, phi)
    mass_rate = np.empty(len(family))
    momentum_rate = np.empty((len(family), family[0][1].dimension))
    for n, (t, M) in enumerate(family):
        transport = phi.dt(t, M.positions) + np.sum(phi.grad(t, M.positions) * M.velocities, axis=1)
        mass_rate[n] = np.dot(M.weights, transport)
        momentum_rate[n] = (M.weights * transport) @ M.velocities
    return PressurelessResidual(
        float(trapezoid(mass_rate, times)), trapezoid(momentum_rate, times, axis=0)
    )


def moment_weight(v: np.ndarray, g: Moment) -> np.ndarray:
    if g is Moment.MASS:
        return np.ones_like(v)
    if g is Moment.MOMENTUM:
        return v
    if g is Moment.ENERGY:
        return 0.5 * v**2
    raise DomainError(f"Unknown moment {g!r}")


def residual_moment_1d(family: Family, phi: SpaceTimeFunction, g: Moment) -> float:
    """
    ∫₀^T ∫ (∂_t φ + v ∂_x φ) g(v) dM_t dt + ∫ φ(0, ·) g dM_0.

    Raises:
        DomainError: If the family does not start at t = 0 or does not reach the end
            of the support of φ
    """
    times = _times(family)
    if abs(times[0]) > 1e-12:
        raise DomainError(f"The initial-term form needs a family starting at t=0, got t={times[0]}")
    _require_cover(times, phi, from_zero=True)
    rates = np.empty(len(family))
    for n, (t, M) in enumerate(family):
        if M.dimension != 1:
            raise DomainError("residual_moment_1d needs 1D measures")
        v = M.velocities[:, 0]
        transport = phi.dt(t, M.positions) + phi.grad(t, M.positions)[:, 0] * v
        rates[n] = np.dot(M.weights, transport * moment_weight(v, g))
    M0 = family[0][1]
    initial = float(np.dot(M0.weights, phi.value(0.0, M0.positions) * moment_weight(M0.velocities[:, 0], g)))
    return float(trapezoid(rates, times)) + initial


def field_densities(fields: MacroFields, law: Law) -> tuple[np.ndarray, np.ndarray]:
    """
    Bin-integrated conserved quantity and flux of one 1D Euler law.

    Fluxes are ρu, ρ(u² + ξ̄²) and ρ(½u³ + (3/2)u ξ̄² + ½ξ̄³), the last being
    ∫ ½v³ dM; the Euler system proper needs ξ̄³ = 0, checked separately.
    """
    m = fields.mass
    u = fields.u[..., 0]
    xi2 = fields.xi2
    if law is Law.MASS:
        return m, m * u
    if law is Law.MOMENTUM:
        return m * u, m * (u**2 + xi2)
    if law is Law.ENERGY:
        return fields.energy, m * (0.5 * u**3 + 1.5 * u * xi2) + 0.5 * fields.central3
    raise DomainError(f"Unknown law {law!r}")


class _CellQuadrature:
    """Gauss-Legendre nodes of every bin, reused across snapshots sharing the edges."""

    def __init__(self, edges: np.ndarray):
        nodes, weights = leggauss(GAUSS_POINTS)
        left, right = edges[:-1], edges[1:]
        half = 0.5 * (right - left)
        self.edges = edges
        self.points = (0.5 * (left + right))[:, None] + half[:, None] * nodes[None, :]
        self.weights = 0.5 * weights[None, :] * np.ones_like(half)[:, None]

    def average(self, values: np.ndarray) -> np.ndarray:
        return np.sum(values.reshape(self.points.shape) * self.weights, axis=1)


def _field_rates(fields: MacroFields, phi: SpaceTimeFunction, law: Law, cells: _CellQuadrature) -> float:
    t = fields.time
    q, f = field_densities(fields, law)
    dt_avg = cells.average(phi.dt(t, cells.points.reshape(-1, 1)))
    edges = cells.edges[:, None]
    jump = np.diff(phi.value(t, edges))
    width = np.diff(cells.edges)
    return float(np.sum(q * dt_avg + f * jump / width))


def residual_fields_1d(
    family: Sequence[MacroFields],
    phi: SpaceTimeFunction,
    law: Law,
    time_weights: ArrayLike | None = None,
    initial: MacroFields | None = None,
) -> float:
    """
    Weak residual of one Euler law on piecewise-constant fields, initial-term form.

    Cell integrals of the test function are exact for ∂_xφ (φ(right) − φ(left)) and
    Gauss-Legendre for φ and ∂_tφ. By default the trapezoid rule integrates over the
    snapshot times, which must start at t = 0. With `time_weights` the snapshots are
    quadrature nodes in time carrying these weights and `initial` holds the fields
    at t = 0.
    """
    times = np.array([f.time for f in family], dtype=float)
    if len(times) < 2 or np.any(np.diff(times) < 0):
        raise DomainError("Field families need at least two snapshots with nondecreasing times")
    if time_weights is None:
        if abs(times[0]) > 1e-12:
            raise DomainError(f"The initial-term form needs a family starting at t=0, got t={times[0]}")
        _require_cover(times, phi, from_zero=True)
        initial = family[0]
    else:
        time_weights = np.asarray(time_weights, dtype=float)
        if time_weights.shape != times.shape:
            raise DomainError(f"Got {len(time_weights)} time weights for {len(times)} snapshots")
        if initial is None or abs(initial.time) > 1e-12:
            raise DomainError("A quadrature-node family needs the fields at t=0 as `initial`")
        if float(np.sum(time_weights)) < phi.time_support[1] - 1e-9:
            raise DomainError("The time quadrature ends before the test function's support")
    cache: dict[bytes, _CellQuadrature] = {}

    def cells_for(fields: MacroFields) -> _CellQuadrature:
        key = fields.edges[0].tobytes()
        if key not in cache:
            cache[key] = _CellQuadrature(fields.edges[0])
        return cache[key]

    rates = np.array([_field_rates(f, phi, law, cells_for(f)) for f in family])
    cells = cells_for(initial)
    q0, _ = field_densities(initial, law)
    initial_term = float(np.sum(q0 * cells.average(phi.value(0.0, cells.points.reshape(-1, 1)))))
    if time_weights is None:
        return float(trapezoid(rates, times)) + initial_term
    return float(np.dot(time_weights, rates)) + initial_term


def gauss_panels(t0: float, t1: float, breaks: ArrayLike = (), max_width: float = 0.02,
                 order: int = GAUSS_POINTS) -> tuple[np.ndarray, np.ndarray]:
    """
    Composite Gauss-Legendre nodes and weights on [t0, t1].

    The interval is cut at every break inside it, and each piece into panels no wider
    than `max_width`.
    """
    if not t1 > t0 or not max_width > 0:
        raise DomainError(f"Need t0 < t1 and a positive panel width, got [{t0}, {t1}], {max_width}")
    cuts = np.unique(np.concatenate([[t0, t1], [b for b in np.asarray(breaks, dtype=float).ravel() if t0 < b < t1]]))
    nodes, weights = leggauss(order)
    all_nodes, all_weights = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        panels = np.linspace(a, b, max(1, math.ceil((b - a) / max_width)) + 1)
        for lo, hi in zip(panels[:-1], panels[1:]):
            half = 0.5 * (hi - lo)
            all_nodes.append(0.5 * (lo + hi) + half * nodes)
            all_weights.append(half * weights)
    return np.concatenate(all_nodes), np.concatenate(all_weights)


@dataclass
class EulerFieldReport(CheckList):
    """Residuals of the three 1D Euler laws per test function, and the third-moment bound."""

    residuals: dict[str, dict[str, float]] = field(default_factory=dict)
    max_xi3: float = 0.0
    snapshots: int = 0


def euler_1d_fields_check(
    family: Sequence[MacroFields],
    battery: Sequence[TestFunction] | None = None,
    tolerance: float = 1e-4,
    xi3_tolerance: float | None = None,
    skip_bins: Callable[[MacroFields], np.ndarray] | None = None,
    time_weights: ArrayLike | None = None,
    initial: MacroFields | None = None,
) -> EulerFieldReport:
    """
    Evaluate the weak Euler residuals of a field family and flag a nonzero third moment.

    `max_xi3` is the largest bin-integrated |∫ (v − u)³ dM| over all bins and snapshots;
    without an explicit `xi3_tolerance` it is checked against `tolerance`. Binning a
    velocity jump produces a spurious third moment, so `skip_bins` may return a mask
    of bins (e.g. those holding a layer endpoint) left out of that maximum.
    `time_weights` and `initial` select quadrature-node families as in
    `residual_fields_1d`.
    """
    if battery is None:
        edges = family[0].edges[0]
        battery = standard_battery(1, (0.0, family[-1].time), [(edges[0], edges[-1])])
    report = EulerFieldReport(snapshots=len(family))
    for phi in battery:
        per_law = {}
        for law in Law:
            value = residual_fields_1d(family, phi, law, time_weights, initial)
            per_law[law.value] = value
            report.at_most(f"{phi.label}:{law.value}", abs(value), tolerance)
        report.residuals[phi.label] = per_law
    report.max_xi3 = max(
        float(np.max(np.abs(np.where(skip_bins(f), 0.0, f.central3)) if skip_bins else np.abs(f.central3)))
        for f in family
    )
    report.at_most("max_xi3", report.max_xi3, tolerance if xi3_tolerance is None else xi3_tolerance)
    return report


@dataclass
class EnergyProfile:
    """Energy split of every snapshot of a family."""

    times: np.ndarray
    macroscopic: np.ndarray
    fluctuation: np.ndarray
    total: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def rows(self) -> list[tuple[float, float, float, float]]:
        return list(zip(self.times.tolist(), self.macroscopic.tolist(), self.fluctuation.tolist(), self.total.tolist()))


def energy_profile(family: Family, bins=None) -> EnergyProfile:
    """Per-snapshot (macroscopic kinetic, fluctuation, total); bins as in macro_fields."""
    splits: list[EnergySplit] = [energy_split(M, bins) for _, M in family]
    return EnergyProfile(
        times=np.array([t for t, _ in family], dtype=float),
        macroscopic=np.array([s.macroscopic for s in splits]),
        fluctuation=np.array([s.fluctuation for s in splits]),
        total=np.array([s.total for s in splits]),
    )


def velocity_spread(family: Family, bins=None, exclude: tuple[float, float] | None = None) -> float:
    """
    Largest per-bin velocity variance (trace of the covariance) over a family.

    Snapshots with times inside `exclude` are skipped; a value near zero means each
    M_{t,x} is a single Dirac mass in velocity, so ∫ v⊗v dM_{t,x} = u⊗u.
    """
    spread = 0.0
    for t, M in family:
        if exclude is not None and exclude[0] <= t <= exclude[1]:
            continue
        cov = velocity_covariance(M, bins)
        spread = max(spread, float(np.max(np.trace(cov, axis1=-2, axis2=-1))))
    if math.isnan(spread):
        raise DomainError("Velocity spread is undefined")
    return spread
