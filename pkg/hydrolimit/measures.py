"""
Empirical phase-space measures, their macroscopic fields and W1 distances.

A measure is a weighted cloud of atoms (x, v) in R^d × R^d with d ∈ {1, 2}.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
import ot
from numpy.typing import ArrayLike
from scipy.special import gammaln

from .constants import EXACT_W1_MAX_ATOMS, SLICED_PROJECTIONS, SLICED_SEED, LimitTag, W1Mode
from .errors import DomainError

logger = logging.getLogger(__name__)

THREE_LAYER_SPEED = math.sqrt(6.0) / 2.0
WEIGHT_TOLERANCE = 1e-12


@dataclass
class EmpiricalMeasure:
    """Atoms with positions (m, d), velocities (m, d) and weights summing to one."""

    positions: np.ndarray
    velocities: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=float)
        velocities = np.asarray(self.velocities, dtype=float)
        if positions.ndim == 1:
            positions = positions[:, None]
        if velocities.ndim == 1:
            velocities = velocities[:, None]
        self.positions = positions
        self.velocities = velocities
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        if positions.shape != velocities.shape or len(self.weights) != len(positions):
            raise DomainError(
                f"Inconsistent atom arrays: positions {positions.shape}, velocities {velocities.shape}, "
                f"weights {self.weights.shape}"
            )
        if positions.shape[1] not in (1, 2):
            raise DomainError(f"Only dimensions 1 and 2 are supported, got {positions.shape[1]}")
        if not (np.all(np.isfinite(positions)) and np.all(np.isfinite(velocities))):
            raise DomainError("Atom coordinates must be finite")
        if np.any(self.weights <= 0) or abs(self.weights.sum() - 1.0) > WEIGHT_TOLERANCE:
            raise DomainError(f"Weights must be positive and sum to 1, got sum {self.weights.sum()!r}")

    @property
    def dimension(self) -> int:
        return self.positions.shape[1]

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def phase_points(self) -> np.ndarray:
        return np.hstack([self.positions, self.velocities])

    def restricted(self, mask: ArrayLike) -> EmpiricalMeasure:
        """The atoms selected by `mask`, renormalized to a probability measure."""
        mask = np.asarray(mask)
        w = self.weights[mask]
        return EmpiricalMeasure(self.positions[mask], self.velocities[mask], w / w.sum())


def from_state(state) -> EmpiricalMeasure:
    """Uniform weights 1/N on the particles (x_k, u_k) of a 1D or 2D system."""
    positions = np.asarray(state.positions, dtype=float)
    n = len(positions)
    if n == 0:
        raise DomainError("Cannot build a measure from an empty system")
    return EmpiricalMeasure(positions, np.asarray(state.velocities, dtype=float), np.full(n, 1.0 / n))


def push_forward_free(M: EmpiricalMeasure, t: float) -> EmpiricalMeasure:
    """Free transport S_t: (x, v) ↦ (x + t v, v)."""
    return EmpiricalMeasure(M.positions + t * M.velocities, M.velocities.copy(), M.weights.copy())


@dataclass(frozen=True)
class LimitMeasureSpec:
    """A closed-form limit measure at time t, discretized with about m atoms."""

    tag: LimitTag
    t: float
    m: int

    def __post_init__(self):
        if not isinstance(self.tag, LimitTag):
            raise DomainError(f"Unknown limit measure tag {self.tag!r}")
        if self.m < 2:
            raise DomainError(f"Atom budget must be at least 2, got {self.m}")


class _Component(NamedTuple):
    share: float
    offset: float  # interval start (1D) or segment height (2D)
    velocity: tuple[float, ...]


def limit_components(tag: LimitTag, t: float) -> list[_Component]:
    """
    Product components Δ ⊗ δ_v of a limit measure, with their mass shares.

    In 2D Δ is the uniform measure on {(x, offset): 0 ≤ x ≤ 1}; in 1D on [offset, offset + 1].
    The ghost flow is at rest for t ≤ 0, its reversal for t ≥ 0.
    """
    if tag is LimitTag.GHOST:
        if t <= 0:
            return [_Component(1.0, 0.0, (0.0, 0.0))]
        return [_Component(0.5, t, (0.0, 1.0)), _Component(0.5, -t, (0.0, -1.0))]
    if tag is LimitTag.REVERSE:
        if t >= 0:
            return [_Component(1.0, 0.0, (0.0, 0.0))]
        return [_Component(0.5, -t, (0.0, -1.0)), _Component(0.5, t, (0.0, 1.0))]
    if tag is LimitTag.TRANSVERSE:
        return [_Component(0.5, t, (0.0, 1.0)), _Component(0.5, -t, (0.0, -1.0))]
    if tag is LimitTag.TWO_LAYER:
        return [_Component(0.5, t, (1.0,)), _Component(0.5, -t, (-1.0,))]
    if tag is LimitTag.THREE_LAYER:
        c = THREE_LAYER_SPEED
        return [
            _Component(1 / 3, c * t, (c,)),
            _Component(1 / 3, 0.0, (0.0,)),
            _Component(1 / 3, -c * t, (-c,)),
        ]
    raise DomainError(f"Unknown limit measure tag {tag!r}")


def discretize_limit(spec: LimitMeasureSpec) -> EmpiricalMeasure:
    """
    Stratified discretization: each component gets round(share·m) atoms at the
    midpoints of equal sub-intervals of its unit-length support.
    """
    positions, velocities, weights = [], [], []
    for share, offset, velocity in limit_components(spec.tag, spec.t):
        count = max(1, int(round(share * spec.m)))
        mid = (2.0 * np.arange(1, count + 1) - 1.0) / (2.0 * count)
        if len(velocity) == 2:
            positions.append(np.column_stack([mid, np.full(count, offset)]))
        else:
            positions.append((offset + mid)[:, None])
        velocities.append(np.tile(velocity, (count, 1)))
        weights.append(np.full(count, share / count))
    return EmpiricalMeasure(np.vstack(positions), np.vstack(velocities), np.concatenate(weights))


def limit_family(tag: LimitTag, times: ArrayLike, m: int) -> list[tuple[float, EmpiricalMeasure]]:
    return [(float(t), discretize_limit(LimitMeasureSpec(tag, float(t), m))) for t in np.asarray(times)]


class W1Distance(NamedTuple):
    """
    A Wasserstein-1 value together with how it was computed.

    `raw` is the plain average of the one-dimensional distances over the slicing
    directions and `value` = raw / scale; exact values have raw = value and scale 1.
    """

    value: float
    mode: W1Mode
    projections: int = 0
    seed: int | None = None
    raw: float | None = None
    scale: float = 1.0


def w1_distance(
    A: EmpiricalMeasure,
    B: EmpiricalMeasure,
    mode: W1Mode | None = None,
    projections: int = SLICED_PROJECTIONS,
    seed: int = SLICED_SEED,
) -> W1Distance:
    """
    Wasserstein-1 distance under the Euclidean metric on phase space (x, v).

    Exact min-cost transport is used up to EXACT_W1_MAX_ATOMS atoms in total, the
    sliced approximation beyond (or when `mode` asks for it). Sliced values are
    divided by the mean of |⟨θ, e⟩| over unit directions θ, so a pure translation
    gets its full length.

    Raises:
        DomainError: If the measures live in different dimensions
    """
    if A.dimension != B.dimension:
        raise DomainError(f"Dimension mismatch: {A.dimension} vs {B.dimension}")
    if mode is None:
        mode = W1Mode.EXACT if A.size + B.size <= EXACT_W1_MAX_ATOMS else W1Mode.SLICED
    xa, xb = A.phase_points, B.phase_points
    wa, wb = A.weights / A.weights.sum(), B.weights / B.weights.sum()

    if mode is W1Mode.EXACT:
        cost = ot.dist(xa, xb, metric="euclidean")
        value = float(ot.emd2(wa, wb, cost, numItermax=10_000_000))
        value = max(value, 0.0)
        return W1Distance(value, mode, raw=value)

    directions = slicing_directions(xa.shape[1], projections, seed)
    raw = float(ot.sliced_wasserstein_distance(xa, xb, wa, wb, p=1, projections=directions))
    scale = mean_abs_projection(xa.shape[1])
    return W1Distance(raw / scale, mode, projections, seed, raw, scale)


def slicing_directions(dim: int, count: int, seed: int) -> np.ndarray:
    """
    Unit directions as a (dim, count) array.

    In the plane they are equally spaced half-turn angles; higher dimensions draw
    them from a seeded generator.
    """
    if dim == 2:
        angles = (np.arange(count) + 0.5) * math.pi / count
        return np.vstack([np.cos(angles), np.sin(angles)])
    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((dim, count))
    return directions / np.linalg.norm(directions, axis=0, keepdims=True)


def mean_abs_projection(dim: int) -> float:
    """E|⟨θ, e⟩| for θ uniform on the unit sphere of R^dim: Γ(D/2)/(√π Γ((D+1)/2))."""
    return math.exp(gammaln(dim / 2) - gammaln((dim + 1) / 2)) / math.sqrt(math.pi)


@dataclass
class MacroFields:
    """
    Bin-integrated moments of a measure on a 1D or 2D grid.

    Raw sums per bin are stored (mass, momentum, central second and third moment);
    densities and means are derived. Empty bins report u = 0 and e = 0. In 2D `xi2`
    is the trace of the velocity covariance and `xi3` the length of the mean of
    |v − u|²(v − u).
    """

    edges: tuple[np.ndarray, ...]
    mass: np.ndarray
    momentum: np.ndarray
    central2: np.ndarray
    central3: np.ndarray
    time: float = 0.0

    @property
    def dimension(self) -> int:
        return len(self.edges)

    @property
    def volumes(self) -> np.ndarray:
        widths = [np.diff(e) for e in self.edges]
        if len(widths) == 1:
            return widths[0]
        return np.outer(widths[0], widths[1])

    @property
    def centers(self) -> tuple[np.ndarray, ...]:
        return tuple(0.5 * (e[:-1] + e[1:]) for e in self.edges)

    @property
    def occupied(self) -> np.ndarray:
        return self.mass > 0

    @property
    def rho(self) -> np.ndarray:
        return self.mass / self.volumes

    @property
    def u(self) -> np.ndarray:
        """Mean velocity, shape (bins..., d)."""
        return _safe_ratio(self.momentum, self.mass[..., None])

    @property
    def xi2(self) -> np.ndarray:
        return _safe_ratio(self.central2, self.mass)

    @property
    def xi3(self) -> np.ndarray:
        return _safe_ratio(self.central3, self.mass)

    @property
    def e(self) -> np.ndarray:
        return 0.5 * self.xi2

    @property
    def energy(self) -> np.ndarray:
        """Bin-integrated kinetic energy ∫_bin ρ(½|u|² + e)."""
        return 0.5 * (np.sum(self.momentum**2, axis=-1) / np.where(self.occupied, self.mass, 1.0) + self.central2)


def _safe_ratio(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    nonzero = denominator > 0
    return np.where(nonzero, numerator / np.where(nonzero, denominator, 1.0), 0.0)


def default_edges(M: EmpiricalMeasure, count: int | None = None) -> tuple[np.ndarray, ...]:
    """
    Bins of width 1/⌈√N⌉ aligned to multiples of the width and covering the support.

    `count` replaces N when given (e.g. the particle count behind a limit measure).
    """
    n = M.size if count is None else count
    width = 1.0 / math.ceil(math.sqrt(n))
    edges = []
    for axis in range(M.dimension):
        lo = math.floor(M.positions[:, axis].min() / width + 1e-9) * width
        hi = math.ceil(M.positions[:, axis].max() / width - 1e-9) * width
        if hi <= M.positions[:, axis].max():
            hi += width
        if hi <= lo:
            hi = lo + width
        edges.append(np.linspace(lo, hi, int(round((hi - lo) / width)) + 1))
    return tuple(edges)


def _normalize_bins(M: EmpiricalMeasure, bins) -> tuple[np.ndarray, ...]:
    if bins is None:
        return default_edges(M)
    if isinstance(bins, (int, np.integer)):
        edges = []
        for axis in range(M.dimension):
            lo, hi = M.positions[:, axis].min(), M.positions[:, axis].max()
            if hi <= lo:
                hi = lo + 1.0
            edges.append(np.linspace(lo, hi, int(bins) + 1))
        return tuple(edges)
    if isinstance(bins, tuple):
        edges = tuple(np.asarray(e, dtype=float) for e in bins)
    else:
        edges = (np.asarray(bins, dtype=float),)
    if len(edges) != M.dimension:
        raise DomainError(f"Got {len(edges)} edge arrays for a {M.dimension}D measure")
    for e in edges:
        if len(e) < 2 or np.any(np.diff(e) <= 0):
            raise DomainError("Bin edges must be strictly increasing")
    return edges


def bin_index(M: EmpiricalMeasure, edges: tuple[np.ndarray, ...]) -> np.ndarray:
    """
    Flat bin index of every atom; the last bin of each axis is closed on the right.

    Raises:
        DomainError: If an atom lies outside the bins
    """
    flat = np.zeros(M.size, dtype=int)
    for axis, e in enumerate(edges):
        x = M.positions[:, axis]
        if np.any(x < e[0]) or np.any(x > e[-1]):
            raise DomainError(f"Atoms outside the bin cover [{e[0]}, {e[-1]}] on axis {axis}")
        idx = np.clip(np.searchsorted(e, x, side="right") - 1, 0, len(e) - 2)
        flat = flat * (len(e) - 1) + idx
    return flat


def macro_fields(M: EmpiricalMeasure, bins=None, time: float = 0.0) -> MacroFields:
    """
    Per-bin mass, mean velocity and central velocity moments.

    Args:
        M: The measure
        bins: None for the default width 1/⌈√N⌉, a bin count, an edge array (1D) or a
            tuple of edge arrays (2D)
        time: Time stamp carried along

    Raises:
        DomainError: If atoms fall outside the bins
    """
    edges = _normalize_bins(M, bins)
    shape = tuple(len(e) - 1 for e in edges)
    nbins = int(np.prod(shape))
    idx = bin_index(M, edges)
    w = M.weights
    mass = np.bincount(idx, weights=w, minlength=nbins)
    momentum = np.column_stack(
        [np.bincount(idx, weights=w * M.velocities[:, c], minlength=nbins) for c in range(M.dimension)]
    )
    u = _safe_ratio(momentum, mass[:, None])
    fluct = M.velocities - u[idx]
    sq = np.sum(fluct**2, axis=1)
    central2 = np.bincount(idx, weights=w * sq, minlength=nbins)
    if M.dimension == 1:
        central3 = np.bincount(idx, weights=w * fluct[:, 0] ** 3, minlength=nbins)
    else:
        flux = np.column_stack(
            [np.bincount(idx, weights=w * sq * fluct[:, c], minlength=nbins) for c in range(M.dimension)]
        )
        central3 = np.linalg.norm(flux, axis=1)
    return MacroFields(
        edges=edges,
        mass=mass.reshape(shape),
        momentum=momentum.reshape(shape + (M.dimension,)),
        central2=central2.reshape(shape),
        central3=central3.reshape(shape),
        time=time,
    )


def velocity_covariance(M: EmpiricalMeasure, bins=None) -> np.ndarray:
    """Per-bin covariance ∫(v − u)⊗(v − u) dM_{x} / mass, shape (bins..., d, d); zero when empty."""
    edges = _normalize_bins(M, bins)
    shape = tuple(len(e) - 1 for e in edges)
    nbins = int(np.prod(shape))
    idx = bin_index(M, edges)
    fields = macro_fields(M, edges)
    u = fields.u.reshape(nbins, M.dimension)
    fluct = M.velocities - u[idx]
    d = M.dimension
    cov = np.zeros((nbins, d, d))
    for a in range(d):
        for b in range(d):
            cov[:, a, b] = np.bincount(idx, weights=M.weights * fluct[:, a] * fluct[:, b], minlength=nbins)
    mass = fields.mass.reshape(nbins)
    cov = _safe_ratio(cov, mass[:, None, None])
    return cov.reshape(shape + (d, d))


class EnergySplit(NamedTuple):
    """Σ mass |u|², Σ w |v − u|² and Σ w |v|² for one binning."""

    macroscopic: float
    fluctuation: float
    total: float


def energy_split(M: EmpiricalMeasure, bins=None) -> EnergySplit:
    """Split the kinetic energy into its macroscopic and fluctuation parts."""
    fields = macro_fields(M, bins)
    macroscopic = float(np.sum(fields.mass * np.sum(fields.u**2, axis=-1)))
    fluctuation = float(np.sum(fields.central2))
    total = float(np.sum(M.weights * np.sum(M.velocities**2, axis=1)))
    return EnergySplit(macroscopic, fluctuation, total)


@dataclass(frozen=True)
class LipschitzFunction:
    """z ↦ clip(|z − c| − r, 0, 1) or z ↦ clip(⟨θ, z⟩ − b, −1, 1): bounded and 1-Lipschitz."""

    kind: str
    anchor: tuple[float, ...]
    level: float

    def __call__(self, z: np.ndarray) -> np.ndarray:
        anchor = np.asarray(self.anchor)
        if self.kind == "radial":
            return np.clip(np.linalg.norm(z - anchor, axis=1) - self.level, 0.0, 1.0)
        return np.clip(z @ anchor - self.level, -1.0, 1.0)


def lipschitz_battery(phase_dim: int, count: int = 16, seed: int = SLICED_SEED) -> list[LipschitzFunction]:
    """A fixed set of bounded 1-Lipschitz functions on phase space."""
    rng = np.random.default_rng(seed)
    battery = []
    for k in range(count):
        if k % 2 == 0:
            center = rng.uniform(-1.0, 1.0, phase_dim)
            battery.append(LipschitzFunction("radial", tuple(center), float(rng.uniform(0.0, 0.5))))
        else:
            theta = rng.standard_normal(phase_dim)
            theta /= np.linalg.norm(theta)
            battery.append(LipschitzFunction("ramp", tuple(theta), float(rng.uniform(-0.5, 0.5))))
    return battery


class LipschitzGap(NamedTuple):
    max_discrepancy: float
    discrepancies: tuple[float, ...]


def lipschitz_gap(
    A: EmpiricalMeasure,
    B: EmpiricalMeasure,
    functions: Sequence[Callable[[np.ndarray], np.ndarray]] | None = None,
) -> LipschitzGap:
    """
    |∫f dA − ∫f dB| over a battery of bounded 1-Lipschitz f; never exceeds W1(A, B).

    Raises:
        DomainError: If the measures live in different dimensions
    """
    if A.dimension != B.dimension:
        raise DomainError(f"Dimension mismatch: {A.dimension} vs {B.dimension}")
    functions = functions if functions is not None else lipschitz_battery(2 * A.dimension)
    za, zb = A.phase_points, B.phase_points
    gaps = tuple(float(abs(np.dot(A.weights, f(za)) - np.dot(B.weights, f(zb)))) for f in functions)
    return LipschitzGap(max(gaps, default=0.0), gaps)
