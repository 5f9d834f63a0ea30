"""
Event-driven elastic collisions of equal-mass point particles on a line.

Two kinds of collision are supported: a binary collision, where the two particles
exchange velocities, and a triple collision of three particles meeting at one point
with the middle one at rest, where the outer two exchange velocities.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from .checks import CheckList
from .constants import CollisionType, LayerKind, LimitTag
from .errors import DomainError, RunawayError, UnsupportedCollisionError
from .hydro import gauss_panels
from .measures import MacroFields, THREE_LAYER_SPEED, limit_components

logger = logging.getLogger(__name__)

SIMULTANEITY_TOLERANCE = 1e-12
REST_TOLERANCE = 1e-12
# spatial bins and widest time panel of the exact layer-field quadrature
QUADRATURE_CELLS = 512
QUADRATURE_PANEL = 0.02


@dataclass
class System1D:
    """Particles on a line; positions are kept in nondecreasing order."""

    positions: np.ndarray
    velocities: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.positions = np.array(self.positions, dtype=float).ravel()
        self.velocities = np.array(self.velocities, dtype=float).ravel()
        if len(self.positions) == 0 or len(self.positions) != len(self.velocities):
            raise DomainError(
                f"Got {len(self.positions)} positions and {len(self.velocities)} velocities"
            )
        if np.any(np.diff(self.positions) < 0):
            raise DomainError("Positions must be sorted")

    @property
    def n(self) -> int:
        return len(self.positions)

    def copy(self) -> System1D:
        return System1D(self.positions.copy(), self.velocities.copy(), self.time)


@dataclass(frozen=True)
class CollisionEvent:
    time: float
    indices: tuple[int, ...]
    kind: CollisionType


def next_events(s: System1D) -> list[CollisionEvent]:
    """
    The earliest group of simultaneous collisions, empty if no pair approaches.

    Raises:
        UnsupportedCollisionError: If particles meet in a pattern other than binary
            or triple-with-resting-middle
    """
    if s.n < 2:
        return []
    x, v = s.positions, s.velocities
    closing = v[:-1] - v[1:]
    approaching = closing > 0
    if not approaching.any():
        return []
    gaps = np.maximum(np.diff(x), 0.0)
    waits = np.full(s.n - 1, math.inf)
    waits[approaching] = gaps[approaching] / closing[approaching]
    first = float(waits.min())
    meeting = np.flatnonzero(waits <= first + SIMULTANEITY_TOLERANCE)

    events = []
    run = [int(meeting[0])]
    for k in meeting[1:]:
        if k == run[-1] + 1:
            run.append(int(k))
        else:
            events.append(_classify(run, s, first))
            run = [int(k)]
    events.append(_classify(run, s, first))
    return events


def _classify(run: list[int], s: System1D, wait: float) -> CollisionEvent:
    t = s.time + wait
    if len(run) == 1:
        return CollisionEvent(t, (run[0], run[0] + 1), CollisionType.BINARY)
    if len(run) == 2 and abs(s.velocities[run[1]]) <= REST_TOLERANCE:
        return CollisionEvent(t, (run[0], run[0] + 1, run[0] + 2), CollisionType.TRIPLE)
    indices = tuple(range(run[0], run[-1] + 2))
    raise UnsupportedCollisionError(
        f"Particles {indices} meet at t={t!r} with velocities {s.velocities[list(indices)].tolist()}"
    )


def apply_event(s: System1D, e: CollisionEvent) -> System1D:
    """Exchange velocities of the two participants, or of the outer two of a triple."""
    out = s.copy()
    first, last = e.indices[0], e.indices[-1]
    out.velocities[first], out.velocities[last] = s.velocities[last], s.velocities[first]
    out.time = e.time
    return out


def _advance(s: System1D, t: float) -> System1D:
    positions = s.positions + (t - s.time) * s.velocities
    # meeting particles may cross by a rounding error
    positions = np.maximum.accumulate(positions)
    return System1D(positions, s.velocities.copy(), t)


@dataclass
class Run1D:
    """Snapshots at the start, after every event group, at sample times and at the end."""

    snapshots: list[System1D] = field(default_factory=list)
    events: list[CollisionEvent] = field(default_factory=list)

    @property
    def final(self) -> System1D:
        return self.snapshots[-1]

    def event_counts(self) -> dict[str, int]:
        counts = Counter(e.kind.value for e in self.events)
        return {kind.value: counts.get(kind.value, 0) for kind in CollisionType}

    def wave_times(self) -> list[float]:
        """Distinct event times in order."""
        return sorted({e.time for e in self.events})


def simulate_1d(s0: System1D, T: float, sample_times: ArrayLike | None = None) -> Run1D:
    """
    Advance to time T, recording a snapshot after every event group and at each sample time.

    Raises:
        DomainError: If T does not lie after the start time
        UnsupportedCollisionError: For collision patterns other than the two supported ones
        RunawayError: After more than 10·N² events
    """
    if not T > s0.time:
        raise DomainError(f"End time {T} must lie after the start time {s0.time}")
    samples = sorted(float(t) for t in np.asarray(sample_times if sample_times is not None else [], dtype=float).ravel()
                     if s0.time < t < T)
    budget = 10 * s0.n**2
    run = Run1D(snapshots=[s0.copy()])
    state = s0.copy()
    while True:
        group = next_events(state)
        t_next = group[0].time if group else math.inf
        while samples and samples[0] < min(t_next, T):
            run.snapshots.append(_advance(state, samples.pop(0)))
        if t_next > T:
            break
        state = _advance(state, t_next)
        for event in group:
            state = apply_event(state, event)
        run.events.extend(group)
        run.snapshots.append(state.copy())
        if len(run.events) > budget:
            raise RunawayError("Collision count exceeds the event budget", {"events": len(run.events), "budget": budget})
    if run.snapshots[-1].time < T:
        run.snapshots.append(_advance(state, T))
    logger.debug("1D run of %d particles to T=%g: %s", s0.n, T, run.event_counts())
    return run


def state_at(run: Run1D, t: float) -> System1D:
    """Free-flight interpolation from the last snapshot at or before t."""
    times = [s.time for s in run.snapshots]
    idx = int(np.searchsorted(times, t, side="right")) - 1
    if idx < 0:
        raise DomainError(f"Time {t} precedes the run")
    return _advance(run.snapshots[idx], t)


def free_transport_equivalence(s0: System1D, t: float, run: Run1D | None = None) -> float:
    """
    Largest phase-space distance between the simulated state at t and free transport of s0.

    Both multisets are sorted by velocity, then position; velocities are only permuted
    by collisions so equal velocities match exactly.
    """
    if t == s0.time:
        return 0.0
    simulated = state_at(run, t) if run is not None else simulate_1d(s0, t).final
    x_sim, v_sim = simulated.positions, simulated.velocities
    x_free = s0.positions + (t - s0.time) * s0.velocities
    v_free = s0.velocities
    if len(x_sim) != len(x_free):
        raise RuntimeError("Particle count changed during the simulation")
    order_sim = np.lexsort((x_sim, v_sim))
    order_free = np.lexsort((x_free, v_free))
    dx = x_sim[order_sim] - x_free[order_free]
    dv = v_sim[order_sim] - v_free[order_free]
    return float(np.max(np.hypot(dx, dv)))


def two_layer_init(N: int) -> System1D:
    """x_k = k/N with velocity +1 for odd k and −1 for even k."""
    if N < 2 or N % 2:
        raise DomainError(f"The two-layer system needs an even N >= 2, got {N}")
    k = np.arange(1, N + 1)
    return System1D(k / N, np.where(k % 2 == 1, 1.0, -1.0))


def three_layer_init(N: int) -> System1D:
    """x_k = k/N with velocities √6/2, 0, −√6/2 repeating."""
    if N < 3 or N % 3:
        raise DomainError(f"The three-layer system needs N divisible by 3, got {N}")
    k = np.arange(1, N + 1)
    pattern = np.array([THREE_LAYER_SPEED, 0.0, -THREE_LAYER_SPEED])
    return System1D(k / N, pattern[(k - 1) % 3])


def layer_init(kind: LayerKind, N: int) -> System1D:
    return two_layer_init(N) if kind is LayerKind.TWO else three_layer_init(N)


def _layers(kind: LayerKind, t: float) -> list[tuple[float, float, float]]:
    """(share, start, velocity) of each layer; layer l covers [start, start + 1)."""
    tag = LimitTag.TWO_LAYER if kind is LayerKind.TWO else LimitTag.THREE_LAYER
    return [(c.share, c.offset, c.velocity[0]) for c in limit_components(tag, t)]


@dataclass(frozen=True)
class LayerMoments:
    rho: float
    u: float
    e: float
    xi2: float
    xi3: float


def layer_moments_closed_form(kind: LayerKind, t: float, x: float) -> LayerMoments:
    """Density, mean velocity and central moments of the layer system at (t, x)."""
    covering = [(share, v) for share, start, v in _layers(kind, t) if start <= x < start + 1.0]
    rho = sum(share for share, _ in covering)
    if rho == 0:
        return LayerMoments(0.0, 0.0, 0.0, 0.0, 0.0)
    u = sum(share * v for share, v in covering) / rho
    xi2 = sum(share * (v - u) ** 2 for share, v in covering) / rho
    xi3 = sum(share * (v - u) ** 3 for share, v in covering) / rho
    return LayerMoments(rho, u, 0.5 * xi2, xi2, xi3)


def layer_fields_closed_form(kind: LayerKind, t: float, x: float) -> tuple[float, float, float]:
    """
    (ρ, u, e) of the two- or three-layer solution at (t, x).

    Layer intervals are closed on the left and open on the right; where ρ = 0 the
    velocity and internal energy are taken to be 0.
    """
    m = layer_moments_closed_form(kind, t, x)
    return m.rho, m.u, m.e


def layer_fields_on_grid(kind: LayerKind, t: float, edges: ArrayLike) -> MacroFields:
    """Exact cell integrals of mass, momentum and central moments of a layer solution."""
    edges = np.asarray(edges, dtype=float)
    left, right = edges[:-1], edges[1:]
    layers = _layers(kind, t)
    masses = np.array(
        [share * np.clip(np.minimum(right, start + 1.0) - np.maximum(left, start), 0.0, None)
         for share, start, _ in layers]
    )
    velocities = np.array([v for _, _, v in layers])
    mass = masses.sum(axis=0)
    momentum = velocities @ masses
    u = np.where(mass > 0, momentum / np.where(mass > 0, mass, 1.0), 0.0)
    deviation = velocities[:, None] - u[None, :]
    return MacroFields(
        edges=(edges,),
        mass=mass,
        momentum=momentum[:, None],
        central2=np.sum(masses * deviation**2, axis=0),
        central3=np.sum(masses * deviation**3, axis=0),
        time=t,
    )


def layer_jump_mask(kind: LayerKind, t: float, edges: ArrayLike, margin: float = 0.0) -> np.ndarray:
    """Bins whose closure, widened by `margin`, holds a layer endpoint."""
    edges = np.asarray(edges, dtype=float)
    left, right = edges[:-1] - margin, edges[1:] + margin
    mask = np.zeros(len(left), dtype=bool)
    for _, start, _ in _layers(kind, t):
        for point in (start, start + 1.0):
            mask |= (left <= point) & (point <= right)
    return mask


def layer_crossing_times(kind: LayerKind, horizon: float) -> np.ndarray:
    """Times in (0, horizon) at which two layer endpoints meet."""
    lines = [(a, v) for _, start, v in _layers(kind, 0.0) for a in (start, start + 1.0)]
    times = set()
    for idx, (a1, v1) in enumerate(lines):
        for a2, v2 in lines[idx + 1:]:
            if v1 != v2:
                t = (a2 - a1) / (v1 - v2)
                if 0.0 < t < horizon:
                    times.add(t)
    return np.array(sorted(times))


def layer_fields_quadrature(
    kind: LayerKind,
    horizon: float,
    cells: int = QUADRATURE_CELLS,
    panel: float = QUADRATURE_PANEL,
) -> tuple[MacroFields, list[MacroFields], np.ndarray]:
    """
    Exact fields of a layer solution at Gauss-Legendre times over [0, horizon].

    Every snapshot lives on a uniform grid of `cells` bins refined by the layer
    endpoints of that time, so each bin holds constant fields. The time panels are
    cut where endpoints meet.

    Returns:
        The fields at t = 0, the fields at the quadrature nodes and the node weights
    """
    if not horizon > 0:
        raise DomainError(f"horizon must be positive, got {horizon}")
    speed = max(abs(v) for _, _, v in _layers(kind, 0.0))
    grid = np.linspace(-speed * horizon, 1.0 + speed * horizon, cells + 1)
    spacing = grid[1] - grid[0]

    def fields_at(t: float) -> MacroFields:
        ends = np.array([p for _, start, _ in _layers(kind, t) for p in (start, start + 1.0)])
        distance = np.min(np.abs(ends[:, None] - grid[None, :]), axis=1)
        inner = ends[(distance > 1e-9 * spacing) & (ends > grid[0]) & (ends < grid[-1])]
        return layer_fields_on_grid(kind, t, np.union1d(grid, inner))

    times, weights = gauss_panels(0.0, horizon, layer_crossing_times(kind, horizon), panel)
    return fields_at(0.0), [fields_at(float(t)) for t in times], weights


def field_sup_difference(t: float, grid: ArrayLike) -> tuple[float, float, float]:
    """sup over the grid of |ρ − ρ̃|, |u − ũ| and |e − ẽ| between the two and three-layer solutions."""
    diffs = np.array(
        [
            np.abs(np.subtract(layer_fields_closed_form(LayerKind.TWO, t, x),
                               layer_fields_closed_form(LayerKind.THREE, t, x)))
            for x in np.asarray(grid, dtype=float)
        ]
    )
    return tuple(float(d) for d in diffs.max(axis=0))


@dataclass
class NonUniquenessReport(CheckList):
    """Field differences between the two layer solutions, which share their initial data."""

    differences: dict[float, tuple[float, float, float]] = field(default_factory=dict)
    euler_reports: dict[str, CheckList] = field(default_factory=dict)


def nonuniqueness_report(
    N: int,
    t_list: ArrayLike,
    grid: ArrayLike | None = None,
    threshold: float = 1.0 / 6.0,
    euler_reports: dict[str, CheckList] | None = None,
) -> NonUniquenessReport:
    """
    Compare the two- and three-layer closed forms at the requested times.

    Differences must vanish at t = 0 and the density difference must reach
    `threshold` from t = 0.25 on. `euler_reports` (one per layer kind) are attached
    and counted in the verdict; `N` sets the default grid resolution.

    Raises:
        DomainError: If a time lies outside [0, 1]
    """
    times = [float(t) for t in np.asarray(t_list, dtype=float).ravel()]
    if any(t < 0 or t > 1 for t in times):
        raise DomainError(f"Comparison times must lie in [0, 1], got {times}")
    if grid is None:
        reach = 1.0 + THREE_LAYER_SPEED
        grid = np.linspace(-reach, 1.0 + reach, 40 * max(N, 100) + 1)
    report = NonUniquenessReport()
    for t in times:
        d_rho, d_u, d_e = field_sup_difference(t, grid)
        report.differences[t] = (d_rho, d_u, d_e)
        if t == 0:
            report.at_most("identical_at_t0", max(d_rho, d_u, d_e), 1e-12)
        elif t >= 0.25:
            report.add(f"rho_differs_at_t={t!r}", d_rho >= threshold, d_rho, threshold)
    for name, sub in (euler_reports or {}).items():
        report.euler_reports[name] = sub
        report.add(f"euler_{name}", sub.passed)
    return report
