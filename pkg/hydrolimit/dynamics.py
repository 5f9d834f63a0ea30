"""
Hamiltonian dynamics of N particles in the plane with finite-range pair forces.

Coordinates are advanced on a fixed-point lattice: positions and velocities are
integers in units of 2^-bits and every step is a velocity Verlet step of one fixed
size whose kicks and drifts are rounded to the lattice. Rounding is odd-symmetric,
so the step map is an exact bijection and running it with negated velocities
retraces a trajectory bit for bit. Stretches of free flight are taken as single
jumps over many steps; a jump moves the particles exactly as the steps would.
"""

from __future__ import annotations

import copy
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from numpy.typing import ArrayLike
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import bisect

from .errors import DomainError, NumericalError, SingularityError
from .potential import PairPotential

logger = logging.getLogger(__name__)

COINCIDENCE_DISTANCE = 1e-12
LATTICE_LIMIT = float(2**62)
# steps kept between a predicted range entry and the end of a free-flight jump
JUMP_MARGIN = 2


@dataclass(frozen=True)
class LatticeState:
    """
    Fixed-point image of a particle system at time origin + index·step.

    `positions` and `velocities` are int64 arrays in units of 2^-bits.
    """

    positions: np.ndarray
    velocities: np.ndarray
    origin: float
    index: int
    step: float
    bits: int

    @property
    def time(self) -> float:
        return self.origin + self.index * self.step

    @property
    def scale(self) -> float:
        return math.ldexp(1.0, self.bits)

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        inverse = 1.0 / self.scale
        return self.positions * inverse, self.velocities * inverse

    def reversed(self) -> LatticeState:
        """Negated velocities at the negated time."""
        return LatticeState(self.positions, -self.velocities, -self.origin, -self.index, self.step, self.bits)

    @classmethod
    def capture(cls, s: ParticleSystem2D, policy: StepPolicy) -> LatticeState:
        """
        Round a system onto the lattice; the step is interaction_fraction·σ/√(2E).

        Raises:
            NumericalError: On step underflow or coordinates outside the lattice range
            SingularityError: If two particles coincide inside the range
        """
        energy = total_energy(s)
        if not math.isfinite(energy):
            raise SingularityError("Coincident particles inside the interaction range", {"time": s.time})
        step = policy.interaction_fraction * s.sigma
        if energy > 0.0:
            step /= math.sqrt(2.0 * energy)
        if step < policy.step_floor:
            raise NumericalError(
                "Integration step underflow", {"time": s.time, "dt": step, "step_floor": policy.step_floor}
            )
        scale = math.ldexp(1.0, policy.lattice_bits)
        return cls(
            _to_lattice(s.positions, scale), _to_lattice(s.velocities, scale), s.time, 0, step, policy.lattice_bits
        )


@dataclass
class ParticleSystem2D:
    """
    Positions and velocities of N equal-mass particles.

    `coupling` is the prefactor of the pair interaction; it defaults to 1/N so that
    the Hamiltonian is Σ ½|u_k|² + (1/N) Σ_{j<k} Φ_σ(|x_k − x_j|). `lattice` is the
    fixed-point state the integrator continues from, at or before `time`.
    """

    positions: np.ndarray
    velocities: np.ndarray
    potential: PairPotential
    time: float = 0.0
    coupling: float | None = None
    lattice: LatticeState | None = None

    def __post_init__(self):
        self.positions = np.array(self.positions, dtype=float).reshape(-1, 2)
        self.velocities = np.array(self.velocities, dtype=float).reshape(-1, 2)
        if len(self.positions) == 0:
            raise DomainError("A particle system needs at least one particle")
        if self.positions.shape != self.velocities.shape:
            raise DomainError(
                f"Got {len(self.positions)} positions but {len(self.velocities)} velocities"
            )
        if not (np.all(np.isfinite(self.positions)) and np.all(np.isfinite(self.velocities))):
            raise DomainError("Particle coordinates must be finite")
        if self.coupling is not None and not self.coupling > 0:
            raise DomainError(f"Coupling must be positive, got {self.coupling}")
        self.time = float(self.time)
        if self.lattice is not None:
            if self.lattice.positions.shape != self.positions.shape:
                raise DomainError("Lattice state does not match the particle count")
            if self.lattice.time > self.time:
                raise DomainError(f"Lattice state at t={self.lattice.time!r} lies after t={self.time!r}")

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def sigma(self) -> float:
        return self.potential.sigma

    @property
    def pair_coupling(self) -> float:
        return self.coupling if self.coupling is not None else 1.0 / self.n

    def copy(self) -> ParticleSystem2D:
        return ParticleSystem2D(
            self.positions.copy(), self.velocities.copy(), self.potential, self.time, self.coupling, self.lattice
        )

    def subsystem(self, indices: Iterable[int]) -> ParticleSystem2D:
        """The particles at `indices`, keeping this system's coupling."""
        idx = list(indices)
        return ParticleSystem2D(
            self.positions[idx], self.velocities[idx], self.potential, self.time, self.pair_coupling
        )


@dataclass(frozen=True)
class PairEvent:
    """An interval during which particles i < j were within range."""

    i: int
    j: int
    t_entry: float
    t_exit: float  # inf if the pair is still interacting at the end of the run

    @property
    def duration(self) -> float:
        return self.t_exit - self.t_entry


@dataclass
class Trajectory:
    """Snapshots in increasing time order plus the range-crossing log."""

    snapshots: list[ParticleSystem2D] = field(default_factory=list)
    events: list[PairEvent] = field(default_factory=list)
    steps: int = 0

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.snapshots])

    @property
    def final(self) -> ParticleSystem2D:
        return self.snapshots[-1]

    def events_for(self, i: int, j: int) -> list[PairEvent]:
        i, j = min(i, j), max(i, j)
        return [e for e in self.events if e.i == i and e.j == j]

    def energy_drift(self, free_only: bool = False) -> float:
        """
        Largest relative deviation of the total energy from its initial value.

        With `free_only` only snapshots where no pair interacts are compared, which
        leaves out the bounded oscillation of the discrete energy inside encounters.
        """
        snapshots = self.snapshots
        if free_only:
            snapshots = [s for s in snapshots if min_pair_distance(s) >= s.sigma]
            if not snapshots:
                return 0.0
        energies = np.array([total_energy(s) for s in snapshots])
        scale = max(abs(energies[0]), np.finfo(float).tiny)
        return float(np.max(np.abs(energies - energies[0])) / scale)

    def momentum_drift(self) -> float:
        momenta = np.array([total_momentum(s) for s in self.snapshots])
        return float(np.max(np.linalg.norm(momenta - momenta[0], axis=1)))


@dataclass(frozen=True)
class StepPolicy:
    """
    Step controls of `integrate`.

    The step is interaction_fraction·σ/√(2E) for the total energy E, so no particle
    moves more than that fraction of the range per step. Inside an interaction the
    step must also stay below stability_factor·√(d_min/a_max), with d_min the
    closest interacting pair.
    """

    interaction_fraction: float = 1e-3
    stability_factor: float = 5e-2
    step_floor: float = 1e-15
    bisection_tolerance: float = 1e-12
    energy_tolerance: float = 1e-6
    lattice_bits: int = 54

    def __post_init__(self):
        for name in ("interaction_fraction", "stability_factor", "step_floor", "bisection_tolerance"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        if int(self.lattice_bits) != self.lattice_bits or not 16 <= self.lattice_bits <= 58:
            raise DomainError(f"lattice_bits must be an integer in [16, 58], got {self.lattice_bits}")
        object.__setattr__(self, "lattice_bits", int(self.lattice_bits))


def accelerations(s: ParticleSystem2D) -> np.ndarray:
    """
    a_k = −c Σ_{j≠k} Φ'_σ(|x_k − x_j|) (x_k − x_j)/|x_k − x_j|, as an (N, 2) array.

    Raises:
        SingularityError: If two particles coincide inside the range
    """
    i, j = np.triu_indices(s.n, 1)
    acc, _, _ = _pair_forces(s.positions, i, j, s.potential, s.pair_coupling)
    return acc


def total_energy(s: ParticleSystem2D) -> float:
    """Kinetic energy plus c Σ_{j<k} Φ_σ(|x_k − x_j|)."""
    kinetic = 0.5 * float(np.sum(s.velocities**2))
    i, j = np.triu_indices(s.n, 1)
    if len(i) == 0:
        return kinetic
    dist = np.linalg.norm(s.positions[i] - s.positions[j], axis=1)
    near = dist < s.sigma
    if np.any(dist[near] <= COINCIDENCE_DISTANCE):
        return math.inf
    potential = float(np.sum(s.potential.value(dist[near]))) if np.any(near) else 0.0
    return kinetic + s.pair_coupling * potential


def total_momentum(s: ParticleSystem2D) -> np.ndarray:
    return s.velocities.sum(axis=0)


def min_pair_distance(s: ParticleSystem2D) -> float:
    i, j = np.triu_indices(s.n, 1)
    if len(i) == 0:
        return math.inf
    return float(np.min(np.linalg.norm(s.positions[i] - s.positions[j], axis=1)))


def reverse(s: ParticleSystem2D, policy: StepPolicy | None = None) -> ParticleSystem2D:
    """
    Same positions, negated velocities and negated time.

    A lattice state strictly before `s.time` is first stepped past it, so the
    reversed lattice state again lies at or before the reversed time.
    """
    lattice = s.lattice
    if lattice is not None and lattice.time < s.time:
        run = LatticeIntegrator(s, policy)
        run.advance(lattice.index + 1)
        lattice = run.lattice()
    return ParticleSystem2D(
        s.positions.copy(), -s.velocities, s.potential, -s.time, s.coupling,
        None if lattice is None else lattice.reversed(),
    )


class LatticeIntegrator:
    """
    Reversible velocity Verlet on the fixed-point lattice of a particle system.

    Forces are evaluated on a candidate list of pairs closer than 2σ that is rebuilt
    before any particle could have crossed the σ-wide skin. Range crossings between
    steps are located by bisection on the Verlet path of the pair and logged as
    `PairEvent`s.
    """

    def __init__(self, system: ParticleSystem2D, policy: StepPolicy | None = None):
        self.policy = policy or StepPolicy()
        lattice = system.lattice or LatticeState.capture(system, self.policy)
        self.potential = system.potential
        self.coupling = system.coupling
        self.sigma = system.sigma
        self.start_time = system.time
        self._pair_coupling = system.pair_coupling
        self._pi, self._pj = np.triu_indices(system.n, 1)

        self.dt = lattice.step
        self.bits = lattice.bits
        self.scale = lattice.scale
        self.origin = lattice.origin
        self.index = lattice.index
        self.x_int = lattice.positions.copy()
        self.v_int = lattice.velocities.copy()
        self.previous: tuple[np.ndarray, np.ndarray] | None = None
        self.events: list[PairEvent] = []
        self.entries: dict[int, float] = {}
        self.steps = 0
        self.jumps = 0

        speed = math.sqrt(2.0 * max(total_energy(system), 0.0)) * 1.01
        per_step = speed * self.dt
        self._refresh_every = int(self.sigma / (2.0 * per_step)) if per_step > 0 else 2**40
        self._refresh_every = max(1, min(self._refresh_every, 2**40))
        self._next_jump_check = self.index
        self._select_candidates()
        self._acc, near = self._forces(self._x())
        self._kick = self._kick_for(self._acc)
        self.active = set(self._candidates[near].tolist())
        for k in self.active:
            self.entries[k] = self.start_time

    @property
    def time(self) -> float:
        return self.origin + self.index * self.dt

    def lattice(self) -> LatticeState:
        return LatticeState(self.x_int.copy(), self.v_int.copy(), self.origin, self.index, self.dt, self.bits)

    def system(self) -> ParticleSystem2D:
        x, v = self._x(), self.v_int / self.scale
        return ParticleSystem2D(x, v, self.potential, self.time, self.coupling, self.lattice())

    def fork(self) -> LatticeIntegrator:
        """An independent copy that can be advanced without touching this one."""
        return copy.deepcopy(self)

    def place(self, k: int, position: ArrayLike) -> None:
        """
        Move particle k, which must be at rest and out of range, to `position`.

        Raises:
            DomainError: If particle k moves or the new position lies in range of another particle
        """
        if np.any(self.v_int[k]):
            raise DomainError(f"Particle {k} is moving and cannot be placed")
        self.x_int[k] = _to_lattice(np.asarray(position, dtype=float).reshape(2), self.scale)
        self.previous = None
        self._select_candidates()
        acc, near = self._forces(self._x())
        if near.any():
            raise DomainError(f"Particle {k} placed inside an interaction range")
        self._acc, self._kick = acc, self._kick_for(acc)

    def index_at(self, t: float) -> int:
        """Largest lattice index whose time is at most t."""
        n = math.floor((t - self.origin) / self.dt)
        while self.origin + (n + 1) * self.dt <= t:
            n += 1
        while self.origin + n * self.dt > t:
            n -= 1
        return n

    def advance(self, target: int, until: Callable[[], bool] | None = None) -> bool:
        """
        Step up to lattice index `target`, jumping over free flight.

        Returns:
            True if `until` became true on the way, which stops the run there
        """
        while self.index < target:
            if not self.active and self.index >= self._next_jump_check:
                free = self._free_steps()
                if free < 2:
                    self._next_jump_check = self.index + max(1, self._refresh_every // 4)
                elif target - self.index >= 2:
                    self._jump(min(free, target - self.index))
                    continue
            self.step()
            if until is not None and until():
                return True
        return False

    def sample(self, t: float) -> ParticleSystem2D:
        """
        The system at time t, at or after the current lattice step's start.

        Between lattice points positions follow the cubic Hermite interpolant of the
        step and velocities are interpolated linearly; the attached lattice state is
        the one at or just before t.
        """
        n = self.index_at(t)
        if n >= self.index:
            self.advance(n)
            if self.time == t:
                return self.system()
            self.advance(n + 1)
        elif n != self.index - 1 or self.previous is None:
            raise DomainError(f"Cannot sample t={t!r} before the current step at t={self.time!r}")
        x0_int, v0_int = self.previous
        x0, v0 = x0_int / self.scale, v0_int / self.scale
        x1, v1 = self._x(), self.v_int / self.scale
        offset = t - (self.origin + n * self.dt)
        path = CubicHermiteSpline([0.0, self.dt], np.stack([x0, x1]), np.stack([v0, v1]), axis=0)
        weight = offset / self.dt
        floor = LatticeState(x0_int.copy(), v0_int.copy(), self.origin, n, self.dt, self.bits)
        return ParticleSystem2D(
            path(offset), v0 + weight * (v1 - v0), self.potential, t, self.coupling, floor
        )

    def step(self) -> None:
        """
        One velocity Verlet step on the lattice.

        Raises:
            NumericalError: If the step is too coarse for an interaction or leaves the lattice range
            SingularityError: If two particles coincide inside the range
        """
        if self.index >= self._candidates_until:
            self._select_candidates()
        x_old, v_old, a_old = self._x(), self.v_int / self.scale, self._acc
        v_half = self.v_int + self._kick
        x_new = self.x_int + self._drift(v_half)
        if np.max(np.abs(x_new)) >= LATTICE_LIMIT:
            raise NumericalError("Positions leave the lattice range", {"time": self.time, "bits": self.bits})
        acc, near = self._forces(x_new / self.scale)
        kick = self._kick_for(acc)
        inside = set(self._candidates[near].tolist())
        if inside:
            self._check_stability(x_new / self.scale, acc, near)
        for k in sorted(inside ^ self.active):
            i, j = int(self._pi[k]), int(self._pj[k])
            offset = _crossing_offset(x_old, v_old, a_old, i, j, self.sigma, self.dt, self.policy.bisection_tolerance)
            crossing = max(self.time + offset, self.start_time)
            if k in inside:
                self.entries[k] = crossing
            else:
                t_entry = self.entries.pop(k, self.start_time)
                if crossing > t_entry:
                    self.events.append(PairEvent(i, j, t_entry, crossing))
                logger.debug("Pair (%d, %d) leaves range at t=%.17g", i, j, crossing)
        self.previous = (self.x_int, self.v_int)
        self.x_int, self.v_int = x_new, v_half + kick
        self._acc, self._kick = acc, kick
        self.active = inside
        self.index += 1
        self.steps += 1

    def closed_events(self) -> list[PairEvent]:
        """Logged windows plus the still open ones with t_exit = inf, by entry time."""
        events = list(self.events)
        for k, t_entry in sorted(self.entries.items()):
            events.append(PairEvent(int(self._pi[k]), int(self._pj[k]), t_entry, math.inf))
        return sorted(events, key=lambda e: (e.t_entry, e.i, e.j))

    def _x(self) -> np.ndarray:
        return self.x_int / self.scale

    def _drift(self, v_int: np.ndarray) -> np.ndarray:
        return np.rint(self.dt * v_int).astype(np.int64)

    def _kick_for(self, acc: np.ndarray) -> np.ndarray:
        kick = np.rint((0.5 * self.dt * self.scale) * acc)
        if not np.all(np.abs(kick) < LATTICE_LIMIT):
            raise NumericalError("Velocity kick leaves the lattice range", {"time": self.time, "bits": self.bits})
        return kick.astype(np.int64)

    def _forces(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ci, cj = self._pi[self._candidates], self._pj[self._candidates]
        acc, _, near = _pair_forces(x, ci, cj, self.potential, self._pair_coupling)
        return acc, near

    def _select_candidates(self) -> None:
        x = self._x()
        dist = np.hypot(*(x[self._pi] - x[self._pj]).T) if len(self._pi) else np.zeros(0)
        self._candidates = np.flatnonzero(dist < 2.0 * self.sigma)
        self._candidates_until = self.index + self._refresh_every

    def _free_steps(self) -> int:
        """Number of steps that certainly pass without any pair entering the range."""
        per_step = self._drift(self.v_int) / self.scale
        wait, _ = _earliest_entry(self._x(), per_step, (self._pi, self._pj), self.sigma)
        if not math.isfinite(wait):
            return 2**62
        return int(min(math.floor(wait), 2**62)) - JUMP_MARGIN

    def _jump(self, m: int) -> None:
        shift = self._drift(self.v_int)
        if np.max(np.abs(self.x_int + m * shift.astype(float))) >= LATTICE_LIMIT:
            raise NumericalError("Free flight leaves the lattice range", {"time": self.time, "steps": m})
        self.x_int = self.x_int + m * shift
        self.previous = (self.x_int - shift, self.v_int)
        self.index += m
        self.jumps += 1
        self._select_candidates()
        acc, near = self._forces(self._x())
        if near.any():
            raise NumericalError("Free-flight jump overshot a range entry", {"time": self.time, "steps": m})
        self._acc, self._kick = acc, self._kick_for(acc)

    def _check_stability(self, x: np.ndarray, acc: np.ndarray, near: np.ndarray) -> None:
        ci, cj = self._pi[self._candidates[near]], self._pj[self._candidates[near]]
        d_min = float(np.min(np.hypot(*(x[ci] - x[cj]).T)))
        a_max = float(np.max(np.hypot(*acc.T)))
        if a_max > 0.0 and self.dt > self.policy.stability_factor * math.sqrt(d_min / a_max):
            raise NumericalError(
                "Integration step too coarse for the interaction",
                {"time": self.time, "dt": self.dt, "d_min": d_min, "a_max": a_max},
            )


def integrate(
    s: ParticleSystem2D,
    t_end: float,
    policy: StepPolicy | None = None,
    sample_times: ArrayLike | None = None,
    check_energy: bool = True,
) -> Trajectory:
    """
    Advance a particle system to t_end.

    A system carrying a lattice state continues from it with the lattice's own step;
    otherwise its coordinates are rounded onto a new lattice.

    Args:
        s: Initial state (not modified)
        t_end: Final time; integration runs backwards when t_end < s.time
        policy: Step controls
        sample_times: Extra times at which snapshots are recorded
        check_energy: Compare the final energy with the initial one when no pair
            interacts at either end

    Returns:
        Trajectory with snapshots at s.time, every sample time and t_end

    Raises:
        NumericalError: On step underflow, a too coarse step or energy drift above
            the policy tolerance
        SingularityError: If two particles coincide inside the range
    """
    policy = policy or StepPolicy()
    if t_end < s.time:
        samples = None if sample_times is None else -np.asarray(sample_times, dtype=float)
        forward = _integrate_forward(reverse(s, policy), -t_end, policy, samples, check_energy)
        return Trajectory(
            snapshots=[reverse(snap, policy) for snap in reversed(forward.snapshots)],
            events=sorted(
                (PairEvent(e.i, e.j, -e.t_exit, -e.t_entry) for e in forward.events),
                key=lambda e: (e.t_entry, e.i, e.j),
            ),
            steps=forward.steps,
        )
    return _integrate_forward(s, t_end, policy, sample_times, check_energy)


def _integrate_forward(
    s: ParticleSystem2D,
    t_end: float,
    policy: StepPolicy,
    sample_times: ArrayLike | None,
    check_energy: bool,
) -> Trajectory:
    run = LatticeIntegrator(s, policy)
    stops = {float(t_end)}
    if sample_times is not None:
        stops.update(float(ts) for ts in np.asarray(sample_times, dtype=float).ravel() if s.time < ts < t_end)

    first = s.copy()
    if first.lattice is None:
        first.lattice = run.lattice()
    trajectory = Trajectory(snapshots=[first])
    for stop in sorted(stops):
        if stop > s.time:
            trajectory.snapshots.append(run.sample(stop))
    trajectory.events = run.closed_events()
    trajectory.steps = run.steps

    if check_energy and not run.entries and min_pair_distance(s) >= s.sigma:
        e0 = total_energy(s)
        e1 = total_energy(trajectory.final)
        drift = abs(e1 - e0) / max(abs(e0), np.finfo(float).tiny)
        if drift > policy.energy_tolerance:
            raise NumericalError(
                "Energy drift above tolerance",
                {"drift": drift, "tolerance": policy.energy_tolerance, "steps": trajectory.steps},
            )
    logger.debug(
        "Integrated to t=%.6g in %d steps and %d jumps, %d pair events",
        t_end, run.steps, run.jumps, len(trajectory.events),
    )
    return trajectory


def _to_lattice(values: ArrayLike, scale: float) -> np.ndarray:
    scaled = np.rint(np.asarray(values, dtype=float) * scale)
    if not np.all(np.abs(scaled) < LATTICE_LIMIT):
        raise NumericalError(
            "Coordinates exceed the lattice range", {"limit": LATTICE_LIMIT / scale}
        )
    return scaled.astype(np.int64)


def _pair_forces(
    x: np.ndarray, i: np.ndarray, j: np.ndarray, potential: PairPotential, coupling: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Accelerations, pair distances and the in-range mask of the listed pairs."""
    acc = np.zeros_like(x)
    if len(i) == 0:
        return acc, np.zeros(0), np.zeros(0, dtype=bool)
    diff = x[i] - x[j]
    dist = np.hypot(diff[:, 0], diff[:, 1])
    near = dist < potential.sigma
    if not near.any():
        return acc, dist, near
    if np.any(dist[near] <= COINCIDENCE_DISTANCE):
        k = int(np.flatnonzero(near & (dist <= COINCIDENCE_DISTANCE))[0])
        raise SingularityError(
            "Coincident particles inside the interaction range", {"i": int(i[k]), "j": int(j[k])}
        )
    magnitude = coupling * potential.force_magnitude(dist[near]) / dist[near]
    force = magnitude[:, None] * diff[near]
    np.add.at(acc, i[near], force)
    np.add.at(acc, j[near], -force)
    return acc, dist, near


def _earliest_entry(x: np.ndarray, v: np.ndarray, pairs, sigma: float) -> tuple[float, int]:
    """Time (in units of v) until the first pair distance drops to σ under free flight, and that pair."""
    i, j = pairs
    if len(i) == 0:
        return math.inf, -1
    dx = x[i] - x[j]
    dv = v[i] - v[j]
    qa = np.sum(dv * dv, axis=1)
    qb = np.sum(dx * dv, axis=1)
    qc = np.maximum(np.sum(dx * dx, axis=1) - sigma * sigma, 0.0)
    disc = qb * qb - qa * qc
    approaching = (qb < 0.0) & (disc >= 0.0)
    if not approaching.any():
        return math.inf, -1
    # stable root of qa t² + 2 qb t + qc = 0
    times = np.full(len(i), math.inf)
    times[approaching] = qc[approaching] / (-qb[approaching] + np.sqrt(disc[approaching]))
    first = int(np.argmin(times))
    return float(times[first]), first


def _crossing_offset(x, v, a, i: int, j: int, sigma: float, dt: float, tol: float) -> float:
    """Partial step h in (0, dt] at which the pair distance crosses σ within a Verlet step."""
    dx, dv, da = x[i] - x[j], v[i] - v[j], a[i] - a[j]

    def gap(h: float) -> float:
        return float(np.linalg.norm(dx + h * dv + 0.5 * h * h * da)) - sigma

    if gap(0.0) * gap(dt) > 0.0:
        return dt
    return float(bisect(gap, 0.0, dt, xtol=tol, maxiter=200))
