"""
The ghost cascade and the two scenarios derived from it.

A fast particle P crosses N particles Q_1..Q_N at rest on the vertical lines
x = k/N. Each encounter deflects P by θ_k and hands the struck Q_k unit speed,
so that after the cascade every particle moves with unit speed while the
macroscopic energy jumped from 0 to 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import brentq

from .checks import CheckList
from .dynamics import (
    LatticeIntegrator,
    LatticeState,
    PairEvent,
    ParticleSystem2D,
    StepPolicy,
    Trajectory,
    integrate,
    min_pair_distance,
    reverse,
)
from .errors import ConstructionError, DomainError
from .potential import PairPotential, make_potential
from .profiles import InverseLinearProfile
from .scattering import impact_for_deflection

logger = logging.getLogger(__name__)

# Q_k on the left of P's ray turns P clockwise
SIGN_CONVENTION = "target-left-turns-clockwise"
# Q particles wait at rest on this height until they are placed
PARK_HEIGHT = 16.0
# relative half-width of the first impact-parameter bracket around the quadrature value
REFINE_BRACKET = 1e-3


@dataclass
class DeflectionSchedule:
    """
    Deflections θ_k, cumulative directions φ_k (φ_0 = 0) and Q directions φ̂_k.

    Arrays are 0-indexed: theta[k-1] = θ_k, phi[k] = φ_k, phi_hat[k-1] = φ̂_k.
    """

    N: int
    theta: np.ndarray
    phi: np.ndarray
    phi_hat: np.ndarray

    def violations(self) -> list[str]:
        """Return descriptions of every failed schedule inequality."""
        problems = []
        phi = self.phi
        for k in range(1, self.N + 1):
            if (k % 2 == 1 and not phi[k] < 0) or (k % 2 == 0 and not phi[k] > 0):
                problems.append(f"phi_{k} has the wrong sign")
            if abs(phi[k]) > math.pi / 4 + 1e-15:
                problems.append(f"|phi_{k}| exceeds pi/4")
            if k > 1 and not abs(phi[k]) < abs(self.theta[k - 1]):
                problems.append(f"|phi_{k}| is not below |theta_{k}|")
            if k + 2 <= self.N and not abs(phi[k]) < abs(phi[k + 2]):
                problems.append(f"|phi_{k}| is not below |phi_{k + 2}|")
        return problems


@dataclass(frozen=True)
class EncounterRecord:
    """What happened when P struck Q_k during construction."""

    k: int
    alpha: float
    side: int  # +1 if Q_k sits left of P's incoming ray
    flipped: bool
    speed_in: float
    deflection: float
    t_entry: float
    t_exit: float
    velocity_mismatch_p: float
    velocity_mismatch_q: float


@dataclass
class CascadePlan:
    """Geometry of the cascade; offsets and windows are filled in by `build_cascade`."""

    N: int
    sigma: float
    schedule: DeflectionSchedule
    centers: np.ndarray  # centers[k-1] = (x_k, y_k)
    radii: np.ndarray  # radii[k-1] = r_k
    offsets: np.ndarray | None = None  # offsets[k-1] = y_{Q_k}
    windows: list[tuple[float, float]] | None = None
    encounters: list[EncounterRecord] = field(default_factory=list)
    profile_id: str = InverseLinearProfile.profile_id
    sign_convention: str = SIGN_CONVENTION

    @property
    def potential(self) -> PairPotential:
        return make_potential(self.sigma, self.profile_id)

    @property
    def coupling(self) -> float:
        return 1.0 / (self.N + 1)


def deflection_schedule(N: int) -> DeflectionSchedule:
    """
    θ_k = (−1)^k arcsin(1/√(N+2−k)), φ_k = Σ_{j≤k} θ_j, φ̂_k = (−1)^{k+1}π/2 + φ_k.

    Raises:
        DomainError: If N < 1
        ConstructionError: If a schedule inequality fails
    """
    _check_n(N)
    k = np.arange(1, N + 1)
    theta = (-1.0) ** k * np.arcsin(1.0 / np.sqrt(N + 2 - k))
    phi = np.concatenate([[0.0], np.cumsum(theta)])
    phi_hat = (-1.0) ** (k + 1) * (math.pi / 2) + phi[1:]
    schedule = DeflectionSchedule(N, theta, phi, phi_hat)
    problems = schedule.violations()
    if problems:
        raise ConstructionError(f"Deflection schedule for N={N} is inconsistent: {'; '.join(problems)}")
    return schedule


def sigma_for(N: int) -> float:
    """Half the admissible bound: σ_N = 1/(4√2 N (N+3)^{3/2})."""
    _check_n(N)
    return 1.0 / (4.0 * math.sqrt(2.0) * N * (N + 3) ** 1.5)


def radius_bound(N: int, sigma: float) -> float:
    return 2.0 * math.sqrt(2.0) * (N + 3) ** 1.5 * sigma


def plan_geometry(N: int, sigma: float | None = None,
                  profile_id: str = InverseLinearProfile.profile_id) -> CascadePlan:
    """
    Centers (k/N, (1/N) Σ_{j<k} tan φ_j) and radii r_k = (r_{k−1} + σ)/cos φ_{k−1} + 5σ.

    Raises:
        ConstructionError: If a radius reaches the admissible bound or 1/N
    """
    schedule = deflection_schedule(N)
    sigma = sigma_for(N) if sigma is None else sigma
    k = np.arange(1, N + 1)
    tangents = np.tan(schedule.phi[:N])
    centers = np.column_stack([k / N, np.cumsum(tangents) / N])
    radii = np.empty(N)
    r = 0.0
    for idx in range(N):
        r = (r + sigma) / math.cos(schedule.phi[idx]) + 5.0 * sigma
        radii[idx] = r
    bound = radius_bound(N, sigma)
    if np.any(radii >= bound) or np.any(radii >= 1.0 / N):
        raise ConstructionError(
            f"Cascade radii for N={N} exceed their bound: max r_k={radii.max():.6g}, bound={bound:.6g}"
        )
    return CascadePlan(N, sigma, schedule, centers, radii, profile_id=profile_id)


@dataclass(frozen=True)
class PathPiece:
    """A segment (finite length) or half-line (infinite length) in the plane."""

    label: str
    origin: tuple[float, float]
    angle: float
    length: float = math.inf

    @property
    def direction(self) -> np.ndarray:
        return np.array([math.cos(self.angle), math.sin(self.angle)])


def _point_distance(point: np.ndarray, piece: PathPiece) -> float:
    origin = np.asarray(piece.origin)
    s = float(np.dot(point - origin, piece.direction))
    s = min(max(s, 0.0), piece.length)
    return float(np.linalg.norm(point - origin - s * piece.direction))


def _intersects(a: PathPiece, b: PathPiece) -> bool:
    da, db = a.direction, b.direction
    denom = da[0] * db[1] - da[1] * db[0]
    if abs(denom) < 1e-15:
        return False
    w = np.asarray(b.origin) - np.asarray(a.origin)
    s = (w[0] * db[1] - w[1] * db[0]) / denom
    t = (w[0] * da[1] - w[1] * da[0]) / denom
    return 0.0 <= s <= a.length and 0.0 <= t <= b.length


def piece_distance(a: PathPiece, b: PathPiece) -> float:
    """Distance between two disjoint segments or half-lines, attained at an endpoint."""
    if _intersects(a, b):
        return 0.0
    candidates = [_point_distance(np.asarray(a.origin), b), _point_distance(np.asarray(b.origin), a)]
    if math.isfinite(a.length):
        candidates.append(_point_distance(np.asarray(a.origin) + a.length * a.direction, b))
    if math.isfinite(b.length):
        candidates.append(_point_distance(np.asarray(b.origin) + b.length * b.direction, a))
    return min(candidates)


def cascade_paths(plan: CascadePlan) -> tuple[list[PathPiece], list[PathPiece]]:
    """P's idealized segments P_1..P_N and the Q half-lines Q_1..Q_N."""
    N = plan.N
    phi, phi_hat = plan.schedule.phi, plan.schedule.phi_hat
    p_pieces, q_pieces = [], []
    for k in range(1, N + 1):
        origin = tuple(plan.centers[k - 1])
        if k < N:
            length = float(np.linalg.norm(plan.centers[k] - plan.centers[k - 1]))
        else:
            length = math.inf
        p_pieces.append(PathPiece(f"P_{k}", origin, float(phi[k]), length))
        q_pieces.append(PathPiece(f"Q_{k}", origin, float(phi_hat[k - 1])))
    return p_pieces, q_pieces


@dataclass
class SeparationReport(CheckList):
    """Pairwise distances between the idealized paths, each checked against 1/N."""

    N: int = 0


def separation_check(plan: CascadePlan) -> SeparationReport:
    """
    Check d(Q_m, Q_n) > 1/N for m ≠ n and d(Q_m, P_n) > 1/N for m < n.

    Each margin is reported as a check whose value is the distance.
    """
    report = SeparationReport(N=plan.N)
    p_pieces, q_pieces = cascade_paths(plan)
    limit = 1.0 / plan.N
    for m in range(plan.N):
        for n in range(m + 1, plan.N):
            d_qq = piece_distance(q_pieces[m], q_pieces[n])
            report.add(f"d(Q_{m + 1},Q_{n + 1})", d_qq > limit, d_qq, limit)
            d_qp = piece_distance(q_pieces[m], p_pieces[n])
            report.add(f"d(Q_{m + 1},P_{n + 1})", d_qp > limit, d_qp, limit)
    return report


def initial_state(plan: CascadePlan, offsets: np.ndarray | None = None,
                  lattice: LatticeState | None = None) -> ParticleSystem2D:
    """
    P at the origin with velocity (√(N+1), 0) and every Q_k at rest at (k/N, y_{Q_k}).

    A given lattice state supplies the coordinates and is attached to the system.
    """
    N = plan.N
    if lattice is not None:
        positions, velocities = lattice.coordinates()
        return ParticleSystem2D(positions, velocities, plan.potential, lattice.time, lattice=lattice)
    offsets = plan.offsets if offsets is None else offsets
    if offsets is None:
        raise DomainError("Cascade offsets are not computed yet")
    positions = np.zeros((N + 1, 2))
    positions[1:, 0] = np.arange(1, N + 1) / N
    positions[1:, 1] = offsets
    velocities = np.zeros((N + 1, 2))
    velocities[0, 0] = math.sqrt(N + 1)
    return ParticleSystem2D(positions, velocities, plan.potential, 0.0)


def expected_velocity_p(schedule: DeflectionSchedule, k: int) -> np.ndarray:
    """Velocity of P after its k-th encounter, √(N+1−k)(cos φ_k, sin φ_k)."""
    phi = schedule.phi[k]
    return math.sqrt(schedule.N + 1 - k) * np.array([math.cos(phi), math.sin(phi)])


def expected_velocity_q(schedule: DeflectionSchedule, k: int) -> np.ndarray:
    """Velocity of Q_k after it was struck, (sin|φ_k|, (−1)^{k+1} cos φ_k)."""
    phi = schedule.phi[k]
    return np.array([math.sin(abs(phi)), (-1) ** (k + 1) * math.cos(phi)])


def build_cascade(
    N: int,
    policy: StepPolicy | None = None,
    profile_id: str = InverseLinearProfile.profile_id,
    velocity_tolerance: float = 1e-4,
) -> tuple[CascadePlan, ParticleSystem2D]:
    """
    Place Q_1..Q_N so that P undergoes the planned sequence of deflections.

    The whole N+1 particle system is integrated on one lattice, with every Q not yet
    placed parked at rest at height PARK_HEIGHT. Each Q_k is placed on x = k/N at the
    perpendicular offset α from P's actual outgoing ray, on the side giving the sign
    (−1)^k; trial runs of the full system then refine α by Brent's method until the
    simulated deflection equals |θ_k|. A wrong deflection sign flips the side once.
    A parked Q at rest never feels a force, so the returned state, with every Q at
    its final place from t = 0, replays the construction step for step.

    Returns:
        The completed plan and the system at t = 0, carrying its lattice state

    Raises:
        ConstructionError: If an encounter fails after the retry, the velocities
            miss the planned ones, or interaction windows overlap
    """
    plan = plan_geometry(N, profile_id=profile_id)
    policy = policy or StepPolicy()
    schedule = plan.schedule

    positions = np.zeros((N + 1, 2))
    positions[1:, 0] = np.arange(1, N + 1) / N
    positions[1:, 1] = PARK_HEIGHT
    velocities = np.zeros((N + 1, 2))
    velocities[0, 0] = math.sqrt(N + 1)
    parked = ParticleSystem2D(positions, velocities, plan.potential, 0.0, plan.coupling)
    run = LatticeIntegrator(parked, policy)
    initial = run.lattice()
    placed = initial.positions.copy()

    offsets = np.empty(N)
    windows: list[tuple[float, float]] = []
    for k in range(1, N + 1):
        search = _EncounterSearch(run, k, N)
        theta = abs(float(schedule.theta[k - 1]))
        alpha0 = impact_for_deflection(theta, search.speed, plan.potential, plan.coupling)
        wanted_sign = -1 if k % 2 == 1 else 1
        side = 1 if k % 2 == 1 else -1

        flipped = False
        if np.sign(search.attempt(alpha0, side).deflection) != wanted_sign:
            logger.warning("Q_%d deflected P with the wrong sign; placing it on the other side", k)
            side, flipped = -side, True
            if np.sign(search.attempt(alpha0, side).deflection) != wanted_sign:
                raise ConstructionError(f"Encounter with Q_{k} deflects P with the wrong sign on both sides")
        trial = search.attempt(search.refine(alpha0, side, theta), side)
        if trial.event is None:
            raise ConstructionError(f"P never reaches the range of Q_{k}")
        others = [e for e in trial.run.events[search.logged:] if (e.i, e.j) != (0, k)]
        if others or trial.run.entries:
            raise ConstructionError(f"Expected one interaction with Q_{k}, got {len(others) + 1} windows")
        window = (trial.event.t_entry, trial.event.t_exit)
        if windows and window[0] <= windows[-1][1]:
            raise ConstructionError(
                f"Interaction window of Q_{k} starts at {window[0]!r} before the previous one ended"
            )

        final = trial.run.system()
        mismatch_p = _relative_mismatch(final.velocities[0], expected_velocity_p(schedule, k))
        mismatch_q = _relative_mismatch(final.velocities[k], expected_velocity_q(schedule, k))
        if max(mismatch_p, mismatch_q) > velocity_tolerance:
            raise ConstructionError(
                f"Velocities after striking Q_{k} miss the plan: "
                f"P off by {mismatch_p:.3e}, Q off by {mismatch_q:.3e} (tolerance {velocity_tolerance:g})"
            )

        offsets[k - 1] = trial.placed[1] / run.scale
        windows.append(window)
        plan.encounters.append(
            EncounterRecord(
                k=k, alpha=trial.alpha, side=side, flipped=flipped, speed_in=search.speed,
                deflection=trial.deflection, t_entry=window[0], t_exit=window[1],
                velocity_mismatch_p=mismatch_p, velocity_mismatch_q=mismatch_q,
            )
        )
        logger.info(
            "Placed Q_%d at y=%.12g (alpha=%.6g, %d trial runs, window [%.9g, %.9g])",
            k, offsets[k - 1], trial.alpha, search.trials, *window,
        )
        placed[k] = trial.placed
        run = trial.run

    plan.offsets = offsets
    plan.windows = windows
    return plan, initial_state(plan, lattice=replace(initial, positions=placed))


@dataclass
class _Trial:
    alpha: float
    run: LatticeIntegrator
    placed: np.ndarray
    deflection: float
    event: PairEvent | None


class _EncounterSearch:
    """Trial runs of the full system with Q_k placed at a given impact parameter."""

    def __init__(self, run: LatticeIntegrator, k: int, N: int):
        self.run = run
        self.k = k
        self.x_q = k / N
        state = run.system()
        self.p_position = state.positions[0]
        self.p_velocity = state.velocities[0]
        self.speed = float(np.linalg.norm(self.p_velocity))
        self.psi = math.atan2(self.p_velocity[1], self.p_velocity[0])
        self.logged = len(run.events)
        reach = self.x_q - self.p_position[0]
        self.limit = run.index_at(run.time + (reach / math.cos(self.psi) + 8.0 * run.sigma) / self.speed) + 1
        self.trials = 0
        self._cache: dict[tuple[float, int], _Trial] = {}

    def attempt(self, alpha: float, side: int) -> _Trial:
        key = (float(alpha), side)
        if key in self._cache:
            return self._cache[key]
        y_q = self.p_position[1] + (side * alpha + (self.x_q - self.p_position[0]) * math.sin(self.psi)) / math.cos(
            self.psi
        )
        trial = self.run.fork()
        trial.place(self.k, (self.x_q, y_q))

        def closed() -> bool:
            return any((e.i, e.j) == (0, self.k) for e in trial.events[self.logged:])

        trial.advance(self.limit, until=closed)
        event = next((e for e in trial.events[self.logged:] if (e.i, e.j) == (0, self.k)), None)
        deflection = 0.0
        if event is not None:
            deflection = _signed_angle(self.p_velocity, trial.v_int[0] / trial.scale)
        result = _Trial(float(alpha), trial, trial.x_int[self.k].copy(), deflection, event)
        self._cache[key] = result
        self.trials += 1
        return result

    def refine(self, alpha0: float, side: int, theta: float) -> float:
        """The impact parameter whose simulated deflection has magnitude theta."""

        def excess(alpha: float) -> float:
            return abs(self.attempt(alpha, side).deflection) - theta

        sigma = self.run.sigma
        width = REFINE_BRACKET
        for _ in range(6):
            lo = max(alpha0 * (1.0 - width), 1e-6 * alpha0)
            hi = min(alpha0 * (1.0 + width), sigma * (1.0 - 1e-12))
            if excess(lo) > 0.0 > excess(hi):
                return float(brentq(excess, lo, hi, xtol=1e-13 * sigma, maxiter=200))
            width *= 4.0
        raise ConstructionError(f"No impact parameter for Q_{self.k} brackets the deflection {theta!r}")


def _signed_angle(u: np.ndarray, w: np.ndarray) -> float:
    return math.atan2(u[0] * w[1] - u[1] * w[0], u[0] * w[0] + u[1] * w[1])


def _relative_mismatch(actual: np.ndarray, expected: np.ndarray) -> float:
    return float(np.linalg.norm(actual - expected) / np.linalg.norm(expected))


def tN_bound(N: int) -> float:
    """Bound (4σ_N + √2/N) Σ_{k=2}^{N+1} k^{−1/2} on the end of the last interaction."""
    return interaction_time_total_bound(N) + free_time_bound(N)


def interaction_time_total_bound(N: int) -> float:
    """Total time spent interacting, at most 4σ_N Σ_{k=2}^{N+1} k^{−1/2}."""
    return 4.0 * sigma_for(N) * _inverse_sqrt_sum(N)


def free_time_bound(N: int) -> float:
    """Total free-flight time of P between encounters, at most (√2/N) Σ_{k=2}^{N+1} k^{−1/2}."""
    return math.sqrt(2.0) / N * _inverse_sqrt_sum(N)


def offset_bound(N: int) -> float:
    """Bound (1/N) Σ_{m=2}^{N+1} m^{−1/2} on every center height |y_k|."""
    return _inverse_sqrt_sum(N) / N


def _inverse_sqrt_sum(N: int) -> float:
    _check_n(N)
    return float(np.sum(1.0 / np.sqrt(np.arange(2, N + 2))))


@dataclass
class CascadeVerification(CheckList):
    """Checks of one full replay; `trajectory` holds the replay itself."""

    trajectory: Trajectory | None = None
    measured_tN: float = math.nan


def replay_sample_times(plan: CascadePlan, horizon: float, extra: int = 0,
                        times: ArrayLike | None = None) -> np.ndarray:
    """Window starts, midpoints and ends, `extra` uniform times up to the horizon, and `times`."""
    samples = [t for t_in, t_out in plan.windows or [] for t in (t_in, 0.5 * (t_in + t_out), t_out)]
    if extra:
        samples.extend(np.linspace(0.0, horizon, extra))
    if times is not None:
        samples.extend(np.asarray(times, dtype=float).ravel())
    return np.unique(np.asarray(samples, dtype=float))


def verify_cascade(
    plan: CascadePlan,
    state0: ParticleSystem2D,
    horizon: float,
    policy: StepPolicy | None = None,
    velocity_tolerance: float = 1e-4,
    window_tolerance: float = 1e-6,
    energy_tolerance: float = 1e-6,
    momentum_tolerance: float = 1e-8,
    extra_samples: int = 0,
    sample_times: ArrayLike | None = None,
) -> CascadeVerification:
    """
    Replay the whole system from t = 0 to `horizon` and check the cascade.

    A state from `build_cascade` carries the lattice state of the construction, so
    the replay repeats it exactly and its windows match the plan's. Failed checks
    are reported, not raised.
    """
    if plan.windows is None or plan.offsets is None:
        raise DomainError("The plan has no offsets; run build_cascade first")
    N = plan.N
    if horizon <= plan.windows[-1][1]:
        raise DomainError(f"Horizon {horizon} ends before the last interaction {plan.windows[-1][1]}")

    policy = policy or StepPolicy(energy_tolerance=math.inf)
    samples = replay_sample_times(plan, horizon, extra_samples, sample_times)
    trajectory = integrate(state0, horizon, policy, samples, check_energy=False)
    report = CascadeVerification(trajectory=trajectory)

    # events between P (index 0) and Q_k (index k)
    windows = []
    stray = []
    for k in range(1, N + 1):
        events = trajectory.events_for(0, k)
        if len(events) == 1:
            windows.append((events[0].t_entry, events[0].t_exit))
        else:
            windows.append((math.nan, math.nan))
            stray.append(f"Q_{k}: {len(events)} interactions")
    stray.extend(f"pair ({e.i}, {e.j})" for e in trajectory.events if e.i != 0)
    report.add("single_interaction_per_Q", not stray, len(stray), 0, "; ".join(stray))

    flat = [t for w in windows for t in w]
    report.add("windows_ordered", all(a < b for a, b in zip(flat[:-1], flat[1:])))
    timing = max((abs(a - b) for a, b in zip(flat, [t for w in plan.windows for t in w])), default=0.0)
    report.at_most("windows_match_plan", timing if math.isfinite(timing) else math.inf, window_tolerance)

    containment = 0.0
    for k in range(1, N + 1):
        t_in, t_out = plan.windows[k - 1]
        center = plan.centers[k - 1]
        for snap in trajectory.snapshots:
            if t_in <= snap.time <= t_out:
                for idx in (0, k):
                    gap = float(np.linalg.norm(snap.positions[idx] - center)) - plan.radii[k - 1]
                    containment = max(containment, gap)
    report.at_most("contained_in_discs", containment, 0.0)

    final = trajectory.final
    mismatch = max(
        [_relative_mismatch(final.velocities[0], expected_velocity_p(plan.schedule, N))]
        + [_relative_mismatch(final.velocities[k], expected_velocity_q(plan.schedule, k)) for k in range(1, N + 1)]
    )
    report.at_most("terminal_velocities", mismatch, velocity_tolerance)

    t_last = plan.windows[-1][1]
    late = [e for e in trajectory.events if e.t_entry > t_last + window_tolerance]
    report.add("separated_after_cascade", not late, len(late), 0)
    report.add("min_distance_at_horizon", min_pair_distance(final) >= plan.sigma, min_pair_distance(final), plan.sigma)

    report.at_most("energy_drift", trajectory.energy_drift(free_only=True), energy_tolerance)
    report.at_most("momentum_drift", trajectory.momentum_drift(), momentum_tolerance)

    report.measured_tN = windows[-1][1]
    report.at_most("tN_below_bound", report.measured_tN, tN_bound(N))

    offset_excess = float(np.max(np.abs(plan.offsets) - (np.abs(plan.centers[:, 1]) + plan.radii)))
    report.at_most("offsets_near_centers", offset_excess, 0.0)
    report.at_most("centers_below_offset_bound", float(np.max(np.abs(plan.centers[:, 1]))), offset_bound(N))
    logger.info("Cascade N=%d replay to t=%g: %s", N, horizon, "passed" if report.passed else "FAILED")
    return report


def subsystem_energy(trajectory: Trajectory, indices: list[int] | None = None) -> np.ndarray:
    """
    Kinetic energy (1/n) Σ |v|² of a subsystem at every snapshot, n the full particle count.

    Defaults to the Q particles (every index but 0).
    """
    n = trajectory.snapshots[0].n
    idx = list(range(1, n)) if indices is None else list(indices)
    return np.array([float(np.sum(s.velocities[idx] ** 2)) / n for s in trajectory.snapshots])


def transverse_init(N: int, sigma: float | None = None,
                    profile_id: str = InverseLinearProfile.profile_id) -> ParticleSystem2D:
    """
    Particles at (j/N, 0) moving up for odd j and down for even j.

    With σ < 1/N horizontal neighbours never interact, so the motion is free flight.

    Raises:
        DomainError: If N is odd or σ ≥ 1/N
    """
    _check_n(N)
    if N % 2:
        raise DomainError(f"The transverse flow needs an even particle count, got N={N}")
    sigma = sigma_for(N) if sigma is None else sigma
    if sigma >= 1.0 / N:
        raise DomainError(f"Interaction range {sigma} must stay below the spacing 1/{N}")
    j = np.arange(1, N + 1)
    positions = np.column_stack([j / N, np.zeros(N)])
    velocities = np.column_stack([np.zeros(N), np.where(j % 2 == 1, 1.0, -1.0)])
    return ParticleSystem2D(positions, velocities, make_potential(sigma, profile_id), 0.0)


def reverse_scenario(
    N: int,
    horizon: float | None = None,
    trajectory: Trajectory | None = None,
    policy: StepPolicy | None = None,
    profile_id: str = InverseLinearProfile.profile_id,
) -> ParticleSystem2D:
    """
    Time reversal of the cascade after it has run to `horizon`.

    The returned state sits at time −horizon; integrating it forward to t = 0 merges
    the unit-speed particles back into a single fast P leaving along −x.

    Args:
        N: Number of Q particles
        horizon: Replay end; defaults to t_N'' + 1
        trajectory: A finished replay to reverse instead of building a new one
    """
    if trajectory is None:
        plan, state0 = build_cascade(N, policy, profile_id)
        horizon = plan.windows[-1][1] + 1.0 if horizon is None else horizon
        trajectory = integrate(state0, horizon, policy or StepPolicy(energy_tolerance=math.inf))
    return reverse(trajectory.final, policy)


def _check_n(N: int) -> None:
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
