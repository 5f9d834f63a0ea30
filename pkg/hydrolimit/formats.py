"""
Text formats of every artifact a run writes.

Each format is a class of classmethods: `generate` renders an object to text and,
where the artifact is read back, `parse` rebuilds it. Floats are written with
repr so that re-runs are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, is_dataclass
from enum import Enum
from typing import Any, Iterable, Sequence

import numpy as np

from .cascade import CascadePlan, DeflectionSchedule, EncounterRecord
from .collide1d import CollisionEvent, System1D
from .dynamics import PairEvent, ParticleSystem2D
from .errors import FormatError
from .hydro import EnergyProfile
from .measures import EmpiricalMeasure, MacroFields
from .potential import PairPotential


def _num(x: float) -> str:
    return repr(float(x))


def _csv(header: Sequence[str], rows: Iterable[Sequence[Any]], preamble: str = "") -> str:
    buffer = io.StringIO()
    buffer.write(preamble)
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buffer.getvalue()


def _json_default(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Enum):
        return obj.value
    if is_dataclass(obj):
        return asdict(obj)
    raise TypeError(f"Cannot serialize {type(obj).__name__}")


def _dumps(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, default=_json_default) + "\n"


def _loads(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"Invalid {what} JSON: {exc}") from exc


def _require(data: dict, keys: Sequence[str], what: str) -> None:
    if not isinstance(data, dict):
        raise FormatError(f"Invalid {what}: expected a JSON object")
    missing = [k for k in keys if k not in data]
    if missing:
        raise FormatError(f"Invalid {what}: missing {', '.join(missing)}")


def _points(value: Any, what: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"Invalid {what}: {exc}") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise FormatError(f"Invalid {what}: expected a list of [x, y] pairs")
    return arr


@dataclass
class SnapshotRecord:
    """A parsed 2D snapshot."""

    t: float
    positions: np.ndarray
    velocities: np.ndarray

    def to_system(self, potential: PairPotential, coupling: float | None = None) -> ParticleSystem2D:
        return ParticleSystem2D(self.positions, self.velocities, potential, self.t, coupling)


class SnapshotFormat:
    """JSON {t, positions: [[x, y], ...], velocities: [[vx, vy], ...]}."""

    @classmethod
    def generate(cls, state: ParticleSystem2D) -> str:
        return json.dumps(cls._record(state)) + "\n"

    @classmethod
    def generate_many(cls, states: Iterable[ParticleSystem2D]) -> str:
        """One JSON record per line."""
        return "".join(json.dumps(cls._record(s)) + "\n" for s in states)

    @classmethod
    def _record(cls, state: ParticleSystem2D) -> dict[str, Any]:
        return {
            "t": float(state.time),
            "positions": state.positions.tolist(),
            "velocities": state.velocities.tolist(),
        }

    @classmethod
    def parse(cls, text: str) -> SnapshotRecord:
        """
        Parse one snapshot record.

        Raises:
            FormatError: If the record is malformed
        """
        data = _loads(text, "snapshot")
        _require(data, ("t", "positions", "velocities"), "snapshot")
        positions = _points(data["positions"], "snapshot positions")
        velocities = _points(data["velocities"], "snapshot velocities")
        if len(positions) != len(velocities):
            raise FormatError(f"Invalid snapshot: {len(positions)} positions but {len(velocities)} velocities")
        return SnapshotRecord(float(data["t"]), positions, velocities)

    @classmethod
    def parse_many(cls, text: str) -> list[SnapshotRecord]:
        return [cls.parse(line) for line in text.splitlines() if line.strip()]


class EventLogFormat:
    """CSV i,j,t_entry,t_exit of range crossings."""

    HEADER = ("i", "j", "t_entry", "t_exit")

    @classmethod
    def generate(cls, events: Iterable[PairEvent]) -> str:
        return _csv(cls.HEADER, ((e.i, e.j, e.t_entry, e.t_exit) for e in events))

    @classmethod
    def parse(cls, text: str) -> list[PairEvent]:
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(rows[0]) != cls.HEADER:
            raise FormatError(f"Invalid event log: expected header {','.join(cls.HEADER)}")
        events = []
        for line_no, row in enumerate(rows[1:], start=2):
            if len(row) != 4:
                raise FormatError(f"Invalid event log line {line_no}: expected 4 fields, got {len(row)}")
            try:
                events.append(PairEvent(int(row[0]), int(row[1]), float(row[2]), float(row[3])))
            except ValueError as exc:
                raise FormatError(f"Invalid event log line {line_no}: {exc}") from exc
        return events


class PlanFormat:
    """JSON rendering of a cascade plan, including offsets and windows once built."""

    @classmethod
    def generate(cls, plan: CascadePlan) -> str:
        return _dumps(
            {
                "N": plan.N,
                "sigma_N": plan.sigma,
                "profile": plan.profile_id,
                "theta": plan.schedule.theta,
                "phi": plan.schedule.phi,
                "phi_hat": plan.schedule.phi_hat,
                "centers": plan.centers,
                "radii": plan.radii,
                "offsets": plan.offsets,
                "windows": [list(w) for w in plan.windows] if plan.windows is not None else None,
                "encounters": [asdict(e) for e in plan.encounters],
                "sign_convention": plan.sign_convention,
            }
        )

    @classmethod
    def parse(cls, text: str) -> CascadePlan:
        """
        Raises:
            FormatError: If fields are missing or have inconsistent lengths
        """
        data = _loads(text, "plan")
        _require(data, ("N", "sigma_N", "theta", "phi", "phi_hat", "centers", "radii"), "plan")
        N = int(data["N"])
        schedule = DeflectionSchedule(
            N, np.asarray(data["theta"], dtype=float), np.asarray(data["phi"], dtype=float),
            np.asarray(data["phi_hat"], dtype=float),
        )
        centers = _points(data["centers"], "plan centers")
        radii = np.asarray(data["radii"], dtype=float)
        lengths = {len(schedule.theta), len(schedule.phi) - 1, len(schedule.phi_hat), len(centers), len(radii)}
        if lengths != {N}:
            raise FormatError(f"Invalid plan: array lengths do not match N={N}")
        offsets = data.get("offsets")
        windows = data.get("windows")
        try:
            encounters = [EncounterRecord(**e) for e in data.get("encounters", [])]
        except TypeError as exc:
            raise FormatError(f"Invalid plan encounter record: {exc}") from exc
        return CascadePlan(
            N=N,
            sigma=float(data["sigma_N"]),
            schedule=schedule,
            centers=centers,
            radii=radii,
            offsets=None if offsets is None else np.asarray(offsets, dtype=float),
            windows=None if windows is None else [(float(a), float(b)) for a, b in windows],
            encounters=encounters,
            profile_id=data.get("profile", CascadePlan.profile_id),
            sign_convention=data.get("sign_convention", CascadePlan.sign_convention),
        )


class ReportFormat:
    """JSON with sorted keys for reports, summaries and error records."""

    @classmethod
    def generate(cls, report: Any) -> str:
        if hasattr(report, "as_dict"):
            report = report.as_dict()
        return _dumps(report)


class FieldsFormat:
    """CSV of macroscopic fields per bin."""

    @classmethod
    def generate(cls, fields: MacroFields) -> str:
        centers = fields.centers
        rho, u, xi2, xi3, e = fields.rho, fields.u, fields.xi2, fields.xi3, fields.e
        if fields.dimension == 1:
            header = ("bin_center", "rho", "u", "xi2", "xi3", "e")
            rows = (
                (float(centers[0][k]), float(rho[k]), float(u[k, 0]), float(xi2[k]), float(xi3[k]), float(e[k]))
                for k in range(len(rho))
            )
        else:
            header = ("x_center", "y_center", "rho", "u_x", "u_y", "xi2", "xi3", "e")
            rows = (
                (float(centers[0][a]), float(centers[1][b]), float(rho[a, b]), float(u[a, b, 0]),
                 float(u[a, b, 1]), float(xi2[a, b]), float(xi3[a, b]), float(e[a, b]))
                for a in range(rho.shape[0])
                for b in range(rho.shape[1])
            )
        return _csv(header, rows)


class ScatteringTableFormat:
    """CSV alpha,r_min,phi,theta,T_measured,T_bound with a profile/sigma header line."""

    HEADER = ("alpha", "r_min", "phi", "theta", "T_measured", "T_bound")

    @classmethod
    def generate(cls, rows: Iterable[Sequence[float]], profile_id: str, sigma: float) -> str:
        return _csv(cls.HEADER, rows, preamble=f"# profile={profile_id} sigma={_num(sigma)}\n")


class EnergyProfileFormat:
    """CSV t,macro,fluct,total."""

    @classmethod
    def generate(cls, profile: EnergyProfile) -> str:
        return _csv(("t", "macro", "fluct", "total"), profile.rows())


class Snapshot1DFormat:
    """CSV t,x_1..x_N,u_1..u_N."""

    @classmethod
    def generate(cls, snapshots: Sequence[System1D]) -> str:
        if not snapshots:
            raise FormatError("No snapshots to write")
        n = snapshots[0].n
        header = ["t"] + [f"x_{k}" for k in range(1, n + 1)] + [f"u_{k}" for k in range(1, n + 1)]
        rows = ([float(s.time)] + [float(x) for x in s.positions] + [float(u) for u in s.velocities] for s in snapshots)
        return _csv(header, rows)


class CollisionLogFormat:
    """CSV t,type,indices with indices joined by spaces."""

    @classmethod
    def generate(cls, events: Iterable[CollisionEvent]) -> str:
        return _csv(("t", "type", "indices"), ((float(e.time), e.kind.value, " ".join(map(str, e.indices))) for e in events))


class MeasureFormat:
    """JSON {dimension, atoms: [{x, v, w}, ...]}."""

    @classmethod
    def generate(cls, measure: EmpiricalMeasure) -> str:
        atoms = [
            {"x": x.tolist(), "v": v.tolist(), "w": float(w)}
            for x, v, w in zip(measure.positions, measure.velocities, measure.weights)
        ]
        return json.dumps({"dimension": measure.dimension, "atoms": atoms}) + "\n"

    @classmethod
    def parse(cls, text: str) -> EmpiricalMeasure:
        """
        Raises:
            FormatError: If the atom list is malformed or the weights do not sum to one
        """
        data = _loads(text, "measure")
        _require(data, ("dimension", "atoms"), "measure")
        dim = int(data["dimension"])
        atoms = data["atoms"]
        if not atoms:
            raise FormatError("Invalid measure: no atoms")
        try:
            positions = np.array([a["x"] for a in atoms], dtype=float).reshape(len(atoms), dim)
            velocities = np.array([a["v"] for a in atoms], dtype=float).reshape(len(atoms), dim)
            weights = np.array([a["w"] for a in atoms], dtype=float)
            return EmpiricalMeasure(positions, velocities, weights)
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"Invalid measure: {exc}") from exc


def finite_or_none(x: float) -> float | None:
    """JSON-friendly float: None for inf and nan."""
    return float(x) if math.isfinite(x) else None


class TableFormat:
    """Plain CSV table with a header row, used for sweep summaries."""

    @classmethod
    def generate(cls, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        return _csv(header, rows)
