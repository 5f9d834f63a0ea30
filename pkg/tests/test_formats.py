"""Tests for artifact formats."""

import json
import math

import numpy as np
import pytest

from hydrolimit.cascade import plan_geometry
from hydrolimit.collide1d import System1D, simulate_1d
from hydrolimit.dynamics import PairEvent, ParticleSystem2D
from hydrolimit.errors import FormatError
from hydrolimit.formats import (
    CollisionLogFormat,
    EventLogFormat,
    FieldsFormat,
    MeasureFormat,
    PlanFormat,
    ReportFormat,
    ScatteringTableFormat,
    Snapshot1DFormat,
    SnapshotFormat,
    finite_or_none,
)
from hydrolimit.checks import CheckList
from hydrolimit.measures import EmpiricalMeasure, macro_fields
from hydrolimit.potential import make_potential


@pytest.fixture
def state():
    return ParticleSystem2D(
        [[0.0, 0.0], [0.25, -0.1]], [[math.sqrt(3.0), 0.0], [0.0, 0.0]], make_potential(0.01), time=0.5
    )


class TestSnapshotFormat:
    """Tests for 2D snapshot records."""

    def test_round_trip(self, state):
        """Floats survive exactly."""
        record = SnapshotFormat.parse(SnapshotFormat.generate(state))
        assert record.t == 0.5
        np.testing.assert_array_equal(record.positions, state.positions)
        np.testing.assert_array_equal(record.velocities, state.velocities)

    def test_jsonl(self, state):
        """One record per line."""
        text = SnapshotFormat.generate_many([state, state])
        assert len(text.splitlines()) == 2
        assert len(SnapshotFormat.parse_many(text)) == 2

    def test_missing_key(self):
        """Records need t, positions and velocities."""
        with pytest.raises(FormatError, match="velocities"):
            SnapshotFormat.parse('{"t": 0, "positions": [[0, 0]]}')

    def test_bad_json(self):
        """Malformed JSON is a format error."""
        with pytest.raises(FormatError):
            SnapshotFormat.parse("{t: 0")

    def test_length_mismatch(self):
        """Positions and velocities must pair up."""
        with pytest.raises(FormatError):
            SnapshotFormat.parse('{"t": 0, "positions": [[0, 0], [1, 0]], "velocities": [[0, 0]]}')

    def test_to_system(self, state):
        """A record rebuilds a particle system."""
        rebuilt = SnapshotFormat.parse(SnapshotFormat.generate(state)).to_system(state.potential)
        assert rebuilt.n == 2
        assert rebuilt.time == 0.5


class TestEventLogFormat:
    """Tests for the range-crossing log."""

    def test_round_trip_with_open_event(self):
        """Open windows are written as inf and read back."""
        events = [PairEvent(0, 1, 0.125, 0.25), PairEvent(0, 2, 0.5, math.inf)]
        text = EventLogFormat.generate(events)
        assert text.splitlines()[0] == "i,j,t_entry,t_exit"
        assert EventLogFormat.parse(text) == events

    def test_wrong_header(self):
        """The header row is checked."""
        with pytest.raises(FormatError):
            EventLogFormat.parse("a,b,c,d\n0,1,0.1,0.2\n")

    def test_short_row(self):
        """Every row has four fields."""
        with pytest.raises(FormatError, match="line 2"):
            EventLogFormat.parse("i,j,t_entry,t_exit\n0,1,0.1\n")


class TestPlanFormat:
    """Tests for cascade plans."""

    def test_geometry_round_trip(self):
        """An unbuilt plan keeps its geometry and has no offsets."""
        plan = plan_geometry(3)
        parsed = PlanFormat.parse(PlanFormat.generate(plan))
        assert parsed.N == 3
        assert parsed.sigma == plan.sigma
        np.testing.assert_array_equal(parsed.centers, plan.centers)
        np.testing.assert_array_equal(parsed.schedule.theta, plan.schedule.theta)
        assert parsed.offsets is None
        assert parsed.windows is None

    def test_keys(self):
        """The rendered plan carries the sign convention and profile."""
        data = json.loads(PlanFormat.generate(plan_geometry(2)))
        assert data["sign_convention"] == "target-left-turns-clockwise"
        assert data["profile"] == "inverse-linear"

    def test_inconsistent_lengths(self):
        """Array lengths must match N."""
        data = json.loads(PlanFormat.generate(plan_geometry(3)))
        data["radii"] = data["radii"][:2]
        with pytest.raises(FormatError, match="N=3"):
            PlanFormat.parse(json.dumps(data))


class TestTables:
    """Tests for CSV tables."""

    def test_fields_1d_columns(self):
        """1D fields have one row per bin."""
        M = EmpiricalMeasure([0.1, 0.6], [1.0, -1.0], [0.5, 0.5])
        text = FieldsFormat.generate(macro_fields(M, np.array([0.0, 0.5, 1.0])))
        lines = text.splitlines()
        assert lines[0] == "bin_center,rho,u,xi2,xi3,e"
        assert lines[1].split(",")[:3] == ["0.25", "1.0", "1.0"]
        assert len(lines) == 3

    def test_scattering_preamble(self):
        """The scattering table starts with its profile and σ."""
        text = ScatteringTableFormat.generate([(0.0, 0.1, 0.0, 1.5, 0.2, 0.4)], "inverse-linear", 0.1)
        assert text.splitlines()[0] == "# profile=inverse-linear sigma=0.1"
        assert text.splitlines()[1] == "alpha,r_min,phi,theta,T_measured,T_bound"

    def test_snapshot_1d(self):
        """Columns t, x_k, u_k."""
        run = simulate_1d(System1D([0.0, 1.0], [1.0, -1.0]), 1.0)
        lines = Snapshot1DFormat.generate(run.snapshots).splitlines()
        assert lines[0] == "t,x_1,x_2,u_1,u_2"
        assert len(lines) == 1 + len(run.snapshots)

    def test_snapshot_1d_empty(self):
        """Nothing to write is an error."""
        with pytest.raises(FormatError):
            Snapshot1DFormat.generate([])

    def test_collision_log(self):
        """Collision rows carry the type and the space-joined indices."""
        run = simulate_1d(System1D([0.0, 1.0], [1.0, -1.0]), 1.0)
        lines = CollisionLogFormat.generate(run.events).splitlines()
        assert lines[1] == "0.5,binary,0 1"


class TestMeasureFormat:
    """Tests for measure files."""

    def test_round_trip(self):
        """A 2D measure survives exactly."""
        M = EmpiricalMeasure([[0.0, 1.0], [0.5, -1.0]], [[0.0, 1.0], [0.0, -1.0]], [0.5, 0.5])
        parsed = MeasureFormat.parse(MeasureFormat.generate(M))
        np.testing.assert_array_equal(parsed.positions, M.positions)
        np.testing.assert_array_equal(parsed.weights, M.weights)

    def test_no_atoms(self):
        """An empty atom list is rejected."""
        with pytest.raises(FormatError):
            MeasureFormat.parse('{"dimension": 1, "atoms": []}')

    def test_bad_weights(self):
        """Weights that do not sum to one are a format error."""
        with pytest.raises(FormatError):
            MeasureFormat.parse('{"dimension": 1, "atoms": [{"x": [0], "v": [0], "w": 0.3}]}')


class TestReportFormat:
    """Tests for JSON reports."""

    def test_checklist(self):
        """Check lists are rendered through as_dict with sorted keys."""
        report = CheckList()
        report.at_most("drift", 1e-9, 1e-6)
        data = json.loads(ReportFormat.generate(report))
        assert data["passed"] is True
        assert data["checks"][0]["name"] == "drift"

    def test_numpy_values(self):
        """Arrays and numpy scalars are serialized."""
        data = json.loads(ReportFormat.generate({"a": np.arange(3), "b": np.float64(0.5)}))
        assert data == {"a": [0, 1, 2], "b": 0.5}

    def test_finite_or_none(self):
        """inf and nan become None."""
        assert finite_or_none(math.inf) is None
        assert finite_or_none(math.nan) is None
        assert finite_or_none(2.0) == 2.0
