"""Tests for the scenario pipelines on small runs."""

import json
import math

import pytest

from hydrolimit.config import RunConfig, apply_overrides
from hydrolimit.constants import Scenario
from hydrolimit.pipelines import REVERSE_TRANSVERSE_GAP, run, scattering_table, sweep_checks, sweep_trends


def make_config(tmp_path, **overrides):
    return apply_overrides(RunConfig(), {"out": str(tmp_path), **overrides})


class TestTransverse:
    """Tests for the transverse pipeline."""

    def test_passes_and_writes(self, tmp_path):
        """Free flight with no interactions and unit kinetic energy."""
        (result,) = run(make_config(tmp_path, scenario="transverse", N="8", horizon=1.0, snapshots=11))
        assert result.passed
        assert result.directory == tmp_path / "transverse_N8"
        summary = json.loads((result.directory / "summary.json").read_text())
        assert summary["scenario"] == "transverse"
        assert summary["metrics"]["interactions"] == 0
        assert [c["t"] for c in summary["metrics"]["w1"]] == [-0.5, 0.5]
        for name in summary["artifacts"]:
            assert (result.directory / name).exists()

    def test_w1_against_limit_small(self, tmp_path):
        """The empirical transverse measure sits close to its limit."""
        (result,) = run(make_config(tmp_path, scenario="transverse", N="16", horizon=1.0, snapshots=5))
        for comparison in result.summary["metrics"]["w1"]:
            assert comparison["w1"] < 0.1
            assert comparison["lipschitz_gap"] <= comparison["w1"] + 1e-12

    def test_one_result_per_n(self, tmp_path):
        """Every N gets its own directory."""
        results = run(make_config(tmp_path, scenario="transverse", N="4,6", snapshots=3))
        assert [r.N for r in results] == [4, 6]
        assert (tmp_path / "transverse_N6" / "summary.json").exists()


class TestScatter:
    """Tests for the scattering table pipeline."""

    def test_table(self, tmp_path):
        """Rows cover α from 0 to σ_N with times below the bound."""
        (result,) = run(make_config(tmp_path, scenario="scatter", N="2", bins=5))
        assert result.passed
        metrics = result.summary["metrics"]
        assert metrics["rows"] == 5
        assert metrics["phi_at_sigma"] == pytest.approx(math.pi / 2, abs=1e-8)
        lines = (result.directory / "scattering.csv").read_text().splitlines()
        assert lines[0].startswith("# profile=inverse-linear sigma=")
        assert len(lines) == 2 + 5

    def test_scattering_table_rows(self):
        """The table ends at α = σ with no deflection."""
        table, flags = scattering_table(1.0, rows=3)
        assert flags == []
        assert [row[0] for row in table] == [0.0, 0.5, 1.0]
        assert table[-1][3] == pytest.approx(0.0, abs=1e-8)
        assert all(row[4] < row[5] for row in table)


class TestLayers:
    """Tests for the layer pipeline."""

    def test_two_layer_run(self, tmp_path):
        """Collisions match free transport and every artifact is written."""
        (result,) = run(make_config(tmp_path, scenario="layers", N="12", kind="two", snapshots=11))
        metrics = result.summary["metrics"]
        assert metrics["free_transport_discrepancy"] <= 1e-10
        assert metrics["events"]["triple"] == 0
        assert metrics["events"]["binary"] > 0
        for name in ("snapshots.csv", "collisions.csv", "fields.csv", "nonuniqueness.json", "summary.json"):
            assert (result.directory / name).exists()

    def test_three_layer_run(self, tmp_path):
        """Three-layer runs contain triple collisions."""
        (result,) = run(make_config(tmp_path, scenario="layers", N="12", kind="three", snapshots=11))
        assert result.summary["metrics"]["events"]["triple"] > 0
        assert result.summary["metrics"]["free_transport_discrepancy"] <= 1e-10

    @pytest.mark.parametrize("kind, N", [("two", 200), ("three", 198)])
    def test_default_run_passes(self, tmp_path, kind, N):
        """With the default config both layer systems pass every check, the exact Euler residuals included."""
        (result,) = run(make_config(tmp_path, scenario="layers", N=str(N), kind=kind))
        metrics = result.summary["metrics"]
        assert result.passed, metrics
        assert metrics["field_gap"] <= 5.0 / N
        for per_law in metrics["closed_form_residuals"].values():
            assert max(abs(v) for v in per_law.values()) < 1e-4
        report = json.loads((result.directory / "nonuniqueness.json").read_text())
        assert report["passed"]


class TestSweepTrends:
    """Tests for the cross-N trend report."""

    def test_decreasing(self):
        """Strictly decreasing series are flagged as such."""
        summaries = [
            {"metrics": {"w1": [{"t": 0.5, "w1": w}], "tN_measured": t, "tN_bound": 2.0,
                         "max_abs_yQ": y, "max_residual": r}}
            for w, t, y, r in [(0.4, 1.5, 0.3, 0.1), (0.2, 1.2, 0.2, 0.05)]
        ]
        trends = sweep_trends([8, 16], summaries)
        assert trends["w1_decreasing"] == {"0.5": True}
        assert trends["tN_decreasing"]
        assert trends["tN_below_bound"]
        assert trends["yQ_decreasing"]
        assert trends["residual_decreasing"]

    def test_checks_fail_on_growing_w1(self):
        """A W1 that grows with N fails the sweep checks."""
        trends = sweep_trends([8, 16], [
            {"metrics": {"w1": [{"t": 0.5, "w1": w}], "tN_measured": 1.0, "tN_bound": 2.0,
                         "max_abs_yQ": 0.1, "max_residual": r}}
            for w, r in [(0.2, 0.1), (0.3, 0.05)]
        ])
        checks = sweep_checks(trends)
        assert not checks.passed
        assert [c.name for c in checks.failed()] == ["w1_decreasing@0.5"]

    def test_checks_fail_above_bound(self):
        """A measured t_N'' over its bound fails the sweep checks."""
        trends = sweep_trends([8], [{"metrics": {"w1": [], "tN_measured": 2.5, "tN_bound": 2.0,
                                                 "max_abs_yQ": 0.1, "max_residual": 0.1}}])
        assert not sweep_checks(trends).get("tN_below_bound").passed


class TestGhostPipeline:
    """Ghost runs with the default step policy."""

    def test_ghost(self, tmp_path):
        """The N = 8 ghost cascade passes every check."""
        (result,) = run(make_config(tmp_path, scenario="ghost", N="8", snapshots=21))
        assert result.passed
        assert result.scenario is Scenario.GHOST
        assert result.summary["metrics"]["q_energy_after"] == pytest.approx(8 / 9, abs=1e-6)
        for comparison in result.summary["metrics"]["w1"]:
            assert comparison["w1_raw"] == pytest.approx(comparison["w1"] * comparison["w1_scale"])


class TestReversePipeline:
    """Reverse runs against the transverse flow."""

    def test_reverse(self, tmp_path):
        """The merge stops every Q and parts from the transverse flow after t = 0."""
        (result,) = run(make_config(tmp_path, scenario="reverse", N="4", snapshots=21))
        metrics = result.summary["metrics"]
        assert result.passed
        assert metrics["q_energy_after"] == pytest.approx(0.0, abs=1e-12)
        assert metrics["final_speed_P"] == pytest.approx(math.sqrt(5.0), abs=1e-12)
        (after,) = [gap for gap in metrics["w1_vs_transverse"] if gap["t"] > 0]
        assert after["w1"] > REVERSE_TRANSVERSE_GAP
        report = json.loads((result.directory / "report.json").read_text())
        assert "reverse_vs_transverse_w1@0.5" in [c["name"] for c in report["checks"]]


@pytest.mark.slow
class TestSweepPipeline:
    """A real sweep over two ghost runs."""

    def test_sweep_checks(self, tmp_path):
        """The sweep summary gates on its trend checks and every ghost run."""
        results = run(make_config(tmp_path, scenario="sweep", N="8,16", snapshots=21))
        sweep = results[-1]
        assert sweep.scenario is Scenario.SWEEP
        names = [c["name"] for c in sweep.summary["checks"]]
        assert "tN_below_bound" in names
        assert "residual_decreasing" in names
        assert any(name.startswith("w1_decreasing@") for name in names)
        expected = all(c["passed"] for c in sweep.summary["checks"]) and all(r.passed for r in results[:-1])
        assert sweep.passed == expected
        assert all(r.passed for r in results[:-1])
