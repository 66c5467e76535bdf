import pytest
from click.testing import CliRunner

from tigris_ipp import cli as cli_module
from tigris_ipp.cli import EXIT_INPUT, EXIT_OK, EXIT_RUNTIME, cli, main
from tigris_ipp.information import ContractViolation
from tigris_ipp.planners import PlanningInputError
from tigris_ipp.scenario import load_result, load_scenario, load_trials


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    result = runner.invoke(cli, list(args), catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


class TestPlan:
    def test_generated_scenario(self, runner, tmp_path):
        out = tmp_path / "result.yaml"
        saved = tmp_path / "scenario.yaml"
        invoke(
            runner, "plan", "--seed", "4", "--iterations", "5",
            "--out", str(out), "--save-scenario", str(saved),
        )
        result = load_result(out)
        assert result.planner == "tigris"
        assert result.iterations == 5
        scenario = load_scenario(saved)
        assert scenario.seed == 4
        assert result.start == scenario.start

    def test_scenario_file_and_baseline(self, runner, tmp_path):
        saved = tmp_path / "scenario.yaml"
        invoke(runner, "plan", "--iterations", "1", "--out", str(tmp_path / "a.yaml"), "--save-scenario", str(saved))
        out = tmp_path / "rig.yaml"
        invoke(runner, "plan", "--scenario", str(saved), "--planner", "rig", "--iterations", "5", "--out", str(out))
        assert load_result(out).planner == "rig"

    def test_unknown_planner(self, runner):
        result = runner.invoke(cli, ["plan", "--planner", "rrt"])
        assert result.exit_code != 0


class TestBench:
    def test_writes_report(self, runner, tmp_path):
        result = invoke(
            runner, "bench", "--trials", "2", "--iterations", "3", "--count", "2",
            "--jobs", "2", "--threads", "--out", str(tmp_path),
        )
        assert "all" in result.output
        records = load_trials(tmp_path / "trials.yaml")
        assert [(r.seed, r.planner) for r in records] == [
            (0, "tigris"), (0, "rig"), (1, "tigris"), (1, "rig")
        ]
        assert all(r.centroid_count == 2 for r in records)
        assert (tmp_path / "report.yaml").read_text().startswith("---")


class TestRender:
    def test_render(self, runner, tmp_path):
        scenario = tmp_path / "scenario.yaml"
        result = tmp_path / "result.yaml"
        invoke(runner, "plan", "--iterations", "3", "--out", str(result), "--save-scenario", str(scenario))
        out = tmp_path / "render"
        invoke(
            runner, "render", "--scenario", str(scenario), "--result", str(result),
            "--out", str(out), "--sensor-curve",
        )
        assert sorted(p.name for p in out.iterdir()) == [
            "heatmap.pgm", "path_tigris.csv", "sensor_curve.csv"
        ]


class TestOracle:
    def test_edge(self, runner):
        result = invoke(runner, "oracle", "edge", "--samples", "5", "--edges", "1")
        assert "min_range:" in result.output
        assert "edge_reward:" in result.output


class TestMain:
    def test_ok(self, tmp_path):
        assert main(["plan", "--iterations", "1", "--out", str(tmp_path / "r.yaml")]) == EXIT_OK

    def test_missing_file(self, tmp_path):
        assert main(["plan", "--scenario", str(tmp_path / "missing.yaml")]) == EXIT_INPUT

    def test_bad_yaml(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("map: [")
        assert main(["plan", "--scenario", str(path)]) == EXIT_INPUT

    def test_usage_errors(self):
        assert main(["frobnicate"]) == EXIT_INPUT
        assert main(["plan", "--iterations", "1", "--seconds", "1"]) == EXIT_INPUT

    def test_invalid_values(self):
        assert main(["bench", "--trials", "0"]) == EXIT_INPUT

    def test_runtime_failure(self, monkeypatch):
        def explode(*args, **kwargs):
            raise RuntimeError("boom")

        monkeypatch.setattr(cli_module, "run_benchmark", explode)
        assert main(["bench", "--trials", "1"]) == EXIT_RUNTIME

    def test_runtime_value_errors(self, monkeypatch):
        def overspend(*args, **kwargs):
            raise ValueError("Node cost 3001.0 exceeds the budget 3000.0.")

        monkeypatch.setattr(cli_module, "run_benchmark", overspend)
        assert main(["bench", "--trials", "1"]) == EXIT_RUNTIME

    def test_broken_path_is_a_runtime_failure(self, monkeypatch, tmp_path):
        class Broken:
            def __init__(self, *args):
                pass

            def plan(self, start):
                raise ContractViolation("Edge 1 does not start where edge 0 ends.")

        monkeypatch.setattr(cli_module, "get_planner", lambda name: Broken)
        assert main(["plan", "--out", str(tmp_path / "r.yaml")]) == EXIT_RUNTIME

    def test_unusable_start_is_an_input_error(self, monkeypatch, tmp_path):
        class Blocked:
            def __init__(self, *args):
                pass

            def plan(self, start):
                raise PlanningInputError(f"Start {start} lies inside a no-fly zone.")

        monkeypatch.setattr(cli_module, "get_planner", lambda name: Blocked)
        assert main(["plan", "--out", str(tmp_path / "r.yaml")]) == EXIT_INPUT

    def test_bad_planner_settings(self):
        assert main(["plan", "--iterations", "-3"]) == EXIT_INPUT
        assert main(["bench", "--planner", "rig", "--planner", "rig"]) == EXIT_INPUT
