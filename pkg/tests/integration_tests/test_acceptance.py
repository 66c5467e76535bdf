import math
from dataclasses import replace

import pytest

from tigris_ipp.bench import run_benchmark
from tigris_ipp.oracles import check_edge_reward, check_lattice, check_min_range
from tigris_ipp.scenario import ScenarioTemplate

from .utils import acceptance
from .utils import settings as settings_fixture

# Hacky workaround to import the fixture without linting errors
settings = settings_fixture

pytestmark = acceptance


def bench(settings, template, trials, base_seed=0):
    return run_benchmark(
        template,
        trials,
        planners=["tigris", "rig"],
        parallelism=settings.NUM_WORKERS,
        base_seed=base_seed,
        use_processes=settings.USE_PROCESSES,
    )


@pytest.fixture(scope="module")
def full_report(settings):
    report, _ = bench(settings, ScenarioTemplate(), 200)
    return report


class TestBenchmark:
    def test_tigris_beats_the_baseline(self, full_report):
        everything = full_report.group("all")
        assert everything.n_trials == 200
        assert everything.p_value < 0.01
        assert everything.percent_difference >= 8.0

    def test_anytime_curves(self, full_report):
        assert full_report.curve_decreases["tigris"] == 0.0
        assert full_report.curve_decreases["rig"] >= 0.1

    def test_sparse_worlds_gain_more(self, settings):
        sparse, _ = bench(settings, ScenarioTemplate(count_range=(1, 3)), 50, base_seed=10_000)
        dense, _ = bench(settings, ScenarioTemplate(count_range=(10, 12)), 50, base_seed=20_000)
        assert sparse.group("1-3").n_trials == 50
        assert dense.group("10-12").n_trials == 50
        assert (
            sparse.group("1-3").percent_difference > dense.group("10-12").percent_difference
        )

    def test_parallelism_is_deterministic(self, settings):
        template = ScenarioTemplate()
        template = replace(template, planner=replace(template.planner, iterations=500))
        _, serial = run_benchmark(template, 8, parallelism=1)
        _, parallel = run_benchmark(
            template, 8, parallelism=4, use_processes=settings.USE_PROCESSES
        )
        assert serial == parallel


class TestOracles:
    def test_min_range(self):
        check = check_min_range(1000, seed=0)
        assert check.samples >= 900
        assert check.within["footprint"] == 1.0
        assert math.isfinite(check.max_error["closed_form"])

    def test_edge_reward(self):
        check = check_edge_reward(100, seed=0)
        assert check.samples >= 90
        assert check.within == 1.0

    def test_lattice(self):
        runs = check_lattice(20, seed=0, iterations=100_000, max_edges=6)
        assert sum(run.ratio >= 0.9 for run in runs) >= 18
