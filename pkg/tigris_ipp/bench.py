"""Paired Monte Carlo comparison of planners: every planner runs on the same random
scenarios, and rewards are compared per centroid-count bucket."""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from tigris_ipp.planners import get_planner
from tigris_ipp.scenario import ScenarioTemplate, TrialRecord, generate_scenario
from tigris_ipp.threadpool import ThreadPool

log = logging.getLogger("tigris.bench")

BUCKETS: Tuple[Tuple[int, int], ...] = ((1, 3), (4, 6), (7, 9), (10, 12))
CURVE_POINTS = 101


def run_trial(seed: int, template: ScenarioTemplate, planners: Sequence[str]) -> List[TrialRecord]:
    """One scenario, every planner. A planner that raises yields a failed record."""
    scenario = generate_scenario(seed, template)
    records = []
    for name in planners:
        try:
            planner = get_planner(name)(
                scenario.grid,
                scenario.sensor,
                scenario.weights,
                scenario.planner,
                scenario.zones,
            )
            records.append(TrialRecord.from_result(scenario, planner.plan(scenario.start)))
        except Exception as e:
            log.exception(f"Planner {name} failed on scenario {seed}.")
            records.append(
                TrialRecord(
                    seed=seed,
                    centroid_count=len(scenario.centroids),
                    planner=name,
                    failed=True,
                    error=f"{type(e).__name__}: {e}",
                )
            )
    return records


def percent_difference(a: float, b: float) -> float:
    if b == 0:
        return math.nan
    return 100.0 * (a - b) / b


def _degenerate_p(diffs: np.ndarray) -> float:
    """p-value of a one-tailed test when the differences do not vary."""
    mean = float(np.mean(diffs))
    if mean == 0:
        return 0.5
    return 0.0 if mean > 0 else 1.0


def paired_p_value(a: Sequence[float], b: Sequence[float]) -> Optional[float]:
    """One-tailed paired t-test of mean(a - b) > 0."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.size < 2:
        return None
    diffs = a - b
    if np.all(diffs == diffs[0]):
        return _degenerate_p(diffs)
    return float(stats.ttest_rel(a, b, alternative="greater").pvalue)


def welch_p_value(a: Sequence[float], b: Sequence[float]) -> Optional[float]:
    """One-tailed unequal-variance two-sample test of mean(a) > mean(b)."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.size < 2 or b.size < 2:
        return None
    if np.all(a == a[0]) and np.all(b == b[0]):
        return _degenerate_p(np.array([a[0] - b[0]]))
    return float(stats.ttest_ind(a, b, equal_var=False, alternative="greater").pvalue)


def _mean_std(values: Sequence[float]) -> Tuple[float, float]:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return math.nan, math.nan
    std = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return float(np.mean(values)), std


@dataclass
class GroupStats:
    label: str
    n_trials: int
    mean: Dict[str, float]
    std: Dict[str, float]
    mean_difference: Optional[float] = None
    percent_difference: Optional[float] = None
    p_value: Optional[float] = None
    p_value_welch: Optional[float] = None


@dataclass
class BenchReport:
    planners: List[str]
    n_trials: int
    groups: List[GroupStats]
    failures: Dict[str, int]
    curve_unit: str = "iteration"
    curve_grid: List[float] = field(default_factory=list)
    mean_curves: Dict[str, List[float]] = field(default_factory=dict)
    percent_difference_curve: List[float] = field(default_factory=list)
    # Share of trials whose reported best-reward curve drops at least once.
    curve_decreases: Dict[str, float] = field(default_factory=dict)

    def group(self, label: str) -> GroupStats:
        for group in self.groups:
            if group.label == label:
                return group
        raise KeyError(label)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": 1,
            "planners": list(self.planners),
            "n_trials": self.n_trials,
            "failures": dict(self.failures),
            "groups": [vars(g).copy() for g in self.groups],
            "curve_unit": self.curve_unit,
            "curve_grid": list(self.curve_grid),
            "mean_curves": {k: list(v) for k, v in self.mean_curves.items()},
            "percent_difference_curve": list(self.percent_difference_curve),
            "curve_decreases": dict(self.curve_decreases),
        }


def curve_on_grid(curve: Sequence[Tuple[float, float]], grid: Sequence[float]) -> np.ndarray:
    """Sample a step curve of (time, best reward) points at each grid time. Times before
    the first point take the first value."""
    if not curve:
        return np.full(len(grid), math.nan)
    times = np.array([t for t, _ in curve], dtype=float)
    values = np.array([v for _, v in curve], dtype=float)
    index = np.searchsorted(times, np.asarray(grid, dtype=float), side="right") - 1
    return values[np.maximum(index, 0)]


def _decreases(curve: Sequence[Tuple[float, float]]) -> bool:
    values = [v for _, v in curve]
    return any(b < a for a, b in zip(values[:-1], values[1:]))


def bucket_label(low: int, high: int) -> str:
    return f"{low}-{high}"


def _group(
    label: str, rows: List[Dict[str, TrialRecord]], planners: Sequence[str]
) -> GroupStats:
    means, stds = {}, {}
    for name in planners:
        means[name], stds[name] = _mean_std([row[name].info for row in rows])
    group = GroupStats(label=label, n_trials=len(rows), mean=means, std=stds)
    if len(planners) >= 2 and rows:
        first, second = planners[0], planners[1]
        a = [row[first].info for row in rows]
        b = [row[second].info for row in rows]
        group.mean_difference = float(np.mean(np.subtract(a, b)))
        group.percent_difference = percent_difference(means[first], means[second])
        group.p_value = paired_p_value(a, b)
        group.p_value_welch = welch_p_value(a, b)
    return group


def summarize(
    records: Sequence[TrialRecord],
    planners: Sequence[str],
    curve_grid: Optional[Sequence[float]] = None,
    curve_unit: str = "iteration",
) -> BenchReport:
    """Aggregate trial records. Only seeds where every planner succeeded are paired
    into the statistics; the result does not depend on record order."""
    records = sorted(records, key=lambda r: (r.seed, planners.index(r.planner)))
    by_seed: Dict[int, Dict[str, TrialRecord]] = {}
    failures = {name: 0 for name in planners}
    for record in records:
        if record.failed:
            failures[record.planner] += 1
        by_seed.setdefault(record.seed, {})[record.planner] = record

    rows = [
        row
        for _, row in sorted(by_seed.items())
        if all(name in row and not row[name].failed for name in planners)
    ]

    groups = [_group("all", rows, planners)]
    for low, high in BUCKETS:
        bucket = [row for row in rows if low <= row[planners[0]].centroid_count <= high]
        groups.append(_group(bucket_label(low, high), bucket, planners))

    report = BenchReport(
        planners=list(planners),
        n_trials=len(by_seed),
        groups=groups,
        failures=failures,
        curve_unit=curve_unit,
    )
    if curve_grid is not None and rows:
        grid = np.asarray(curve_grid, dtype=float)
        report.curve_grid = grid.tolist()
        for name in planners:
            sampled = np.array([curve_on_grid(row[name].curve, grid) for row in rows])
            report.mean_curves[name] = np.mean(sampled, axis=0).tolist()
            report.curve_decreases[name] = float(
                np.mean([_decreases(row[name].curve) for row in rows])
            )
        if len(planners) >= 2:
            a = np.asarray(report.mean_curves[planners[0]])
            b = np.asarray(report.mean_curves[planners[1]])
            with np.errstate(divide="ignore", invalid="ignore"):
                diff = np.where(b != 0, 100.0 * (a - b) / b, np.nan)
            report.percent_difference_curve = diff.tolist()
    return report


def default_curve_grid(template: ScenarioTemplate) -> Tuple[List[float], str]:
    cfg = template.planner
    if cfg.iterations is not None:
        return np.linspace(0.0, float(cfg.iterations), CURVE_POINTS).tolist(), "iteration"
    return np.linspace(0.0, cfg.planning_time, CURVE_POINTS).tolist(), "seconds"


def run_benchmark(
    template: ScenarioTemplate,
    n_trials: int,
    planners: Sequence[str] = ("tigris", "rig"),
    parallelism: int = 1,
    base_seed: int = 0,
    use_processes: bool = False,
) -> Tuple[BenchReport, List[TrialRecord]]:
    """Run `n_trials` paired trials with seeds base_seed, base_seed + 1, ..."""
    if n_trials < 1:
        raise ValueError(f"n_trials must be at least 1, got {n_trials}.")
    planners = list(planners)
    if not planners:
        raise ValueError("At least one planner is needed.")
    for name in planners:
        get_planner(name)
    if len(set(planners)) != len(planners):
        raise ValueError(f"Planners must be distinct, got {planners}.")

    seeds = [base_seed + i for i in range(n_trials)]
    log.info(
        f"Running {n_trials} trials of {', '.join(planners)} on {parallelism} worker(s)."
    )
    pool = ThreadPool(num_workers=parallelism, use_processes=use_processes)
    outcomes = pool.map(run_trial, [(seed, template, planners) for seed in seeds])

    records: List[TrialRecord] = []
    for seed, outcome in zip(seeds, outcomes):
        if outcome.ok:
            trial = outcome.value
        else:
            log.warning(f"Trial {seed} did not finish: {outcome.error}")
            trial = [
                TrialRecord(
                    seed=seed,
                    centroid_count=-1,
                    planner=name,
                    failed=True,
                    error=outcome.error,
                )
                for name in planners
            ]
        for record in trial:
            if record.failed:
                log.warning(f"Trial {seed}: {record.planner} failed ({record.error}).")
        log.info(
            f"Trial {seed}: "
            + ", ".join(f"{r.planner}={r.info:.2f}" for r in trial if not r.failed)
        )
        records.extend(trial)

    grid, unit = default_curve_grid(template)
    report = summarize(records, planners, grid, unit)
    return report, sorted(records, key=lambda r: (r.seed, planners.index(r.planner)))
