import logging
import sys
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import click
import yaml

from tigris_ipp.bench import run_benchmark
from tigris_ipp.oracles import check_edge_reward, check_lattice, check_min_range
from tigris_ipp.planners import PLANNERS, PlanningInputError, get_planner
from tigris_ipp.render import render
from tigris_ipp.scenario import (
    ScenarioTemplate,
    dump_result,
    dump_scenario,
    dump_trials,
    dump_yaml,
    generate_scenario,
    load_result,
    load_scenario,
)
from tigris_ipp.settings import Settings

log = logging.getLogger("tigris.cli")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_RUNTIME = 2


def setup_logging(settings: Settings):
    logging.basicConfig(
        **{
            "format": settings.LOG_FORMAT,
            "datefmt": "%m/%d/%Y %H:%M:%S",
            "level": logging.DEBUG if settings.DEBUG else logging.INFO,
            "filename": settings.LOG_FILE,
            "filemode": "w",
        }
    )
    if settings.LOG_FILE:
        # Diagnostics also go to stderr; stdout is kept for data.
        console = logging.StreamHandler(stream=sys.stderr)
        console.setFormatter(logging.Formatter(settings.LOG_FORMAT))
        logging.getLogger("").addHandler(console)


def _limit(planner_cfg, iterations: Optional[int], seconds: Optional[float]):
    if iterations is not None and seconds is not None:
        raise click.UsageError("Use either --iterations or --seconds, not both.")
    if iterations is not None:
        return replace(planner_cfg, iterations=iterations)
    if seconds is not None:
        return replace(planner_cfg, iterations=None, planning_time=seconds)
    return planner_cfg


@contextmanager
def input_errors(what: str):
    """Report unreadable or invalid inputs as usage errors."""
    try:
        yield
    except (ValueError, yaml.YAMLError, OSError) as e:
        raise click.ClickException(f"Bad {what}: {e}") from e


def _echo_yaml(data, settings: Settings):
    click.echo(dump_yaml(data, digits=settings.FLOAT_DIGITS), nl=False)


planner_choice = click.Choice(sorted(PLANNERS))


@click.group()
@click.option("--debug/--no-debug", default=None, help="Verbose logging.")
@click.option("--log-file", default=None, help="Also write the log to this file.")
@click.pass_context
def cli(ctx: click.Context, debug: Optional[bool], log_file: Optional[str]):
    """Informative path planning for a fixed-wing camera platform."""
    overrides = {}
    if debug is not None:
        overrides["DEBUG"] = debug
    if log_file is not None:
        overrides["LOG_FILE"] = log_file
    settings = Settings(**overrides)
    setup_logging(settings)
    ctx.obj = settings


@cli.command()
@click.option("--scenario", "scenario_path", type=click.Path(dir_okay=False), help="Scenario file; a random desk-scale scenario is generated if omitted.")
@click.option("--planner", "planner_name", type=planner_choice, default="tigris", show_default=True)
@click.option("--seed", type=int, default=None, help="Planner seed (and scenario seed when generating).")
@click.option("--iterations", type=int, default=None, help="Run this many samples.")
@click.option("--seconds", type=float, default=None, help="Plan for this long instead.")
@click.option("--out", type=click.Path(dir_okay=False), default="-", show_default=True, help="Result file.")
@click.option("--save-scenario", type=click.Path(dir_okay=False), default=None, help="Also write the scenario used.")
@click.pass_obj
def plan(
    settings: Settings,
    scenario_path: Optional[str],
    planner_name: str,
    seed: Optional[int],
    iterations: Optional[int],
    seconds: Optional[float],
    out: str,
    save_scenario: Optional[str],
):
    """Plan one path on one scenario."""
    with input_errors("scenario"):
        if scenario_path is None:
            scenario = generate_scenario(seed or 0, ScenarioTemplate())
        else:
            scenario = load_scenario(scenario_path)
        planner_cfg = scenario.planner if seed is None else replace(scenario.planner, seed=seed)
        planner_cfg = _limit(planner_cfg, iterations, seconds)
        planner = get_planner(planner_name)(
            scenario.grid, scenario.sensor, scenario.weights, planner_cfg, scenario.zones
        )
    result = planner.plan(scenario.start)

    if save_scenario:
        with open(save_scenario, "w") as f:
            dump_scenario(scenario, f, settings.FLOAT_DIGITS)
    if out == "-":
        click.echo(dump_result(result, digits=settings.FLOAT_DIGITS), nl=False)
    else:
        with open(out, "w") as f:
            dump_result(result, f, settings.FLOAT_DIGITS)
        log.info(f"Wrote {out}")


@cli.command()
@click.option("--planner", "planners", type=planner_choice, multiple=True, help="Planners to compare; the first is compared against the second.")
@click.option("--trials", type=click.IntRange(min=1), default=200, show_default=True)
@click.option("--jobs", type=click.IntRange(min=1), default=None, help="Trials run at once (default NUM_WORKERS).")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed of the first trial.")
@click.option("--count", type=click.IntRange(min=0), default=None, help="Fix the number of belief centroids.")
@click.option("--iterations", type=int, default=None)
@click.option("--seconds", type=float, default=None)
@click.option("--processes/--threads", default=None, help="Run each trial in a child process.")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory (default OUTPUT_DIR).")
@click.pass_obj
def bench(
    settings: Settings,
    planners: Sequence[str],
    trials: int,
    jobs: Optional[int],
    seed: int,
    count: Optional[int],
    iterations: Optional[int],
    seconds: Optional[float],
    processes: Optional[bool],
    out: Optional[str],
):
    """Paired Monte Carlo comparison on random desk-scale scenarios."""
    planners = list(planners) or list(settings.DEFAULT_PLANNERS)
    if len(set(planners)) != len(planners):
        raise click.BadParameter(f"Planners must be distinct, got {planners}.")
    with input_errors("benchmark settings"):
        template = ScenarioTemplate(centroid_count=count)
        template = replace(template, planner=_limit(template.planner, iterations, seconds))
    report, records = run_benchmark(
        template,
        trials,
        planners=planners,
        parallelism=jobs or settings.NUM_WORKERS,
        base_seed=seed,
        use_processes=settings.USE_PROCESSES if processes is None else processes,
    )

    out_dir = Path(out or settings.OUTPUT_DIR)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "trials.yaml", "w") as f:
        dump_trials(records, f, settings.FLOAT_DIGITS)
    with open(out_dir / "report.yaml", "w") as f:
        dump_yaml(report.to_dict(), f, settings.FLOAT_DIGITS)
    log.info(f"Wrote {out_dir / 'trials.yaml'} and {out_dir / 'report.yaml'}")

    for group in report.groups:
        means = "  ".join(
            f"{name} {group.mean[name]:.2f}±{group.std[name]:.2f}" for name in report.planners
        )
        line = f"{group.label:>5}  n={group.n_trials:<4} {means}"
        if group.percent_difference is not None:
            line += f"  diff {group.percent_difference:+.1f}%"
        if group.p_value is not None:
            line += f"  p={group.p_value:.3g}"
        click.echo(line)
    failed = sum(report.failures.values())
    if failed:
        click.echo(f"{failed} planner run(s) failed.", err=True)


@cli.command("render")
@click.option("--scenario", "scenario_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--result", "result_paths", type=click.Path(exists=True, dir_okay=False), multiple=True, help="Result file(s) to draw.")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory (default OUTPUT_DIR).")
@click.option("--sensor-curve", is_flag=True, help="Also write sensor_curve.csv.")
@click.option("--png", is_flag=True, help="Also write an annotated overview.png.")
@click.pass_obj
def render_command(
    settings: Settings,
    scenario_path: str,
    result_paths: Sequence[str],
    out: Optional[str],
    sensor_curve: bool,
    png: bool,
):
    """Heatmap, path polylines and optional overview image."""
    with input_errors("input file"):
        scenario = load_scenario(scenario_path)
        results = [load_result(path) for path in result_paths]
    for path in render(
        results,
        scenario,
        out or settings.OUTPUT_DIR,
        sensor_curve=sensor_curve,
        png=png,
        digits=settings.FLOAT_DIGITS,
    ):
        click.echo(str(path))


@cli.group()
def oracle():
    """Brute-force checks of the fast approximations."""


@oracle.command("edge")
@click.option("--samples", type=int, default=1000, show_default=True, help="Random range configurations.")
@click.option("--edges", type=int, default=100, show_default=True, help="Random straight edges.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_obj
def oracle_edge(settings: Settings, samples: int, edges: int, seed: int):
    """Minimum range and edge reward against dense footprint sweeps."""
    ranges = check_min_range(samples, seed)
    rewards = check_edge_reward(edges, seed)
    _echo_yaml(
        {
            "min_range": {
                "samples": ranges.samples,
                "max_relative_error": ranges.max_error,
                "share_within_1pct": ranges.within,
            },
            "edge_reward": {
                "samples": rewards.samples,
                "max_relative_error": rewards.max_error,
                "share_within_2pct": rewards.within,
            },
        },
        settings,
    )


@oracle.command("lattice")
@click.option("--runs", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--iterations", type=int, default=2000, show_default=True)
@click.option("--max-edges", type=int, default=6, show_default=True)
@click.pass_obj
def oracle_lattice(settings: Settings, runs: int, seed: int, iterations: int, max_edges: int):
    """Planner reward against exhaustive lattice search on toy worlds."""
    outcomes = check_lattice(runs, seed, iterations, max_edges)
    _echo_yaml(
        {
            "runs": [
                {"seed": o.seed, "optimum": o.optimum, "planner": o.planner_info, "ratio": o.ratio}
                for o in outcomes
            ],
            "share_at_least_90pct": sum(o.ratio >= 0.9 for o in outcomes) / max(len(outcomes), 1),
        },
        settings,
    )


def main(args: Optional[Sequence[str]] = None) -> int:
    try:
        cli.main(args=args, prog_name="tigris", standalone_mode=False)
    except (click.ClickException, click.Abort) as e:
        message = e.format_message() if isinstance(e, click.ClickException) else "Aborted."
        click.echo(f"Error: {message}", err=True)
        return EXIT_INPUT
    except PlanningInputError as e:
        log.debug("Input error", exc_info=True)
        click.echo(f"Error: {e}", err=True)
        return EXIT_INPUT
    except Exception as e:
        log.debug("Runtime failure", exc_info=True)
        click.echo(f"Error: {type(e).__name__}: {e}", err=True)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
