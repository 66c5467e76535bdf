"""Static artifacts for a plan: reward heatmap (PGM), one CSV polyline per path, the
detection-rate curve, and an optional annotated PNG."""
import csv
import logging
import math
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np

from tigris_ipp.belief import BeliefGrid
from tigris_ipp.planners.tree import PlanResult
from tigris_ipp.sampling import reward_weights
from tigris_ipp.scenario import Scenario
from tigris_ipp.sensor import SensorConfig, detection_rate
from tigris_ipp.utils import format_float

log = logging.getLogger("tigris.render")

PGM_MAXVAL = 255
CSV_COLUMNS = ("x", "y", "z", "psi", "cum_cost", "cum_info")
# Spacing of the poses drawn along each edge in the PNG.
DRAW_SPACING = 10.0

PathLike = Union[str, Path]


def heatmap_levels(values: np.ndarray, grid: BeliefGrid) -> np.ndarray:
    """Per-cell values scaled to 0..PGM_MAXVAL, as an image with north up."""
    image = np.asarray(grid.as_image(values), dtype=float)
    peak = float(np.max(image)) if image.size else 0.0
    if peak > 0:
        levels = np.rint(image / peak * PGM_MAXVAL)
    else:
        levels = np.zeros_like(image)
    return np.flipud(levels).astype(int)


def write_pgm(levels: np.ndarray, path: PathLike):
    """Plain (P2) portable graymap."""
    height, width = levels.shape
    lines = ["P2", f"{width} {height}", str(PGM_MAXVAL)]
    lines.extend(" ".join(str(int(v)) for v in row) for row in levels)
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def write_path_csv(result: PlanResult, path: PathLike, digits: int = 17):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for state, cost, info in zip(result.states, result.cum_cost, result.cum_info):
            writer.writerow(
                format_float(v, digits)
                for v in (state.x, state.y, state.z, state.psi, cost, info)
            )


def write_sensor_curve(cfg: SensorConfig, path: PathLike, points: int = 301):
    """Detection rates from 0 to 1.2·beta."""
    ranges = np.linspace(0.0, 1.2 * cfg.beta, points)
    tpr = np.asarray(detection_rate(ranges, cfg))
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(("r", "tpr", "fpr"))
        for r, t in zip(ranges, tpr):
            writer.writerow((format_float(r), format_float(t), format_float(1.0 - t)))


def _dense_path(result: PlanResult) -> np.ndarray:
    points = [np.array([[result.start.x, result.start.y]])]
    for edge in result.edges:
        _, poses = edge.sample(DRAW_SPACING)
        points.append(poses[:, :2])
    return np.vstack(points)


def write_png(
    results: Sequence[PlanResult],
    scenario: Scenario,
    values: np.ndarray,
    path: PathLike,
):
    from matplotlib.figure import Figure

    grid = scenario.grid
    xmin, xmax, ymin, ymax = grid.spec.extent
    figure = Figure(figsize=(8, 8))
    ax = figure.add_subplot(1, 1, 1)
    image = ax.imshow(
        grid.as_image(values),
        origin="lower",
        extent=(xmin, xmax, ymin, ymax),
        cmap="viridis",
    )
    figure.colorbar(image, ax=ax, label="single-view reward")

    for zone in scenario.zones:
        polygon = np.array(zone.polygon + (zone.polygon[0],))
        ax.fill(polygon[:, 0], polygon[:, 1], color="red", alpha=0.3)

    length = 0.02 * max(xmax - xmin, ymax - ymin)
    for index, result in enumerate(results):
        color = f"C{index + 1}"
        line = _dense_path(result)
        ax.plot(line[:, 0], line[:, 1], color=color, label=f"{result.planner} ({result.info:.1f})")
        xs = [s.x for s in result.states]
        ys = [s.y for s in result.states]
        us = [length * math.cos(s.psi) for s in result.states]
        vs = [length * math.sin(s.psi) for s in result.states]
        ax.quiver(xs, ys, us, vs, color=color, angles="xy", scale_units="xy", scale=1.0)

    start = scenario.start
    ax.plot([start.x], [start.y], marker="o", color="white")
    ax.set_xlim(xmin, xmax)
    ax.set_ylim(ymin, ymax)
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    if results:
        ax.legend(loc="upper right")
    figure.savefig(path, dpi=100)


def render(
    results: Sequence[PlanResult],
    scenario: Scenario,
    out_dir: PathLike,
    sensor_curve: bool = False,
    png: bool = False,
    digits: int = 17,
) -> List[Path]:
    """Write the heatmap, one CSV per result and any optional files; returns the
    paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    values = reward_weights(
        scenario.grid, scenario.sensor, scenario.weights, scenario.planner.z_range
    )

    written = []
    heatmap = out / "heatmap.pgm"
    write_pgm(heatmap_levels(values, scenario.grid), heatmap)
    written.append(heatmap)

    for result in results:
        target = out / f"path_{result.planner or 'plan'}.csv"
        write_path_csv(result, target, digits)
        written.append(target)

    if sensor_curve:
        target = out / "sensor_curve.csv"
        write_sensor_curve(scenario.sensor, target)
        written.append(target)

    if png:
        target = out / "overview.png"
        write_png(results, scenario, values, target)
        written.append(target)

    for target in written:
        log.info(f"Wrote {target}")
    return written
