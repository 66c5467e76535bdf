"""Brute-force references for the fast approximations: dense sweeps of the footprint
along straight edges, and exhaustive search over lattice paths on small maps."""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from tigris_ipp.belief import BeliefGrid, GaussianCentroid, GridSpec, NoFlyZone
from tigris_ipp.dubins import PathEdge, SegmentKind, VehicleState, connect
from tigris_ipp.information import (
    BeliefOverlay,
    RewardWeights,
    cell_reward,
    edge_reward,
    node_reward,
)
from tigris_ipp.planners.base import PlannerConfig, first_collision
from tigris_ipp.planners.tigris import tigris_plan
from tigris_ipp.scenario import Scenario
from tigris_ipp.sensor import (
    SensorConfig,
    footprint,
    footprints_contain,
    frustum_geometry,
    min_range_to_edge,
)
from tigris_ipp.utils import TWO_PI

log = logging.getLogger("tigris.oracles")

# Poses per batch in the dense sweep.
DENSE_CHUNK = 256


def dense_sweep_min_range(d: float, cfg: SensorConfig, z: float, step: float = 1.0) -> float:
    """Closest slant range to a cell at lateral distance d while flying an infinite
    straight line past it, checking the footprint every `step` meters."""
    geometry = frustum_geometry(cfg, z)
    local = footprint(VehicleState(0.0, 0.0, z, 0.0), cfg)
    low = min(geometry.near, 0.0) - step
    high = geometry.far + step
    ahead = np.arange(low, high + step, step)
    points = np.column_stack([ahead, np.full(ahead.size, float(d))])
    visible = local.contains(points)
    if not visible.any():
        return math.inf
    ranges = np.sqrt(ahead[visible] ** 2 + d * d + z * z)
    return float(ranges.min())


def dense_sweep_ranges(
    edge: PathEdge, grid: BeliefGrid, cfg: SensorConfig, step: float = 1.0
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-cell minimum slant range over poses every `step` meters along the edge,
    for cells inside some footprint and within beta."""
    _, poses = edge.sample(step)
    z_low = float(poses[:, 2].min())
    reach = math.sqrt(max(cfg.beta ** 2 - z_low ** 2, 0.0))
    xs, ys = poses[:, 0], poses[:, 1]
    cells = grid.cells_in_box(
        xs.min() - reach, xs.max() + reach, ys.min() - reach, ys.max() + reach
    )
    if cells.size == 0:
        return cells, np.empty(0)
    centers = grid.centers[cells]
    best = np.full(cells.size, np.inf)
    for lo in range(0, len(poses), DENSE_CHUNK):
        chunk = poses[lo : lo + DENSE_CHUNK]
        seen = footprints_contain(chunk, centers, cfg)
        delta = centers[None, :, :] - chunk[:, None, :2]
        rng = np.sqrt(np.sum(delta * delta, axis=-1) + chunk[:, 2, None] ** 2)
        best = np.minimum(best, np.where(seen, rng, np.inf).min(axis=0))
    keep = best <= cfg.beta
    return cells[keep], best[keep]


def dense_sweep_edge_reward(
    edge: PathEdge,
    grid: BeliefGrid,
    cfg: SensorConfig,
    w: RewardWeights,
    overlay: Optional[BeliefOverlay] = None,
    step: float = 1.0,
) -> float:
    """Edge reward with one update per cell at its densely swept minimum range."""
    cells, ranges = dense_sweep_ranges(edge, grid, cfg, step)
    if cells.size == 0:
        return 0.0
    overlay = BeliefOverlay() if overlay is None else overlay
    reward, _ = cell_reward(overlay.lookup(cells, grid), ranges, cfg, w)
    return float(np.sum(reward))


@dataclass
class RangeCheck:
    samples: int
    max_error: Dict[str, float]
    within: Dict[str, float]


def random_sensor(rng: np.random.Generator) -> SensorConfig:
    vfov = math.radians(rng.uniform(20.0, 60.0))
    hfov = math.radians(rng.uniform(30.0, 90.0))
    pitch = math.radians(rng.uniform(0.0, 80.0 - math.degrees(vfov) / 2.0))
    return SensorConfig(pitch_theta=pitch, vfov=vfov, hfov=hfov)


def check_min_range(
    samples: int, seed: int = 0, tolerance: float = 0.01, step: float = 0.25
) -> RangeCheck:
    """Compare both edge range models with the dense sweep on random sensors,
    altitudes and lateral offsets of visible cells."""
    rng = np.random.default_rng(seed)
    errors: Dict[str, List[float]] = {"closed_form": [], "footprint": []}
    for _ in range(samples):
        cfg = random_sensor(rng)
        z = float(rng.uniform(50.0, 150.0))
        d = float(rng.uniform(0.0, frustum_geometry(cfg, z).far_half_width))
        reference = dense_sweep_min_range(d, cfg, z, step)
        if not math.isfinite(reference):
            continue
        for model in errors:
            value = min_range_to_edge(d, cfg, z, model)
            errors[model].append(abs(value - reference) / reference)
    return RangeCheck(
        samples=len(errors["closed_form"]),
        max_error={m: float(max(e, default=0.0)) for m, e in errors.items()},
        within={m: float(np.mean(np.asarray(e) <= tolerance)) if e else 1.0 for m, e in errors.items()},
    )


@dataclass
class EdgeCheck:
    samples: int
    max_error: float
    within: float


def check_edge_reward(
    samples: int, seed: int = 0, tolerance: float = 0.02, step: float = 1.0
) -> EdgeCheck:
    """Compare edge_reward (footprint range model) with the dense sweep on random
    straight edges over a random belief."""
    rng = np.random.default_rng(seed)
    spec = GridSpec(width_cells=40, height_cells=40, cell_size=25.0)
    grid = BeliefGrid(spec=spec, probs=rng.uniform(0.05, 0.95, spec.size))
    cfg = SensorConfig(edge_range_model="footprint")
    weights = RewardWeights()
    errors = []
    for _ in range(samples):
        z = float(rng.uniform(80.0, 120.0))
        length = float(rng.uniform(100.0, 500.0))
        psi = float(rng.uniform(0.0, TWO_PI))
        x = float(rng.uniform(300.0, 700.0))
        y = float(rng.uniform(300.0, 700.0))
        start = VehicleState(x, y, z, psi)
        end = VehicleState(x + length * math.cos(psi), y + length * math.sin(psi), z, psi)
        edge = PathEdge(start, end, ((SegmentKind.STRAIGHT, length),), 60.0, length, "S")
        reference = dense_sweep_edge_reward(edge, grid, cfg, weights, step=step)
        if reference <= 0:
            continue
        value, _ = edge_reward(edge, BeliefOverlay(), grid, cfg, weights)
        errors.append(abs(value - reference) / reference)
    errors = np.asarray(errors)
    return EdgeCheck(
        samples=int(errors.size),
        max_error=float(errors.max()) if errors.size else 0.0,
        within=float(np.mean(errors <= tolerance)) if errors.size else 1.0,
    )


# Lattice search

# Unit steps to the eight neighbouring cells.
NEIGHBOUR_STEPS = tuple(
    (dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1) if (dx, dy) != (0, 0)
)


@dataclass
class LatticeResult:
    info: float
    edges: List[PathEdge] = field(default_factory=list)
    paths: int = 0


def lattice_moves(
    state: VehicleState, grid: BeliefGrid, diagonals: bool = True
) -> List[VehicleState]:
    """Neighbouring cell centers of `state`, each entered with the heading of the
    move. Moves off the grid are dropped."""
    size = grid.spec.cell_size
    moves = []
    for dx, dy in NEIGHBOUR_STEPS:
        if dx and dy and not diagonals:
            continue
        x, y = state.x + dx * size, state.y + dy * size
        if not grid.spec.contains(x, y):
            continue
        moves.append(VehicleState(x, y, state.z, math.atan2(dy, dx) % TWO_PI))
    return moves


def lattice_optimum(
    start: VehicleState,
    grid: BeliefGrid,
    sensor: SensorConfig,
    weights: RewardWeights,
    cfg: PlannerConfig,
    max_edges: int = 6,
    diagonals: bool = True,
    zones: Sequence[NoFlyZone] = (),
) -> LatticeResult:
    """Best reward over every path that hops between neighbouring cell centers at
    the start altitude, arriving at each with the heading of the hop. Hops are
    Dubins paths of any length that fits the remaining budget and stays clear of
    zones and the map edge."""
    extent = grid.spec.extent
    successors: Dict[Tuple[float, float, float, float], List[PathEdge]] = {}

    def reachable(state: VehicleState) -> List[PathEdge]:
        key = state.as_tuple()
        if key not in successors:
            edges = []
            for target in lattice_moves(state, grid, diagonals):
                edge = connect(state, target, cfg.turn_radius)
                if edge.is_zero_length:
                    continue
                if first_collision(edge, edge.total_length, zones, extent) is not None:
                    continue
                edges.append(edge)
            successors[key] = edges
        return successors[key]

    root_info, root_overlay = node_reward(start, BeliefOverlay(), grid, sensor, weights)
    best = LatticeResult(info=root_info)

    def search(state, cost, info, overlay, path: List[PathEdge]):
        best.paths += 1
        if info > best.info:
            best.info = info
            best.edges = list(path)
        if len(path) >= max_edges:
            return
        for edge in reachable(state):
            if cost + edge.total_length > cfg.budget + 1e-9:
                continue
            gained, child = 0.0, overlay
            if cfg.edge_rewards:
                gained, child = edge_reward(edge, child, grid, sensor, weights)
            viewed, child = node_reward(edge.end, child, grid, sensor, weights)
            path.append(edge)
            search(edge.end, cost + edge.total_length, (info + gained) + viewed, child, path)
            path.pop()

    search(start, 0.0, root_info, root_overlay, [])
    log.info(f"Lattice search visited {best.paths} paths; best reward {best.info:.3f}.")
    return best


TOY_CELLS = 10
TOY_CELL_SIZE = 20.0


def toy_scenario(seed: int, centroids: int = 2) -> Scenario:
    """10x10-cell world with a low, shallow-pitched camera. Budget is four cell
    widths, every extension at most one and at most four near nodes
    are extended per sample."""
    rng = np.random.default_rng(seed)
    size = TOY_CELLS * TOY_CELL_SIZE
    blobs = tuple(
        GaussianCentroid(
            center=(float(rng.uniform(0.2, 0.8) * size), float(rng.uniform(0.2, 0.8) * size)),
            peak_prob=float(rng.uniform(0.5, 0.9)),
            sigma=float(rng.uniform(1.0, 2.0)) * TOY_CELL_SIZE,
        )
        for _ in range(centroids)
    )
    z = 20.0
    return Scenario(
        width=size,
        height=size,
        cell_size=TOY_CELL_SIZE,
        centroids=blobs,
        background=0.1,
        sensor=SensorConfig(pitch_theta=math.radians(30.0)),
        weights=RewardWeights(),
        planner=PlannerConfig(
            budget=4 * TOY_CELL_SIZE,
            extend=TOY_CELL_SIZE,
            near_radius=2 * TOY_CELL_SIZE,
            turn_radius=TOY_CELL_SIZE / 4,
            prune=False,
            max_near=4,
            seed=seed,
            iterations=2000,
            z_range=(z, z),
        ),
        start=VehicleState(4.5 * TOY_CELL_SIZE, 4.5 * TOY_CELL_SIZE, z, 0.0),
        seed=seed,
    )


@dataclass
class LatticeRun:
    seed: int
    optimum: float
    planner_info: float

    @property
    def ratio(self) -> float:
        return self.planner_info / self.optimum if self.optimum > 0 else 1.0


def check_lattice(
    runs: int, seed: int = 0, iterations: int = 2000, max_edges: int = 6
) -> List[LatticeRun]:
    """Planner reward against the lattice optimum on `runs` toy worlds."""
    outcomes = []
    for offset in range(runs):
        scenario = toy_scenario(seed + offset)
        cfg = replace(scenario.planner, iterations=iterations)
        optimum = lattice_optimum(
            scenario.start,
            scenario.grid,
            scenario.sensor,
            scenario.weights,
            cfg,
            max_edges=max_edges,
        )
        result = tigris_plan(
            scenario.start, scenario.grid, scenario.sensor, scenario.weights, cfg
        )
        outcomes.append(LatticeRun(scenario.seed, optimum.info, result.info))
        log.info(
            f"Toy world {scenario.seed}: lattice {optimum.info:.3f}, "
            f"planner {result.info:.3f}."
        )
    return outcomes
