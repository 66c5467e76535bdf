from __future__ import annotations

import logging
import math
import time
from abc import ABC
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from tigris_ipp.belief import BeliefGrid, NoFlyZone
from tigris_ipp.dubins import PathEdge, VehicleState, connect, poses_at, truncate
from tigris_ipp.information import (
    BeliefOverlay,
    RewardWeights,
    cumulative_rewards,
    edge_reward,
    node_reward,
    trajectory_reward,
)
from tigris_ipp.planners.tree import (
    Curve,
    PlanResult,
    PlanTree,
    TreeNode,
    extract_best,
    prune,
)
from tigris_ipp.sampling import (
    InformedSampler,
    SamplingError,
    UniformSampler,
    reward_weights,
)
from tigris_ipp.sensor import SensorConfig

log = logging.getLogger("tigris.planner")

# Extensions shorter than this are not worth a node.
MIN_EXTENSION = 1.0
# Spacing of the poses checked against no-fly zones and the map boundary.
COLLISION_SPACING = 5.0
COLLISION_MARGIN = 5.0

SAMPLER_KINDS = ("informed", "uniform")
NEAR_RADIUS_MODES = ("fixed", "shrinking")

Extent = Tuple[float, float, float, float]
Sampler = Callable[[np.random.Generator], VehicleState]


class PlanningInputError(ValueError):
    """Raised when a plan cannot start, e.g. the start lies in a no-fly zone."""


@dataclass(frozen=True)
class PlannerConfig:
    budget: float = 3000.0
    planning_time: float = 5.0
    extend: float = 400.0
    # Defaults to twice the extension distance.
    near_radius: Optional[float] = None
    turn_radius: float = 60.0
    sampler_kind: str = "informed"
    edge_rewards: bool = True
    prune: bool = True
    seed: int = 0
    near_radius_mode: str = "fixed"
    max_near: Optional[int] = None
    # When set, the loop runs this many samples instead of watching the clock.
    iterations: Optional[int] = None
    z_range: Tuple[float, float] = (80.0, 120.0)

    def __post_init__(self):
        if self.near_radius is None:
            object.__setattr__(self, "near_radius", 2.0 * self.extend)
        object.__setattr__(self, "z_range", tuple(float(z) for z in self.z_range))

        if self.budget < 0:
            raise ValueError(f"budget must be non-negative, got {self.budget}.")
        if self.planning_time <= 0:
            raise ValueError(f"planning_time must be positive, got {self.planning_time}.")
        if self.extend <= 0:
            raise ValueError(f"extend must be positive, got {self.extend}.")
        if self.near_radius < self.extend:
            raise ValueError(
                f"near_radius ({self.near_radius}) must be at least extend ({self.extend})."
            )
        if self.turn_radius <= 0:
            raise ValueError(f"turn_radius must be positive, got {self.turn_radius}.")
        if self.sampler_kind not in SAMPLER_KINDS:
            raise ValueError(
                f"sampler_kind must be one of {SAMPLER_KINDS}, got {self.sampler_kind!r}."
            )
        if self.near_radius_mode not in NEAR_RADIUS_MODES:
            raise ValueError(
                f"near_radius_mode must be one of {NEAR_RADIUS_MODES}, "
                f"got {self.near_radius_mode!r}."
            )
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}.")
        if self.max_near is not None and self.max_near < 1:
            raise ValueError(f"max_near must be at least 1, got {self.max_near}.")
        if self.iterations is not None and self.iterations < 0:
            raise ValueError(f"iterations must be non-negative, got {self.iterations}.")
        low, high = self.z_range
        if not 0 < low <= high:
            raise ValueError(f"z_range must satisfy 0 < low <= high, got {self.z_range}.")


def first_collision(
    edge: PathEdge, length: float, zones: Sequence[NoFlyZone], extent: Optional[Extent]
) -> Optional[float]:
    """Arc length of the first sampled pose (up to `length`) that is outside the map
    or inside a zone."""
    if not zones and extent is None:
        return None
    count = max(1, int(math.ceil(length / COLLISION_SPACING)))
    stations = np.linspace(0.0, length, count + 1)
    points = poses_at(edge, stations)[:, :2]
    bad = np.zeros(stations.size, dtype=bool)
    if extent is not None:
        xmin, xmax, ymin, ymax = extent
        bad |= (points[:, 0] < xmin) | (points[:, 0] > xmax)
        bad |= (points[:, 1] < ymin) | (points[:, 1] > ymax)
    for zone in zones:
        bad |= zone.contains(points)
    if not bad.any():
        return None
    return float(stations[np.argmax(bad)])


def steer(
    origin: TreeNode,
    target: VehicleState,
    cfg: PlannerConfig,
    zones: Sequence[NoFlyZone] = (),
    extent: Optional[Extent] = None,
) -> Optional[Tuple[VehicleState, PathEdge]]:
    """Dubins connection from `origin` toward `target`, cut at the extension
    distance, the remaining budget and just before the first collision. None when
    less than MIN_EXTENSION remains."""
    remaining = cfg.budget - origin.cost
    if remaining < MIN_EXTENSION:
        return None
    edge = connect(origin.state, target, cfg.turn_radius)
    limit = min(cfg.extend, remaining, edge.total_length)
    if limit < MIN_EXTENSION:
        return None
    hit = first_collision(edge, limit, zones, extent)
    if hit is not None:
        limit = hit - COLLISION_MARGIN
        if limit < MIN_EXTENSION:
            return None
    if limit < edge.total_length:
        edge = truncate(edge, limit)
    return edge.end, edge


class Planner(ABC):
    """Sampling-based tree search over Dubins extensions.

    Each iteration draws a sample, steers the nearest open node toward it, then tries
    to reach the steered state from every open node nearby. A candidate survives
    unless a nearby node dominates it. Subclasses choose the sampler and how the
    best path is scored.
    """

    name = "base"
    # Score best paths with the full trajectory reward instead of the tree's value.
    reevaluate = False

    def __init__(
        self,
        grid: BeliefGrid,
        sensor: SensorConfig,
        weights: RewardWeights,
        config: PlannerConfig,
        zones: Sequence[NoFlyZone] = (),
    ):
        self.grid = grid
        self.sensor = sensor
        self.weights = weights
        self.config = self.configure(config)
        self.zones = tuple(zones)
        self.extent = grid.spec.extent

    def configure(self, config: PlannerConfig) -> PlannerConfig:
        """Hook for subclasses that pin some configuration values."""
        return config

    def make_sampler(self) -> Sampler:
        cfg = self.config
        if cfg.sampler_kind == "informed":
            try:
                weights = reward_weights(self.grid, self.sensor, self.weights, cfg.z_range)
                return InformedSampler(self.grid, weights, self.sensor, cfg.z_range)
            except SamplingError as e:
                log.warning(f"Informed sampling unavailable ({e}); sampling uniformly.")
        return UniformSampler(self.extent, cfg.z_range)

    def near_radius(self, node_count: int) -> float:
        cfg = self.config
        if cfg.near_radius_mode == "fixed":
            return cfg.near_radius
        n = max(node_count, 2)
        gamma = 10.0 * cfg.near_radius
        shrinking = gamma * (math.log(n) / n) ** (1.0 / 3.0)
        return max(cfg.extend, min(cfg.near_radius, shrinking))

    def check_start(self, start: VehicleState):
        if not self.grid.spec.contains(start.x, start.y):
            raise PlanningInputError(f"Start {start} lies outside the map.")
        point = np.array([[start.x, start.y]])
        for zone in self.zones:
            if zone.contains(point)[0]:
                raise PlanningInputError(f"Start {start} lies inside a no-fly zone.")

    def score(self, tree: PlanTree, node: TreeNode) -> float:
        """Reward reported for the path ending at `node`."""
        if not self.reevaluate:
            return node.info
        edges = [n.edge for n in tree.path_to(node.id)[1:]]
        return trajectory_reward(
            edges, self.grid, self.sensor, self.weights, start=tree[0].state
        )

    def add_extension(
        self, tree: PlanTree, near: TreeNode, state: VehicleState, edge: PathEdge, radius: float
    ) -> Optional[TreeNode]:
        cfg = self.config
        overlay = near.overlay
        gained = 0.0
        if cfg.edge_rewards:
            gained, overlay = edge_reward(edge, overlay, self.grid, self.sensor, self.weights)
        viewed, overlay = node_reward(state, overlay, self.grid, self.sensor, self.weights)
        info = (near.info + gained) + viewed
        cost = min(near.cost + edge.total_length, cfg.budget)

        if cfg.prune:
            candidate = TreeNode(-1, state, cost, info, near.id, edge, overlay)
            if prune(candidate, tree, radius):
                return None
        return tree.add(
            state, cost, info, cfg.budget, near.id, edge, overlay, min_extension=MIN_EXTENSION
        )

    def plan(self, start: VehicleState) -> PlanResult:
        cfg = self.config
        self.check_start(start)
        rng = np.random.default_rng(cfg.seed)
        sampler = self.make_sampler()
        by_iteration = cfg.iterations is not None

        began = time.perf_counter()
        tree = PlanTree()
        info, overlay = node_reward(
            start, BeliefOverlay(), self.grid, self.sensor, self.weights
        )
        tree.add(start, 0.0, info, cfg.budget, overlay=overlay)
        curve: Curve = [(0.0, self.score(tree, tree.best))]

        iteration = 0
        while True:
            elapsed = time.perf_counter() - began
            if by_iteration and iteration >= cfg.iterations:
                break
            if not by_iteration and elapsed >= cfg.planning_time:
                break
            iteration += 1

            sample = sampler(rng)
            nearest = tree.nearest_open(sample)
            if nearest is None:
                log.debug("Every node is closed; stopping early.")
                break
            steered = steer(nearest, sample, cfg, self.zones, self.extent)
            if steered is None:
                continue
            feasible, _ = steered

            best_before = tree.best_id
            radius = self.near_radius(len(tree))
            for near in tree.near_open(feasible, radius, cfg.max_near):
                extension = steer(near, feasible, cfg, self.zones, self.extent)
                if extension is None:
                    continue
                self.add_extension(tree, near, *extension, radius)

            if tree.best_id != best_before:
                stamp = float(iteration) if by_iteration else time.perf_counter() - began
                curve.append((stamp, self.score(tree, tree.best)))
                log.debug(
                    f"{self.name}: best reward {tree.best.info:.3f} at cost "
                    f"{tree.best.cost:.1f} m after {iteration} samples."
                )

        result = self.finish(tree)
        result = replace(
            result,
            iterations=iteration,
            curve=curve,
            curve_unit="iteration" if by_iteration else "seconds",
            elapsed=time.perf_counter() - began,
        )
        log.info(
            f"{self.name}: {iteration} samples, {len(tree)} nodes, best reward "
            f"{result.info:.3f}, cost {result.cost:.1f} m, {result.elapsed:.2f} s."
        )
        return result

    def finish(self, tree: PlanTree) -> PlanResult:
        result = extract_best(tree, self.name)
        if not self.reevaluate:
            return result
        replayed = cumulative_rewards(
            result.edges, self.grid, self.sensor, self.weights, start=result.start
        )
        return replace(result, cum_info=replayed, info=replayed[-1])
