"""Information reward of trajectories: weighted entropy reduction per cell under the
optimistic measurement assumption, summed over node footprints and the footprint swept
along each edge.

Hypothetical belief updates are kept in overlays chained along a tree branch, so the
prior grid is never modified.
"""
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from tigris_ipp.belief import BeliefGrid, bayes_update, entropy
from tigris_ipp.dubins import PathEdge, VehicleState
from tigris_ipp.sensor import (
    SensorConfig,
    cells_in_footprint,
    detection_rate,
    footprint,
    footprints_contain,
    visible_offset,
)

# Arcs are split into chords no longer than this before the range formula is applied.
CHORD_LENGTH = 25.0
# Overlay chains deeper than this are flattened into a single table.
FLATTEN_DEPTH = 32
POSE_TOLERANCE = 1e-6


class ContractViolation(ValueError):
    """Raised when a trajectory's edges do not join up."""


@dataclass(frozen=True)
class RewardWeights:
    r_p: float = 1.0
    r_n: float = 0.2

    def __post_init__(self):
        if self.r_p < 0 or self.r_n < 0:
            raise ValueError(
                f"Reward weights must be non-negative, got r_p={self.r_p}, r_n={self.r_n}."
            )
        if self.r_p == 0 and self.r_n == 0:
            raise ValueError("At least one of r_p and r_n must be positive.")


_EMPTY_CELLS = np.empty(0, dtype=np.intp)
_EMPTY_VALUES = np.empty(0)


class BeliefOverlay:
    """Posteriors written on top of the parent overlay (or the prior grid at the
    root). Immutable once created."""

    __slots__ = ("parent", "cells", "values", "depth")

    def __init__(
        self,
        parent: Optional["BeliefOverlay"] = None,
        cells: np.ndarray = _EMPTY_CELLS,
        values: np.ndarray = _EMPTY_VALUES,
    ):
        cells = np.asarray(cells, dtype=np.intp)
        values = np.asarray(values, dtype=float)
        order = np.argsort(cells, kind="stable")
        self.parent = parent
        self.cells = cells[order]
        self.values = values[order]
        self.depth = 0 if parent is None else parent.depth + 1
        self.cells.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def touched(self) -> Dict[int, float]:
        return dict(zip(self.cells.tolist(), self.values.tolist()))

    def get(self, cell: int, grid: BeliefGrid) -> float:
        return float(self.lookup(np.array([cell]), grid)[0])

    def lookup(self, cells: np.ndarray, grid: BeliefGrid) -> np.ndarray:
        """Current belief of each cell: nearest overlay entry, else the prior."""
        cells = np.asarray(cells, dtype=np.intp)
        result = grid.probs[cells].copy()
        pending = np.arange(cells.size)
        node = self
        while node is not None and pending.size:
            if node.cells.size:
                wanted = cells[pending]
                pos = np.searchsorted(node.cells, wanted)
                pos = np.minimum(pos, node.cells.size - 1)
                hit = node.cells[pos] == wanted
                result[pending[hit]] = node.values[pos[hit]]
                pending = pending[~hit]
            node = node.parent
        return result

    def child(self, cells: np.ndarray, values: np.ndarray) -> "BeliefOverlay":
        if np.size(cells) == 0:
            return self
        if self.depth + 1 < FLATTEN_DEPTH:
            return BeliefOverlay(self, cells, values)
        # Merge the whole chain; newer entries win.
        merged: Dict[int, float] = {}
        chain = []
        node = self
        while node is not None:
            chain.append(node)
            node = node.parent
        for node in reversed(chain):
            merged.update(zip(node.cells.tolist(), node.values.tolist()))
        merged.update(zip(np.asarray(cells).tolist(), np.asarray(values).tolist()))
        keys = np.fromiter(merged.keys(), dtype=np.intp, count=len(merged))
        vals = np.fromiter(merged.values(), dtype=float, count=len(merged))
        return BeliefOverlay(None, keys, vals)


def cell_reward(
    p, r, cfg: SensorConfig, w: RewardWeights
) -> Tuple[np.ndarray, np.ndarray]:
    """Weighted entropy reduction of one measurement at range r, assuming the outcome
    that agrees with the current belief. Returns (reward, posterior)."""
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    tpr = np.asarray(detection_rate(r, cfg))
    fpr = 1.0 - tpr
    positive = p >= 0.5

    posterior = np.where(
        positive,
        bayes_update(p, tpr, fpr, True),
        bayes_update(p, tpr, fpr, False),
    )
    gain = np.maximum(0.0, entropy(p) - entropy(posterior))
    reward = np.where(positive, w.r_p, w.r_n) * gain

    # Out of range the sensor says nothing at all.
    blind = r > cfg.beta
    posterior = np.where(blind, p, posterior)
    reward = np.where(blind, 0.0, reward)

    if reward.ndim == 0:
        return float(reward), float(posterior)
    return reward, posterior


def _apply(
    cells: np.ndarray,
    ranges: np.ndarray,
    overlay: BeliefOverlay,
    grid: BeliefGrid,
    cfg: SensorConfig,
    w: RewardWeights,
) -> Tuple[float, BeliefOverlay]:
    seen = ranges <= cfg.beta
    cells, ranges = cells[seen], ranges[seen]
    if cells.size == 0:
        return 0.0, overlay
    prior = overlay.lookup(cells, grid)
    reward, posterior = cell_reward(prior, ranges, cfg, w)
    return float(np.sum(reward)), overlay.child(cells, posterior)


def node_reward(
    state: VehicleState,
    overlay: BeliefOverlay,
    grid: BeliefGrid,
    cfg: SensorConfig,
    w: RewardWeights,
) -> Tuple[float, BeliefOverlay]:
    """Reward of a single view from `state`; returns it with the updated overlay."""
    if state.z <= 0 or state.z > cfg.beta:
        return 0.0, overlay
    reach = math.sqrt(cfg.beta ** 2 - state.z ** 2)
    clip = (state.x - reach, state.x + reach, state.y - reach, state.y + reach)
    cells = cells_in_footprint(footprint(state, cfg), grid, clip)
    if cells.size == 0:
        return 0.0, overlay
    delta = grid.centers[cells] - np.array([state.x, state.y])
    ranges = np.sqrt(np.sum(delta * delta, axis=1) + state.z * state.z)
    return _apply(cells, ranges, overlay, grid, cfg, w)


def _chord_ranges(
    poses: np.ndarray, centers: np.ndarray, cfg: SensorConfig, model: str
) -> np.ndarray:
    """Per-point closest range whose viewing station lies inside one of the chords
    between consecutive poses, from the straight-edge range formula."""
    starts, ends = poses[:-1], poses[1:]
    chords = ends[:, :2] - starts[:, :2]
    lengths = np.hypot(chords[:, 0], chords[:, 1])
    heights = 0.5 * (starts[:, 2] + ends[:, 2])
    usable = (lengths > 1e-9) & (heights > 0)
    if not usable.any():
        return np.full(len(centers), np.inf)
    starts, chords = starts[usable], chords[usable]
    lengths, heights = lengths[usable, None], heights[usable, None]

    along = chords / lengths
    rel = centers[None, :, :] - starts[:, None, :2]
    t = rel[..., 0] * along[:, 0, None] + rel[..., 1] * along[:, 1, None]
    d = np.abs(rel[..., 1] * along[:, 0, None] - rel[..., 0] * along[:, 1, None])
    # The frustum scales with altitude, so offsets are taken at unit height.
    offset = heights * np.asarray(visible_offset(d / heights, cfg, 1.0, model))
    station = t - offset
    inside = np.isfinite(offset) & (station >= 0.0) & (station <= lengths)
    with np.errstate(invalid="ignore"):
        rng = np.sqrt(d * d + offset * offset + heights * heights)
    return np.where(inside, rng, np.inf).min(axis=0)


def swept_ranges(
    edge: PathEdge,
    grid: BeliefGrid,
    cfg: SensorConfig,
    model: Optional[str] = None,
    chord_length: float = CHORD_LENGTH,
) -> Tuple[np.ndarray, np.ndarray]:
    """Cells seen by the footprint sliding along the edge and the closest range at
    which each is seen. Cells out of reach of beta are left out."""
    model = cfg.edge_range_model if model is None else model
    _, poses = edge.sample(chord_length)
    z_low = float(poses[:, 2].min())
    reach = math.sqrt(max(cfg.beta ** 2 - z_low ** 2, 0.0))
    if reach <= 0:
        return _EMPTY_CELLS, _EMPTY_VALUES

    xs, ys = poses[:, 0], poses[:, 1]
    cells = grid.cells_in_box(
        xs.min() - reach, xs.max() + reach, ys.min() - reach, ys.max() + reach
    )
    if cells.size == 0:
        return _EMPTY_CELLS, _EMPTY_VALUES
    centers = grid.centers[cells]
    best = _chord_ranges(poses, centers, cfg, model)

    # Cells whose closest view falls outside every chord are seen from the poses.
    seen = footprints_contain(poses, centers, cfg)
    delta = centers[None, :, :] - poses[:, None, :2]
    rng = np.sqrt(np.sum(delta * delta, axis=-1) + poses[:, 2, None] ** 2)
    best = np.minimum(best, np.where(seen, rng, np.inf).min(axis=0))

    keep = best <= cfg.beta
    return cells[keep], best[keep]


def edge_reward(
    edge: PathEdge,
    overlay: BeliefOverlay,
    grid: BeliefGrid,
    cfg: SensorConfig,
    w: RewardWeights,
) -> Tuple[float, BeliefOverlay]:
    """Reward of the footprint sliding along the edge, one update per cell at its
    minimum range."""
    if edge.is_zero_length:
        return node_reward(edge.start, overlay, grid, cfg, w)
    cells, ranges = swept_ranges(edge, grid, cfg)
    return _apply(cells, ranges, overlay, grid, cfg, w)


def _same_pose(a: VehicleState, b: VehicleState) -> bool:
    heading = abs(math.remainder(a.psi - b.psi, 2 * math.pi))
    return (
        math.hypot(a.x - b.x, a.y - b.y) <= POSE_TOLERANCE
        and abs(a.z - b.z) <= POSE_TOLERANCE
        and heading <= POSE_TOLERANCE
    )


def cumulative_rewards(
    path: Sequence[PathEdge],
    grid: BeliefGrid,
    cfg: SensorConfig,
    w: RewardWeights,
    start: Optional[VehicleState] = None,
    edge_rewards: bool = True,
) -> List[float]:
    """Running reward after the start view and after each edge (with the view at
    its end)."""
    if not path and start is None:
        raise ContractViolation("An empty path needs a start state.")
    start = path[0].start if start is None else start
    if path and not _same_pose(start, path[0].start):
        raise ContractViolation("The first edge does not begin at the start state.")
    for previous, following in zip(path[:-1], path[1:]):
        if not _same_pose(previous.end, following.start):
            raise ContractViolation(
                f"Edge ending at {previous.end} does not meet the next edge starting at "
                f"{following.start}."
            )

    overlay = BeliefOverlay()
    total, overlay = node_reward(start, overlay, grid, cfg, w)
    totals = [total]
    for edge in path:
        if edge_rewards:
            gained, overlay = edge_reward(edge, overlay, grid, cfg, w)
            total += gained
        gained, overlay = node_reward(edge.end, overlay, grid, cfg, w)
        total += gained
        totals.append(total)
    return totals


def trajectory_reward(
    path: Sequence[PathEdge],
    grid: BeliefGrid,
    cfg: SensorConfig,
    w: RewardWeights,
    start: Optional[VehicleState] = None,
    edge_rewards: bool = True,
) -> float:
    """Replay the path from the prior: start view, then each edge and the view at
    its end. This is the value planners rank best paths by."""
    return cumulative_rewards(path, grid, cfg, w, start, edge_rewards)[-1]
