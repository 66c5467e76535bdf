"""Tree-growth samplers: informed sampling over cells weighted by their viewing reward,
and the uniform sampler used by the baseline and as a fallback."""
import math
from typing import Tuple

import numpy as np

from tigris_ipp.belief import BeliefGrid
from tigris_ipp.dubins import VehicleState
from tigris_ipp.information import RewardWeights, cell_reward
from tigris_ipp.sensor import SensorConfig
from tigris_ipp.utils import TWO_PI

ZRange = Tuple[float, float]


class SamplingError(RuntimeError):
    """Raised when the sampling weights leave nothing to sample."""


class AliasTable:
    """Vose's alias method: O(n) build, O(1) draws from a discrete distribution."""

    def __init__(self, weights: np.ndarray):
        weights = np.asarray(weights, dtype=float).reshape(-1)
        if weights.size == 0 or np.any(weights < 0) or np.any(~np.isfinite(weights)):
            raise SamplingError("Weights must be finite and non-negative.")
        total = weights.sum()
        if total <= 0:
            raise SamplingError("Bad weights: total probability is zero.")

        n = weights.size
        scaled = weights * n / total
        prob = np.zeros(n)
        alias = np.arange(n)
        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        while small and large:
            lo = small.pop()
            hi = large.pop()
            prob[lo] = scaled[lo]
            alias[lo] = hi
            scaled[hi] -= 1.0 - scaled[lo]
            if scaled[hi] < 1.0:
                small.append(hi)
            else:
                large.append(hi)
        # Leftovers are 1 up to rounding.
        for index in large + small:
            prob[index] = 1.0
            alias[index] = index

        self.prob = prob
        self.alias = alias
        self.probabilities = weights / total

    def __len__(self):
        return self.prob.size

    def draw(self, rng: np.random.Generator) -> int:
        column = int(rng.integers(len(self)))
        if rng.random() < self.prob[column]:
            return column
        return int(self.alias[column])

    def draw_many(self, rng: np.random.Generator, size: int) -> np.ndarray:
        columns = rng.integers(len(self), size=size)
        keep = rng.random(size) < self.prob[columns]
        return np.where(keep, columns, self.alias[columns])


def optimal_range(cfg: SensorConfig, z_range: ZRange) -> float:
    """Slant range to a ground point placed at image fraction v_opt from the middle of
    the altitude band."""
    mid_z = 0.5 * (z_range[0] + z_range[1])
    return mid_z / math.cos(cfg.pitch_theta - cfg.v_opt * cfg.half_vfov)


def reward_weights(
    grid: BeliefGrid, cfg: SensorConfig, weights: RewardWeights, z_range: ZRange
) -> np.ndarray:
    """Per-cell information reward for a single view at the optimal range."""
    r_star = np.full(grid.probs.shape, optimal_range(cfg, z_range))
    reward, _ = cell_reward(grid.probs, r_star, cfg, weights)
    return reward


def _check_z_range(z_range: ZRange):
    lo, hi = z_range
    if not 0 < lo <= hi:
        raise ValueError(f"z_range must satisfy 0 < low <= high, got {z_range}.")


def _place_behind(
    x: float, y: float, z: float, psi: float, cfg: SensorConfig
) -> VehicleState:
    offset = z * math.tan(cfg.pitch_theta - cfg.v_opt * cfg.half_vfov)
    return VehicleState(
        x - offset * math.cos(psi), y - offset * math.sin(psi), z, psi
    )


class InformedSampler:
    """Weighted cell draw, then altitude and heading, then step back so the cell sits
    at image fraction v_opt. The alias table is built once per plan."""

    def __init__(
        self,
        grid: BeliefGrid,
        weights: np.ndarray,
        cfg: SensorConfig,
        z_range: ZRange,
    ):
        _check_z_range(z_range)
        self.grid = grid
        self.cfg = cfg
        self.z_range = z_range
        self.table = AliasTable(weights)

    def __call__(self, rng: np.random.Generator) -> VehicleState:
        cell = self.table.draw(rng)
        x, y = self.grid.centers[cell]
        z = float(rng.uniform(*self.z_range))
        psi = float(rng.uniform(0.0, TWO_PI))
        return _place_behind(float(x), float(y), z, psi, self.cfg)


class UniformSampler:
    """Uniform over the map extent, the altitude band and all headings."""

    def __init__(self, extent: Tuple[float, float, float, float], z_range: ZRange):
        _check_z_range(z_range)
        self.extent = extent
        self.z_range = z_range

    def __call__(self, rng: np.random.Generator) -> VehicleState:
        return uniform_sample(self.extent, self.z_range, rng)


def informed_sample(
    grid: BeliefGrid,
    weights: np.ndarray,
    cfg: SensorConfig,
    z_range: ZRange,
    rng: np.random.Generator,
) -> VehicleState:
    """Single informed draw. Planners keep an InformedSampler instead of rebuilding
    the table for every draw."""
    return InformedSampler(grid, weights, cfg, z_range)(rng)


def uniform_sample(
    extent: Tuple[float, float, float, float],
    z_range: ZRange,
    rng: np.random.Generator,
) -> VehicleState:
    _check_z_range(z_range)
    xmin, xmax, ymin, ymax = extent
    return VehicleState(
        float(rng.uniform(xmin, xmax)),
        float(rng.uniform(ymin, ymax)),
        float(rng.uniform(*z_range)),
        float(rng.uniform(0.0, TWO_PI)),
    )
