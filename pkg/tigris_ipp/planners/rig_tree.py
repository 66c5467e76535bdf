from dataclasses import replace
from typing import Sequence

from tigris_ipp.belief import BeliefGrid, NoFlyZone
from tigris_ipp.dubins import VehicleState
from tigris_ipp.information import RewardWeights
from tigris_ipp.planners.base import Planner, PlannerConfig
from tigris_ipp.planners.tree import PlanResult
from tigris_ipp.sensor import SensorConfig


class RigTreePlanner(Planner):
    """Baseline: uniform samples and rewards from node views only. The best path is
    re-scored with the full trajectory reward so both planners are compared on the
    same measure."""

    name = "rig"
    reevaluate = True

    def configure(self, config: PlannerConfig) -> PlannerConfig:
        return replace(config, sampler_kind="uniform", edge_rewards=False)


def rig_plan(
    start: VehicleState,
    grid: BeliefGrid,
    sensor_cfg: SensorConfig,
    weights: RewardWeights,
    cfg: PlannerConfig,
    zones: Sequence[NoFlyZone] = (),
) -> PlanResult:
    return RigTreePlanner(grid, sensor_cfg, weights, cfg, zones).plan(start)
