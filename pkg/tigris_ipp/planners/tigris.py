from typing import Sequence

from tigris_ipp.belief import BeliefGrid, NoFlyZone
from tigris_ipp.dubins import VehicleState
from tigris_ipp.information import RewardWeights
from tigris_ipp.planners.base import Planner, PlannerConfig
from tigris_ipp.planners.tree import PlanResult
from tigris_ipp.sensor import SensorConfig


class TigrisPlanner(Planner):
    """Informed sampling with edge rewards: samples are drawn where a single view
    would gain the most, and every extension is credited with what the camera sees
    while flying it."""

    name = "tigris"


def tigris_plan(
    start: VehicleState,
    grid: BeliefGrid,
    sensor_cfg: SensorConfig,
    weights: RewardWeights,
    cfg: PlannerConfig,
    zones: Sequence[NoFlyZone] = (),
) -> PlanResult:
    return TigrisPlanner(grid, sensor_cfg, weights, cfg, zones).plan(start)
