from pathlib import Path

from tigris_ipp.belief import (
    BeliefGrid,
    GaussianCentroid,
    GridSpec,
    NoFlyZone,
    bayes_update,
    build_prior,
    entropy,
)
from tigris_ipp.dubins import PathEdge, VehicleState, connect
from tigris_ipp.information import (
    BeliefOverlay,
    ContractViolation,
    RewardWeights,
    edge_reward,
    node_reward,
    trajectory_reward,
)
from tigris_ipp.planners import (
    PlannerConfig,
    PlanResult,
    RigTreePlanner,
    TigrisPlanner,
    get_planner,
    rig_plan,
    tigris_plan,
)
from tigris_ipp.scenario import Scenario, ScenarioTemplate, generate_scenario
from tigris_ipp.sensor import SensorConfig, detection_rate, footprint
from tigris_ipp.settings import Settings

__version__ = Path(__file__).parent.joinpath("version.txt").read_text().rstrip()

__all__ = [
    "__version__",
    "BeliefGrid",
    "BeliefOverlay",
    "ContractViolation",
    "GaussianCentroid",
    "GridSpec",
    "NoFlyZone",
    "PathEdge",
    "PlanResult",
    "PlannerConfig",
    "RewardWeights",
    "RigTreePlanner",
    "Scenario",
    "ScenarioTemplate",
    "SensorConfig",
    "Settings",
    "TigrisPlanner",
    "VehicleState",
    "bayes_update",
    "build_prior",
    "connect",
    "detection_rate",
    "edge_reward",
    "entropy",
    "footprint",
    "generate_scenario",
    "get_planner",
    "node_reward",
    "rig_plan",
    "tigris_plan",
    "trajectory_reward",
]
