from typing import Dict, Type

from tigris_ipp.planners.base import (
    Planner,
    PlannerConfig,
    PlanningInputError,
    steer,
)
from tigris_ipp.planners.rig_tree import RigTreePlanner, rig_plan
from tigris_ipp.planners.tigris import TigrisPlanner, tigris_plan
from tigris_ipp.planners.tree import (
    PlanResult,
    PlanTree,
    TreeNode,
    extract_best,
    prune,
)

PLANNERS: Dict[str, Type[Planner]] = {
    TigrisPlanner.name: TigrisPlanner,
    RigTreePlanner.name: RigTreePlanner,
}


def get_planner(name: str) -> Type[Planner]:
    try:
        return PLANNERS[name]
    except KeyError:
        raise ValueError(
            f"Unknown planner {name!r}; choose from {sorted(PLANNERS)}."
        ) from None


__all__ = [
    "PLANNERS",
    "Planner",
    "PlannerConfig",
    "PlanningInputError",
    "PlanResult",
    "PlanTree",
    "RigTreePlanner",
    "TigrisPlanner",
    "TreeNode",
    "extract_best",
    "get_planner",
    "prune",
    "rig_plan",
    "steer",
    "tigris_plan",
]
