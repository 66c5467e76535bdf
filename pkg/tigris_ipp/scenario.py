"""Scenarios (map, prior, sensor, planner settings and start), the random scenario
generator used by the benchmark, and the YAML files they are stored in."""
import logging
from dataclasses import asdict, dataclass, field, fields, replace
from functools import cached_property
from pathlib import Path
from typing import IO, Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml

from tigris_ipp.belief import (
    BeliefGrid,
    GaussianCentroid,
    GridSpec,
    NoFlyZone,
    build_prior,
)
from tigris_ipp.dubins import PathEdge, SegmentKind, VehicleState
from tigris_ipp.information import RewardWeights
from tigris_ipp.planners.base import PlannerConfig
from tigris_ipp.planners.tree import PlanResult
from tigris_ipp.sensor import SensorConfig
from tigris_ipp.utils import format_float

log = logging.getLogger("tigris.scenario")

SCHEMA_VERSION = 1
PathLike = Union[str, Path]


@dataclass(frozen=True)
class Scenario:
    width: float
    height: float
    cell_size: float
    centroids: Tuple[GaussianCentroid, ...]
    background: float
    sensor: SensorConfig
    weights: RewardWeights
    planner: PlannerConfig
    start: VehicleState
    zones: Tuple[NoFlyZone, ...] = ()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "centroids", tuple(self.centroids))
        object.__setattr__(self, "zones", tuple(self.zones))
        if not self.grid_spec.contains(self.start.x, self.start.y):
            raise ValueError(f"Start {self.start} lies outside the map.")
        point = np.array([[self.start.x, self.start.y]])
        if any(zone.contains(point)[0] for zone in self.zones):
            raise ValueError(f"Start {self.start} lies inside a no-fly zone.")

    @property
    def grid_spec(self) -> GridSpec:
        return GridSpec.from_extent(self.width, self.height, self.cell_size)

    @cached_property
    def grid(self) -> BeliefGrid:
        return build_prior(self.grid_spec, self.centroids, self.background)


@dataclass(frozen=True)
class ScenarioTemplate:
    """Recipe for random scenarios. `centroid_count` fixes the number of centroids;
    otherwise it is drawn uniformly from `count_range`."""

    width: float = 2500.0
    height: float = 2500.0
    cell_size: float = 50.0
    centroid_count: Optional[int] = None
    count_range: Tuple[int, int] = (1, 12)
    peak_range: Tuple[float, float] = (0.4, 0.9)
    # In cell sizes.
    sigma_range: Tuple[float, float] = (2.0, 8.0)
    # Centroids stay this far from the map edge.
    margin: float = 250.0
    background: float = 0.1
    sensor: SensorConfig = field(default_factory=SensorConfig)
    weights: RewardWeights = field(default_factory=RewardWeights)
    planner: PlannerConfig = field(
        default_factory=lambda: PlannerConfig(
            budget=3000.0,
            extend=400.0,
            near_radius=800.0,
            turn_radius=60.0,
            max_near=12,
            iterations=4000,
            z_range=(80.0, 120.0),
        )
    )
    # Defaults to the map center, heading east, at 100 m.
    start: Optional[VehicleState] = None
    zones: Tuple[NoFlyZone, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "zones", tuple(self.zones))
        object.__setattr__(self, "count_range", tuple(int(v) for v in self.count_range))
        object.__setattr__(self, "peak_range", tuple(float(v) for v in self.peak_range))
        object.__setattr__(self, "sigma_range", tuple(float(v) for v in self.sigma_range))
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"Map size must be positive, got {self.width}x{self.height}.")
        if self.cell_size <= 0:
            raise ValueError(f"cell_size must be positive, got {self.cell_size}.")
        low, high = self.count_range
        if not 0 <= low <= high:
            raise ValueError(f"count_range must satisfy 0 <= low <= high, got {self.count_range}.")
        if self.centroid_count is not None and self.centroid_count < 0:
            raise ValueError(f"centroid_count must be non-negative, got {self.centroid_count}.")
        if not 0 < self.peak_range[0] <= self.peak_range[1] <= 1:
            raise ValueError(f"peak_range must lie in (0, 1], got {self.peak_range}.")
        if not 0 < self.sigma_range[0] <= self.sigma_range[1]:
            raise ValueError(f"sigma_range must be positive, got {self.sigma_range}.")
        if not 0 <= 2 * self.margin < min(self.width, self.height):
            raise ValueError(f"margin {self.margin} leaves no room for centroids.")
        if not 0 <= self.background < 1:
            raise ValueError(f"background must be in [0, 1), got {self.background}.")

    def start_state(self) -> VehicleState:
        if self.start is not None:
            return self.start
        return VehicleState(self.width / 2.0, self.height / 2.0, 100.0, 0.0)


def generate_scenario(seed: int, template: ScenarioTemplate) -> Scenario:
    """Random scenario fully determined by `seed`."""
    rng = np.random.default_rng(seed)
    if template.centroid_count is not None:
        count = template.centroid_count
    else:
        low, high = template.count_range
        count = int(rng.integers(low, high + 1))

    centroids = []
    for _ in range(count):
        x = float(rng.uniform(template.margin, template.width - template.margin))
        y = float(rng.uniform(template.margin, template.height - template.margin))
        peak = float(rng.uniform(*template.peak_range))
        sigma = float(rng.uniform(*template.sigma_range)) * template.cell_size
        centroids.append(GaussianCentroid(center=(x, y), peak_prob=peak, sigma=sigma))
    log.debug(f"Scenario {seed}: {count} centroids.")

    return Scenario(
        width=template.width,
        height=template.height,
        cell_size=template.cell_size,
        centroids=tuple(centroids),
        background=template.background,
        sensor=template.sensor,
        weights=template.weights,
        planner=replace(template.planner, seed=seed),
        start=template.start_state(),
        zones=template.zones,
        seed=seed,
    )


@dataclass
class TrialRecord:
    seed: int
    centroid_count: int
    planner: str
    info: float = 0.0
    cost: float = 0.0
    node_count: int = 0
    iterations: int = 0
    curve: List[Tuple[float, float]] = field(default_factory=list)
    failed: bool = False
    error: Optional[str] = None

    @classmethod
    def from_result(cls, scenario: Scenario, result: PlanResult) -> "TrialRecord":
        return cls(
            seed=scenario.seed,
            centroid_count=len(scenario.centroids),
            planner=result.planner,
            info=result.info,
            cost=result.cost,
            node_count=result.node_count,
            iterations=result.iterations,
            curve=[(float(t), float(v)) for t, v in result.curve],
        )


# YAML plumbing


class _Dumper(yaml.SafeDumper):
    digits = 17


def _represent_float(dumper: _Dumper, value: float):
    return dumper.represent_scalar(
        "tag:yaml.org,2002:float", format_float(float(value), dumper.digits)
    )


_Dumper.add_representer(float, _represent_float)
_Dumper.add_representer(np.float64, _represent_float)
_Dumper.add_representer(tuple, lambda dumper, value: dumper.represent_list(list(value)))


def _dump(documents: Iterable[Any], stream: Optional[IO] = None, digits: int = 17):
    dumper = type("Dumper", (_Dumper,), {"digits": digits})
    return yaml.dump_all(
        documents,
        stream,
        Dumper=dumper,
        sort_keys=False,
        default_flow_style=None,
        explicit_start=True,
    )


def _config_dict(obj) -> Dict[str, Any]:
    return {f.name: getattr(obj, f.name) for f in fields(obj) if f.init}


def _build(cls, data: Optional[Dict[str, Any]], where: str):
    """Dataclass from a mapping; unknown keys are rejected, missing ones default."""
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ValueError(f"'{where}' must be a mapping, got {type(data).__name__}.")
    known = {f.name for f in fields(cls) if f.init}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"Unknown keys in '{where}': {sorted(unknown)}.")
    return cls(**data)


def _state_dict(state: VehicleState) -> Dict[str, float]:
    return asdict(state)


def _state(data: Dict[str, Any], where: str) -> VehicleState:
    if not isinstance(data, dict) or set(data) != {"x", "y", "z", "psi"}:
        raise ValueError(f"'{where}' needs exactly the keys x, y, z and psi.")
    return VehicleState(**{k: float(v) for k, v in data.items()})


def _planner_dict(cfg: PlannerConfig) -> Dict[str, Any]:
    data = _config_dict(cfg)
    data["z_range"] = list(cfg.z_range)
    return data


def _planner(data: Optional[Dict[str, Any]]) -> PlannerConfig:
    data = dict(data or {})
    if "z_range" in data:
        data["z_range"] = tuple(data["z_range"])
    return _build(PlannerConfig, data, "planner")


def scenario_to_dict(scenario: Scenario) -> Dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": scenario.seed,
        "map": {
            "width": float(scenario.width),
            "height": float(scenario.height),
            "cell_size": float(scenario.cell_size),
            "background": float(scenario.background),
        },
        "centroids": [
            {
                "center": list(c.center),
                "peak_prob": c.peak_prob,
                "sigma": c.sigma,
            }
            for c in scenario.centroids
        ],
        "zones": [[list(vertex) for vertex in zone.polygon] for zone in scenario.zones],
        "sensor": _config_dict(scenario.sensor),
        "weights": _config_dict(scenario.weights),
        "planner": _planner_dict(scenario.planner),
        "start": _state_dict(scenario.start),
    }


def _check_schema(data: Any, kind: str):
    if not isinstance(data, dict):
        raise ValueError(f"A {kind} file must hold a mapping.")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(
            f"Unsupported {kind} schema_version {version!r}; expected {SCHEMA_VERSION}."
        )


_SCENARIO_KEYS = {
    "schema_version",
    "seed",
    "map",
    "centroids",
    "zones",
    "sensor",
    "weights",
    "planner",
    "start",
}
_MAP_KEYS = {"width", "height", "cell_size", "background"}


def scenario_from_dict(data: Dict[str, Any]) -> Scenario:
    _check_schema(data, "scenario")
    unknown = set(data) - _SCENARIO_KEYS
    if unknown:
        raise ValueError(f"Unknown keys in scenario: {sorted(unknown)}.")
    if "map" not in data or "start" not in data:
        raise ValueError("A scenario needs 'map' and 'start' sections.")

    grid = data["map"]
    unknown = set(grid) - _MAP_KEYS
    if unknown:
        raise ValueError(f"Unknown keys in 'map': {sorted(unknown)}.")
    missing = {"width", "height", "cell_size"} - set(grid)
    if missing:
        raise ValueError(f"Missing keys in 'map': {sorted(missing)}.")

    centroids = tuple(
        _build(GaussianCentroid, dict(c), "centroids") for c in data.get("centroids") or []
    )
    zones = tuple(NoFlyZone(polygon=zone) for zone in data.get("zones") or [])
    return Scenario(
        width=float(grid["width"]),
        height=float(grid["height"]),
        cell_size=float(grid["cell_size"]),
        centroids=centroids,
        background=float(grid.get("background", 0.1)),
        sensor=_build(SensorConfig, data.get("sensor"), "sensor"),
        weights=_build(RewardWeights, data.get("weights"), "weights"),
        planner=_planner(data.get("planner")),
        start=_state(data["start"], "start"),
        zones=zones,
        seed=int(data.get("seed", 0)),
    )


def dump_scenario(scenario: Scenario, stream: Optional[IO] = None, digits: int = 17):
    """Write the scenario as YAML; returns the text when no stream is given."""
    return _dump([scenario_to_dict(scenario)], stream, digits)


def load_scenario(source: Union[PathLike, IO]) -> Scenario:
    if isinstance(source, (str, Path)):
        with open(source) as f:
            return scenario_from_dict(yaml.safe_load(f))
    return scenario_from_dict(yaml.safe_load(source))


def _edge_dict(edge: PathEdge) -> Dict[str, Any]:
    return {
        "word": edge.word,
        "turn_radius": edge.turn_radius,
        "segments": [[kind.value, length] for kind, length in edge.segments],
        "length": edge.total_length,
    }


def result_to_dict(result: PlanResult) -> Dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "planner": result.planner,
        "info": result.info,
        "internal_info": result.internal_info,
        "cost": result.cost,
        "node_count": result.node_count,
        "iterations": result.iterations,
        "curve_unit": result.curve_unit,
        "curve": [[float(t), float(v)] for t, v in result.curve],
        "states": [_state_dict(s) for s in result.states],
        "cum_cost": [float(c) for c in result.cum_cost],
        "cum_info": [float(i) for i in result.cum_info],
        "edges": [_edge_dict(e) for e in result.edges],
    }


def result_from_dict(data: Dict[str, Any]) -> PlanResult:
    _check_schema(data, "result")
    states = [_state(s, "states") for s in data["states"]]
    if len(data["edges"]) != len(states) - 1:
        raise ValueError("A result needs exactly one edge between consecutive states.")
    edges = []
    for start, end, edge in zip(states[:-1], states[1:], data["edges"]):
        edges.append(
            PathEdge(
                start=start,
                end=end,
                segments=tuple((SegmentKind(k), float(l)) for k, l in edge["segments"]),
                turn_radius=float(edge["turn_radius"]),
                total_length=float(edge["length"]),
                word=edge.get("word", ""),
            )
        )
    return PlanResult(
        planner=data["planner"],
        states=states,
        edges=edges,
        cum_cost=[float(c) for c in data["cum_cost"]],
        cum_info=[float(i) for i in data["cum_info"]],
        info=float(data["info"]),
        cost=float(data["cost"]),
        node_count=int(data["node_count"]),
        iterations=int(data["iterations"]),
        curve=[(float(t), float(v)) for t, v in data["curve"]],
        curve_unit=data.get("curve_unit", "iteration"),
        internal_info=data.get("internal_info"),
    )


def dump_result(result: PlanResult, stream: Optional[IO] = None, digits: int = 17):
    return _dump([result_to_dict(result)], stream, digits)


def load_result(source: Union[PathLike, IO]) -> PlanResult:
    if isinstance(source, (str, Path)):
        with open(source) as f:
            return result_from_dict(yaml.safe_load(f))
    return result_from_dict(yaml.safe_load(source))


def trial_to_dict(record: TrialRecord) -> Dict[str, Any]:
    data = asdict(record)
    data["curve"] = [[float(t), float(v)] for t, v in record.curve]
    return data


def dump_trials(
    records: Sequence[TrialRecord], stream: Optional[IO] = None, digits: int = 17
):
    """One YAML document per trial."""
    return _dump([trial_to_dict(r) for r in records], stream, digits)


def load_trials(source: Union[PathLike, IO]) -> List[TrialRecord]:
    def parse(documents):
        records = []
        for data in documents:
            if data is None:
                continue
            data["curve"] = [tuple(point) for point in data.get("curve", [])]
            records.append(_build(TrialRecord, data, "trial"))
        return records

    if isinstance(source, (str, Path)):
        with open(source) as f:
            return parse(yaml.safe_load_all(f))
    return parse(yaml.safe_load_all(source))


def dump_yaml(data: Any, stream: Optional[IO] = None, digits: int = 17):
    return _dump([data], stream, digits)
