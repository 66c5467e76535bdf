"""Small worlds shared by the planner-level tests."""
from tigris_ipp import (
    GaussianCentroid,
    GridSpec,
    PlannerConfig,
    RewardWeights,
    SensorConfig,
    VehicleState,
    build_prior,
)


def small_grid(centroids=((700.0, 500.0),)):
    """1 km square, 50 m cells, one bump per centroid."""
    spec = GridSpec.from_extent(1000.0, 1000.0, 50.0)
    bumps = [GaussianCentroid(center=c, peak_prob=0.8, sigma=120.0) for c in centroids]
    return build_prior(spec, bumps, background=0.1)


def small_config(**overrides) -> PlannerConfig:
    values = dict(
        budget=1500.0,
        extend=200.0,
        near_radius=400.0,
        turn_radius=40.0,
        iterations=120,
        max_near=8,
        seed=3,
        z_range=(80.0, 120.0),
    )
    values.update(overrides)
    return PlannerConfig(**values)


SENSOR = SensorConfig()
WEIGHTS = RewardWeights()
START = VehicleState(300.0, 500.0, 100.0, 0.0)
