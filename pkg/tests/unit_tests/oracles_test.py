import math
from dataclasses import replace

import numpy as np
import pytest

from tigris_ipp.belief import BeliefGrid, GaussianCentroid, GridSpec
from tigris_ipp.dubins import PathEdge, SegmentKind, VehicleState, connect
from tigris_ipp.information import BeliefOverlay, RewardWeights, edge_reward, node_reward
from tigris_ipp.oracles import (
    check_edge_reward,
    check_lattice,
    check_min_range,
    dense_sweep_edge_reward,
    dense_sweep_min_range,
    dense_sweep_ranges,
    lattice_moves,
    lattice_optimum,
    toy_scenario,
)
from tigris_ipp.sensor import SensorConfig, footprint, min_range_to_edge


class TestDenseSweep:
    def test_straight_below(self):
        assert dense_sweep_min_range(0.0, SensorConfig(), 100.0) == pytest.approx(
            math.sqrt(2.0) * 100.0
        )

    def test_range_models(self):
        check = check_min_range(40, seed=1)
        assert 0 < check.samples <= 40
        assert check.max_error["footprint"] < 0.01
        assert check.within["footprint"] == 1.0
        assert math.isfinite(check.max_error["closed_form"])
        assert set(check.max_error) == {"closed_form", "footprint"}

    def test_batched_sweep_matches_pose_by_pose(self):
        spec = GridSpec.from_extent(600.0, 600.0, 20.0)
        grid = BeliefGrid(spec=spec, probs=np.full(spec.size, 0.3))
        cfg = SensorConfig()
        edge = connect(
            VehicleState(150.0, 200.0, 90.0, 0.0),
            VehicleState(420.0, 380.0, 110.0, 1.2),
            60.0,
        )
        cells, ranges = dense_sweep_ranges(edge, grid, cfg, step=2.0)

        _, poses = edge.sample(2.0)
        best = np.full(spec.size, np.inf)
        for x, y, z, psi in poses:
            seen = np.flatnonzero(
                footprint(VehicleState(x, y, z, psi), cfg).contains(grid.centers)
            )
            delta = grid.centers[seen] - [x, y]
            best[seen] = np.minimum(best[seen], np.sqrt(np.sum(delta ** 2, axis=1) + z * z))
        expected = np.flatnonzero(best <= cfg.beta)
        assert cells.size > 0
        assert sorted(cells.tolist()) == expected.tolist()
        order = np.argsort(cells)
        assert np.allclose(ranges[order], best[expected])

    def test_lateral_offsets(self):
        cfg = SensorConfig()
        for d in (0.0, 50.0, 150.0, 300.0):
            reference = dense_sweep_min_range(d, cfg, 100.0, step=0.25)
            assert min_range_to_edge(d, cfg, 100.0, "footprint") == pytest.approx(
                reference, rel=0.01
            )

    def test_straight_edge_over_uniform_belief(self):
        spec = GridSpec.from_extent(1000.0, 1000.0, 25.0)
        grid = BeliefGrid(spec=spec, probs=np.full(spec.size, 0.5))
        cfg = SensorConfig(edge_range_model="footprint")
        start = VehicleState(250.0, 500.0, 100.0, 0.0)
        end = VehicleState(750.0, 500.0, 100.0, 0.0)
        edge = PathEdge(start, end, ((SegmentKind.STRAIGHT, 500.0),), 60.0, 500.0, "S")
        fast, _ = edge_reward(edge, BeliefOverlay(), grid, cfg, RewardWeights())
        dense = dense_sweep_edge_reward(edge, grid, cfg, RewardWeights())
        assert fast == pytest.approx(dense, rel=0.02)

    def test_edge_reward(self):
        check = check_edge_reward(4, seed=2)
        assert check.samples > 0
        assert check.max_error < 0.02


class TestLattice:
    @pytest.fixture(scope="class")
    def scenario(self):
        return toy_scenario(0)

    def test_toy_world(self, scenario):
        assert scenario.grid.spec.size == 100
        assert scenario.planner.budget == 80.0
        assert scenario.grid.spec.contains(scenario.start.x, scenario.start.y)

    def test_no_edges_is_the_start_view(self, scenario):
        result = lattice_optimum(
            scenario.start, scenario.grid, scenario.sensor, scenario.weights,
            scenario.planner, max_edges=0,
        )
        root, _ = node_reward(
            scenario.start, BeliefOverlay(), scenario.grid, scenario.sensor, scenario.weights
        )
        assert result.info == root
        assert result.edges == []
        assert result.paths == 1

    def test_more_edges_never_hurt(self, scenario):
        args = (scenario.start, scenario.grid, scenario.sensor, scenario.weights, scenario.planner)
        one = lattice_optimum(*args, max_edges=1)
        two = lattice_optimum(*args, max_edges=2)
        assert two.info >= one.info
        assert len(two.edges) <= 2
        assert sum(e.total_length for e in two.edges) <= scenario.planner.budget + 1e-9

    def test_moves(self, scenario):
        moves = lattice_moves(scenario.start, scenario.grid)
        assert len(moves) == 8
        north = [m for m in moves if m.x == scenario.start.x and m.y > scenario.start.y]
        assert north and north[0].psi == pytest.approx(math.pi / 2)
        assert len(lattice_moves(scenario.start, scenario.grid, diagonals=False)) == 4
        corner = VehicleState(10.0, 10.0, 20.0, 0.0)
        assert len(lattice_moves(corner, scenario.grid)) == 3

    def test_hops_may_outrun_the_extension_length(self, scenario):
        args = (scenario.start, scenario.grid, scenario.sensor, scenario.weights, scenario.planner)
        result = lattice_optimum(*args, max_edges=2)
        # Eight first hops, each with several follow-ups.
        assert result.paths > 40

    def test_best_path_turns_toward_the_target(self, scenario):
        north = replace(
            scenario,
            centroids=(GaussianCentroid(center=(90.0, 170.0), peak_prob=0.9, sigma=20.0),),
        )
        result = lattice_optimum(
            north.start, north.grid, north.sensor, north.weights, north.planner, max_edges=3
        )
        turns = [
            length
            for edge in result.edges
            for kind, length in edge.segments
            if kind is not SegmentKind.STRAIGHT
        ]
        assert turns and max(turns) > 0
        assert result.edges[-1].end.y > north.start.y

    def test_toy_config_caps_near_nodes(self, scenario):
        assert scenario.planner.max_near == 4

    def test_check_lattice(self):
        runs = check_lattice(2, seed=0, iterations=200, max_edges=2)
        assert [run.seed for run in runs] == [0, 1]
        assert all(run.optimum > 0 and run.ratio > 0 for run in runs)
