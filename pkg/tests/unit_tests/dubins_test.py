import math

import numpy as np
import pytest

from tigris_ipp.dubins import (
    WORDS,
    PathEdge,
    SegmentKind,
    VehicleState,
    connect,
    pose_at,
    poses_at,
    truncate,
)
from tigris_ipp.utils import angle_difference


class TestVehicleState:
    def test_heading_is_wrapped(self):
        assert VehicleState(0, 0, 0, -math.pi / 2).psi == pytest.approx(1.5 * math.pi)
        assert VehicleState(0, 0, 0, 2 * math.pi).psi == 0.0

    def test_negative_altitude(self):
        with pytest.raises(ValueError):
            VehicleState(0, 0, -1, 0)


class TestConnect:
    def test_straight(self):
        edge = connect(VehicleState(0, 0, 100, 0), VehicleState(100, 0, 100, 0), 10.0)
        assert edge.word == "LSL"  # ties go to the first word
        assert edge.total_length == pytest.approx(100.0)
        assert len(edge.segments) == 1
        assert edge.segments[0][0] is SegmentKind.STRAIGHT

    def test_u_turn(self):
        edge = connect(
            VehicleState(0, 0, 100, 0), VehicleState(0, 20, 100, math.pi), 10.0
        )
        assert edge.total_length == pytest.approx(10.0 * math.pi)
        assert all(kind is SegmentKind.LEFT for kind, _ in edge.segments)
        x, y, _, psi = poses_at(edge, np.array([edge.total_length]))[0]
        assert x == pytest.approx(0.0, abs=1e-9)
        assert y == pytest.approx(20.0)
        assert psi == pytest.approx(math.pi)

    def test_same_pose(self):
        state = VehicleState(5, 5, 100, 1.0)
        edge = connect(state, state, 60.0)
        assert edge.is_zero_length
        assert edge.segments == ()

    def test_bad_radius(self):
        with pytest.raises(ValueError):
            connect(VehicleState(0, 0, 1, 0), VehicleState(1, 0, 1, 0), 0.0)

    def test_random_connections(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            start = VehicleState(*rng.uniform(-500, 500, 2), 100.0, rng.uniform(0, 6.28))
            goal = VehicleState(*rng.uniform(-500, 500, 2), 100.0, rng.uniform(0, 6.28))
            edge = connect(start, goal, 60.0)
            assert edge.total_length >= start.planar_distance(goal) - 1e-9
            assert edge.total_length == pytest.approx(
                sum(length for _, length in edge.segments)
            )
            x, y, _, psi = poses_at(edge, np.array([edge.total_length]))[0]
            assert x == pytest.approx(goal.x, abs=1e-6)
            assert y == pytest.approx(goal.y, abs=1e-6)
            assert abs(angle_difference(psi, goal.psi)) < 1e-6


class TestPoses:
    @pytest.fixture
    def climb(self):
        return connect(VehicleState(0, 0, 80, 0), VehicleState(100, 0, 120, 0), 20.0)

    def test_altitude_is_interpolated(self, climb):
        middle = pose_at(climb, 50.0)
        assert middle.x == pytest.approx(50.0)
        assert middle.z == pytest.approx(100.0)
        # Climbing does not add to the cost.
        assert climb.total_length == pytest.approx(100.0)

    def test_endpoints(self, climb):
        assert pose_at(climb, 0.0) == climb.start
        assert pose_at(climb, climb.total_length) == climb.end

    def test_out_of_range(self, climb):
        with pytest.raises(ValueError):
            pose_at(climb, -1.0)
        with pytest.raises(ValueError):
            pose_at(climb, 101.0)

    def test_sample_spacing(self, climb):
        stations, poses = climb.sample(30.0)
        assert stations[0] == 0.0
        assert stations[-1] == pytest.approx(100.0)
        assert np.all(np.diff(stations) <= 30.0 + 1e-9)
        assert poses.shape == (stations.size, 4)


class TestTruncate:
    def test_prefix(self):
        edge = connect(
            VehicleState(0, 0, 100, 0), VehicleState(200, 150, 100, math.pi / 2), 40.0
        )
        short = truncate(edge, 0.4 * edge.total_length)
        assert short.total_length == pytest.approx(0.4 * edge.total_length)
        expected = pose_at(edge, 0.4 * edge.total_length)
        assert short.end.x == pytest.approx(expected.x)
        assert short.end.y == pytest.approx(expected.y)
        assert short.end.psi == pytest.approx(expected.psi)
        assert sum(length for _, length in short.segments) == pytest.approx(
            short.total_length
        )

    def test_zero_and_full(self):
        edge = connect(VehicleState(0, 0, 100, 0), VehicleState(100, 0, 100, 0), 40.0)
        assert truncate(edge, 0.0).is_zero_length
        assert truncate(edge, edge.total_length) is edge

    def test_quarter_circle(self):
        arc = PathEdge(
            VehicleState(0, 0, 100, 0),
            VehicleState(60, 60, 100, math.pi / 2),
            ((SegmentKind.LEFT, 30 * math.pi),),
            60.0,
            30 * math.pi,
            "L",
        )
        assert pose_at(arc, 30 * math.pi).psi == pytest.approx(math.pi / 2, abs=1e-9)

    def test_zero_length_is_a_fixed_point(self):
        state = VehicleState(5, 5, 100, 1.0)
        edge = connect(state, state, 60.0)
        assert truncate(edge, 0.0).is_zero_length
        assert truncate(edge, 0.0).start == state

    def test_reconnect_after_truncation(self):
        rng = np.random.default_rng(11)
        radius = 60.0
        for _ in range(200):
            start = VehicleState(*rng.uniform(-500, 500, 2), 100.0, rng.uniform(0, 6.28))
            goal = VehicleState(*rng.uniform(-500, 500, 2), 100.0, rng.uniform(0, 6.28))
            edge = connect(start, goal, radius)
            s = rng.uniform(0.0, edge.total_length)
            rest = connect(truncate(edge, s).end, goal, radius)
            assert rest.total_length <= edge.total_length - s + 2 * math.pi * radius + 1e-6


class TestReverseHeading:
    def test_turn_around_in_place(self):
        edge = connect(VehicleState(0, 0, 100, 0), VehicleState(0, 0, 100, math.pi), 60.0)
        assert edge.total_length == pytest.approx(7 * math.pi / 3 * 60.0)
        assert edge.total_length == pytest.approx(439.82, abs=0.01)
        # Three arcs, the middle one turning the other way. RLR and LRL tie here.
        kinds = [kind for kind, _ in edge.segments]
        assert edge.word in ("RLR", "LRL")
        assert len(kinds) == 3 and SegmentKind.STRAIGHT not in kinds
        assert kinds[0] is kinds[2] and kinds[1] is not kinds[0]


class TestOptimality:
    def word_edges(self, start, goal, radius):
        """Every word that connects the poses, built segment by segment."""
        dx, dy = goal.x - start.x, goal.y - start.y
        theta = math.atan2(dy, dx)
        alpha = (start.psi - theta) % (2 * math.pi)
        beta = (goal.psi - theta) % (2 * math.pi)
        d = math.hypot(dx, dy) / radius
        edges = {}
        for name, word in WORDS.items():
            params = word(alpha, beta, d)
            if params is None:
                continue
            segments = tuple(
                (SegmentKind(letter), value * radius) for letter, value in zip(name, params)
            )
            edges[name] = PathEdge(
                start, goal, segments, radius, sum(length for _, length in segments), name
            )
        return edges

    def test_shortest_of_all_words(self):
        rng = np.random.default_rng(12)
        radius = 60.0
        for _ in range(300):
            start = VehicleState(*rng.uniform(-300, 300, 2), 100.0, rng.uniform(0, 6.28))
            goal = VehicleState(*rng.uniform(-300, 300, 2), 100.0, rng.uniform(0, 6.28))
            candidates = self.word_edges(start, goal, radius)
            assert candidates
            for candidate in candidates.values():
                x, y, _, psi = poses_at(candidate, np.array([candidate.total_length]))[0]
                assert x == pytest.approx(goal.x, abs=1e-5)
                assert y == pytest.approx(goal.y, abs=1e-5)
                assert abs(angle_difference(psi, goal.psi)) < 1e-6
            shortest = min(c.total_length for c in candidates.values())
            assert connect(start, goal, radius).total_length == pytest.approx(shortest)

    def test_lipschitz_along_the_edge(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            start = VehicleState(*rng.uniform(-300, 300, 2), 90.0, rng.uniform(0, 6.28))
            goal = VehicleState(*rng.uniform(-300, 300, 2), 110.0, rng.uniform(0, 6.28))
            edge = connect(start, goal, 40.0)
            stations = np.sort(rng.uniform(0.0, edge.total_length, 60))
            planar = poses_at(edge, stations)[:, :2]
            gaps = np.linalg.norm(planar[:, None] - planar[None], axis=-1)
            steps = np.abs(stations[:, None] - stations[None])
            assert np.all(gaps <= steps + 1e-9)
