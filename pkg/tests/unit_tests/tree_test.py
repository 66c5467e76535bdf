import numpy as np
import pytest

from tigris_ipp.dubins import VehicleState
from tigris_ipp.planners.tree import (
    PlanTree,
    SpatialIndex,
    TreeNode,
    extract_best,
    prune,
)


def state(x, y, z=100.0, psi=0.0):
    return VehicleState(x, y, z, psi)


@pytest.fixture
def tree():
    tree = PlanTree()
    tree.add(state(0, 0), 0.0, 1.0, 100.0)
    return tree


class TestSpatialIndex:
    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        points = rng.uniform(0, 1000, (300, 3))
        index = SpatialIndex(min_buffer=8)
        for i, point in enumerate(points):
            index.insert(i, point)
        assert len(index) == 300
        for query in rng.uniform(0, 1000, (20, 3)):
            distances = np.linalg.norm(points - query, axis=1)
            assert index.nearest(query) == int(np.argmin(distances))
            ids, dists = index.within(query, 150.0)
            assert sorted(ids.tolist()) == np.flatnonzero(distances <= 150.0).tolist()
            assert np.all(np.diff(dists) >= 0)

    def test_ties_go_to_lower_id(self):
        index = SpatialIndex()
        index.insert(4, [1.0, 1.0, 1.0])
        index.insert(2, [1.0, 1.0, 1.0])
        assert index.nearest([0.0, 0.0, 0.0]) == 2
        assert index.within([0.0, 0.0, 0.0], 5.0)[0].tolist() == [2, 4]

    def test_empty(self):
        assert SpatialIndex().nearest([0.0, 0.0, 0.0]) is None


class TestPlanTree:
    def test_budget(self, tree):
        with pytest.raises(ValueError):
            tree.add(state(10, 0), 100.5, 2.0, 100.0, parent=0)

    def test_closed_nodes_are_not_extended(self, tree):
        closed = tree.add(state(50, 0), 100.0, 2.0, 100.0, parent=0)
        assert closed.closed
        assert tree.nearest_open(state(50, 0)).id == 0
        assert [n.id for n in tree.near_open(state(50, 0), 1000.0)] == [0]

    def test_exhausted_nodes_leave_the_open_set(self, tree):
        stranded = tree.add(state(50, 0), 99.5, 2.0, 100.0, parent=0, min_extension=1.0)
        # Still short of the budget, so not closed, but it cannot be extended.
        assert not stranded.closed
        assert tree.nearest_open(state(50, 0)).id == 0
        roomy = tree.add(state(60, 0), 98.0, 2.0, 100.0, parent=0, min_extension=1.0)
        assert tree.nearest_open(state(60, 0)).id == roomy.id

    def test_near_open_order_and_limit(self, tree):
        tree.add(state(30, 0), 30.0, 2.0, 100.0, parent=0)
        tree.add(state(10, 0), 10.0, 1.5, 100.0, parent=0)
        near = tree.near_open(state(12, 0), 100.0)
        assert [n.id for n in near] == [2, 0, 1]
        assert [n.id for n in tree.near_open(state(12, 0), 100.0, limit=2)] == [2, 0]
        assert tree.near_open(state(500, 0), 100.0) == []

    def test_best_tie_break(self, tree):
        tree.add(state(10, 0), 20.0, 5.0, 100.0, parent=0)
        tree.add(state(20, 0), 10.0, 5.0, 100.0, parent=0)
        tree.add(state(30, 0), 10.0, 5.0, 100.0, parent=0)
        # Same reward: cheaper wins, then the older node.
        assert tree.best_id == 2

    def test_path_to(self, tree):
        tree.add(state(10, 0), 10.0, 2.0, 100.0, parent=0)
        tree.add(state(20, 0), 20.0, 3.0, 100.0, parent=1)
        assert [n.id for n in tree.path_to(2)] == [0, 1, 2]


class TestPrune:
    def candidate(self, x, cost, info):
        return TreeNode(-1, state(x, 0), cost, info)

    def test_dominated(self, tree):
        tree.add(state(10, 0), 10.0, 5.0, 100.0, parent=0)
        assert prune(self.candidate(12, 20.0, 4.0), tree, 50.0)
        assert prune(self.candidate(12, 10.0, 4.0), tree, 50.0)

    def test_not_dominated(self, tree):
        tree.add(state(10, 0), 10.0, 5.0, 100.0, parent=0)
        # Equal is not strictly worse.
        assert not prune(self.candidate(12, 10.0, 5.0), tree, 50.0)
        # Better in one dimension survives.
        assert not prune(self.candidate(12, 20.0, 6.0), tree, 50.0)
        # Dominating nodes must be nearby.
        assert not prune(self.candidate(500, 20.0, 0.5), tree, 50.0)

    def test_closed_nodes_still_prune(self, tree):
        tree.add(state(10, 0), 100.0, 9.0, 100.0, parent=0)
        tree.add(state(500, 0), 50.0, 9.0, 100.0, parent=0)
        assert prune(self.candidate(12, 100.0, 8.0), tree, 50.0)


class TestExtractBest:
    def test_root_only(self, tree):
        result = extract_best(tree, "tigris")
        assert result.states == [state(0, 0)]
        assert result.edges == []
        assert result.cum_cost == [0.0]
        assert result.info == 1.0
        assert result.planner == "tigris"

    def test_chain(self, tree):
        tree.add(state(10, 0), 10.0, 2.0, 100.0, parent=0)
        tree.add(state(20, 0), 20.0, 3.0, 100.0, parent=1)
        result = extract_best(tree)
        assert result.cum_cost == [0.0, 10.0, 20.0]
        assert result.cum_info == [1.0, 2.0, 3.0]
        assert result.node_count == 3
        assert result.internal_info == 3.0

    def test_empty(self):
        with pytest.raises(ValueError):
            extract_best(PlanTree())
