"""Search tree shared by the planners: nodes, spatial queries over node positions,
dominance pruning and best-path extraction."""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from tigris_ipp.dubins import PathEdge, VehicleState
from tigris_ipp.information import BeliefOverlay

# Nodes whose cost is this close to the budget are closed.
CLOSED_TOLERANCE = 1e-6

Curve = List[Tuple[float, float]]


@dataclass(frozen=True, eq=False)
class TreeNode:
    id: int
    state: VehicleState
    cost: float
    info: float
    parent: Optional[int] = None
    edge: Optional[PathEdge] = field(default=None, repr=False)
    overlay: BeliefOverlay = field(default_factory=BeliefOverlay, repr=False)
    closed: bool = False


@dataclass
class PlanResult:
    """Best path found by a planner. `cum_cost` and `cum_info` hold the running cost
    and reward at each state of the path."""

    planner: str
    states: List[VehicleState]
    edges: List[PathEdge]
    cum_cost: List[float]
    cum_info: List[float]
    info: float
    cost: float
    node_count: int = 1
    iterations: int = 0
    # (iteration or seconds, best reward) at every improvement of the best node.
    curve: Curve = field(default_factory=list)
    curve_unit: str = "iteration"
    # Reward the tree itself assigned to the path (differs when re-evaluated).
    internal_info: Optional[float] = None
    elapsed: float = field(default=0.0, compare=False)

    @property
    def start(self) -> VehicleState:
        return self.states[0]


class SpatialIndex:
    """k-d tree over inserted points plus a small brute-force buffer of recent ones.
    The tree is rebuilt once the buffer grows past a fraction of the indexed set."""

    def __init__(self, min_buffer: int = 32, growth: float = 0.25):
        self.min_buffer = min_buffer
        self.growth = growth
        self._ids = np.empty(0, dtype=np.intp)
        self._points = np.empty((0, 3))
        self._tree: Optional[cKDTree] = None
        self._buffer_ids: List[int] = []
        self._buffer_points: List[np.ndarray] = []

    def __len__(self):
        return self._ids.size + len(self._buffer_ids)

    def insert(self, node_id: int, point: np.ndarray):
        self._buffer_ids.append(node_id)
        self._buffer_points.append(np.asarray(point, dtype=float))
        if len(self._buffer_ids) > max(self.min_buffer, self.growth * self._ids.size):
            self._rebuild()

    def _rebuild(self):
        self._ids = np.concatenate([self._ids, np.asarray(self._buffer_ids, dtype=np.intp)])
        self._points = np.vstack([self._points, np.asarray(self._buffer_points)])
        self._tree = cKDTree(self._points)
        self._buffer_ids, self._buffer_points = [], []

    def nearest(self, point: np.ndarray) -> Optional[int]:
        """Id of the closest point; ties go to the lower id."""
        ids, dists = self._candidates(point, None)
        if ids.size == 0:
            return None
        order = np.lexsort((ids, dists))
        return int(ids[order[0]])

    def within(self, point: np.ndarray, radius: float) -> Tuple[np.ndarray, np.ndarray]:
        """Ids and distances of points within `radius`, closest first (ties by id)."""
        ids, dists = self._candidates(point, radius)
        order = np.lexsort((ids, dists))
        return ids[order], dists[order]

    def _candidates(self, point, radius: Optional[float]):
        point = np.asarray(point, dtype=float)
        ids, dists = [], []
        if self._tree is not None:
            if radius is None:
                _, index = self._tree.query(point)
                indices = np.array([index], dtype=np.intp)
            else:
                indices = np.asarray(
                    self._tree.query_ball_point(point, radius), dtype=np.intp
                )
            if indices.size:
                ids.append(self._ids[indices])
                dists.append(np.linalg.norm(self._points[indices] - point, axis=1))
        if self._buffer_ids:
            buffer = np.asarray(self._buffer_points)
            buffer_dists = np.linalg.norm(buffer - point, axis=1)
            buffer_ids = np.asarray(self._buffer_ids, dtype=np.intp)
            if radius is not None:
                keep = buffer_dists <= radius
                buffer_dists, buffer_ids = buffer_dists[keep], buffer_ids[keep]
            ids.append(buffer_ids)
            dists.append(buffer_dists)
        if not ids:
            return np.empty(0, dtype=np.intp), np.empty(0)
        return np.concatenate(ids), np.concatenate(dists)


class PlanTree:
    """Append-only tree. Open nodes are indexed separately so nearest/near queries
    never see closed nodes; pruning looks at every node."""

    def __init__(self):
        self.nodes: List[TreeNode] = []
        self.open_index = SpatialIndex()
        self.all_index = SpatialIndex()
        self.best_id: Optional[int] = None
        self._costs = np.empty(64)
        self._infos = np.empty(64)

    def __len__(self):
        return len(self.nodes)

    def __getitem__(self, node_id: int) -> TreeNode:
        return self.nodes[node_id]

    @property
    def best(self) -> TreeNode:
        if self.best_id is None:
            raise ValueError("The tree is empty.")
        return self.nodes[self.best_id]

    def add(
        self,
        state: VehicleState,
        cost: float,
        info: float,
        budget: float,
        parent: Optional[int] = None,
        edge: Optional[PathEdge] = None,
        overlay: Optional[BeliefOverlay] = None,
        min_extension: float = 0.0,
    ) -> TreeNode:
        """Insert a node. It joins the open set only when at least `min_extension` of
        the budget is left, so exhausted nodes are never offered for extension."""
        if cost > budget:
            raise ValueError(f"Node cost {cost} exceeds the budget {budget}.")
        node = TreeNode(
            id=len(self.nodes),
            state=state,
            cost=cost,
            info=info,
            parent=parent,
            edge=edge,
            overlay=BeliefOverlay() if overlay is None else overlay,
            closed=budget - cost <= CLOSED_TOLERANCE,
        )
        self.nodes.append(node)
        if node.id >= self._costs.size:
            self._costs = np.resize(self._costs, 2 * self._costs.size)
            self._infos = np.resize(self._infos, 2 * self._infos.size)
        self._costs[node.id] = cost
        self._infos[node.id] = info
        point = state.xyz
        self.all_index.insert(node.id, point)
        if not node.closed and budget - cost >= min_extension:
            self.open_index.insert(node.id, point)
        if self.best_id is None or _better(node, self.best):
            self.best_id = node.id
        return node

    def nearest_open(self, state: VehicleState) -> Optional[TreeNode]:
        node_id = self.open_index.nearest(state.xyz)
        return None if node_id is None else self.nodes[node_id]

    def near_open(
        self, state: VehicleState, radius: float, limit: Optional[int] = None
    ) -> List[TreeNode]:
        ids, _ = self.open_index.within(state.xyz, radius)
        if limit is not None:
            ids = ids[:limit]
        return [self.nodes[i] for i in ids]

    def dominated(self, state: VehicleState, cost: float, info: float, radius: float) -> bool:
        ids, _ = self.all_index.within(state.xyz, radius)
        if ids.size == 0:
            return False
        costs = self._costs[ids]
        infos = self._infos[ids]
        no_worse = (costs <= cost) & (infos >= info)
        strictly = (costs < cost) | (infos > info)
        return bool(np.any(no_worse & strictly))

    def path_to(self, node_id: int) -> List[TreeNode]:
        chain = []
        node: Optional[TreeNode] = self.nodes[node_id]
        while node is not None:
            chain.append(node)
            node = None if node.parent is None else self.nodes[node.parent]
        return chain[::-1]


def _better(candidate: TreeNode, incumbent: TreeNode) -> bool:
    """Higher info wins, then lower cost, then lower id."""
    if candidate.info != incumbent.info:
        return candidate.info > incumbent.info
    if candidate.cost != incumbent.cost:
        return candidate.cost < incumbent.cost
    return candidate.id < incumbent.id


def prune(candidate: TreeNode, tree: PlanTree, radius: float) -> bool:
    """True if a node within `radius` is at least as cheap and as informative as the
    candidate, and strictly better in one of the two. Heading is ignored."""
    return tree.dominated(candidate.state, candidate.cost, candidate.info, radius)


def extract_best(tree: PlanTree, planner: str = "") -> PlanResult:
    if not tree.nodes:
        raise ValueError("Cannot extract a path from an empty tree.")
    chain = tree.path_to(tree.best.id)
    return PlanResult(
        planner=planner,
        states=[node.state for node in chain],
        edges=[node.edge for node in chain[1:]],
        cum_cost=[node.cost for node in chain],
        cum_info=[node.info for node in chain],
        info=chain[-1].info,
        cost=chain[-1].cost,
        node_count=len(tree),
        internal_info=chain[-1].info,
    )
