"""Dubins connections for a constant-curvature fixed-wing vehicle.

Edges are planar Dubins paths; altitude is interpolated linearly along the planar arc
length and does not add to the cost.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from tigris_ipp.utils import TWO_PI, wrap_angle

# Lengths below this are treated as zero when building segments.
_ZERO_LENGTH = 1e-10


@dataclass(frozen=True)
class VehicleState:
    """Pose of the sensor platform: position in meters (east, north, altitude) and
    heading psi in radians, normalized to [0, 2π)."""

    x: float
    y: float
    z: float
    psi: float

    def __post_init__(self):
        if self.z < 0:
            raise ValueError(f"Altitude must be non-negative, got z={self.z}.")
        object.__setattr__(self, "psi", wrap_angle(float(self.psi)))

    @property
    def xyz(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def planar_distance(self, other: "VehicleState") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.x, self.y, self.z, self.psi)


class SegmentKind(Enum):
    LEFT = "L"
    RIGHT = "R"
    STRAIGHT = "S"


Segment = Tuple[SegmentKind, float]


@dataclass(frozen=True)
class PathEdge:
    start: VehicleState
    end: VehicleState
    segments: Tuple[Segment, ...]
    turn_radius: float
    total_length: float
    word: str = ""
    _offsets: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lengths = [length for _, length in self.segments]
        object.__setattr__(self, "_offsets", np.cumsum([0.0] + lengths))

    @property
    def is_zero_length(self) -> bool:
        return self.total_length <= 0.0

    def pose_at(self, s: float) -> VehicleState:
        return pose_at(self, s)

    def sample(self, max_spacing: float) -> Tuple[np.ndarray, np.ndarray]:
        """Arc-length stations at most `max_spacing` apart (endpoints included) and
        the poses there as an (n, 4) array of x, y, z, psi."""
        if self.is_zero_length:
            stations = np.zeros(1)
        else:
            count = max(1, int(math.ceil(self.total_length / max_spacing)))
            stations = np.linspace(0.0, self.total_length, count + 1)
        return stations, poses_at(self, stations)


def _mod2pi(theta: float) -> float:
    value = theta % TWO_PI
    # Snap rounding noise around a full turn back to zero.
    if TWO_PI - value < 1e-9:
        return 0.0
    return value


def _trig(alpha: float, beta: float):
    return (
        math.sin(alpha),
        math.sin(beta),
        math.cos(alpha),
        math.cos(beta),
        math.cos(alpha - beta),
    )


Word = Optional[Tuple[float, float, float]]


def _lsl(alpha: float, beta: float, d: float) -> Word:
    sa, sb, ca, cb, cab = _trig(alpha, beta)
    p_squared = 2 + d * d - 2 * cab + 2 * d * (sa - sb)
    if p_squared < 0:
        return None
    tmp = math.atan2(cb - ca, d + sa - sb)
    return _mod2pi(-alpha + tmp), math.sqrt(p_squared), _mod2pi(beta - tmp)


def _rsr(alpha: float, beta: float, d: float) -> Word:
    sa, sb, ca, cb, cab = _trig(alpha, beta)
    p_squared = 2 + d * d - 2 * cab + 2 * d * (sb - sa)
    if p_squared < 0:
        return None
    tmp = math.atan2(ca - cb, d - sa + sb)
    return _mod2pi(alpha - tmp), math.sqrt(p_squared), _mod2pi(-beta + tmp)


def _lsr(alpha: float, beta: float, d: float) -> Word:
    sa, sb, ca, cb, cab = _trig(alpha, beta)
    p_squared = -2 + d * d + 2 * cab + 2 * d * (sa + sb)
    if p_squared < 0:
        return None
    p = math.sqrt(p_squared)
    tmp = math.atan2(-ca - cb, d + sa + sb) - math.atan2(-2.0, p)
    return _mod2pi(-alpha + tmp), p, _mod2pi(-_mod2pi(beta) + tmp)


def _rsl(alpha: float, beta: float, d: float) -> Word:
    sa, sb, ca, cb, cab = _trig(alpha, beta)
    p_squared = d * d - 2 + 2 * cab - 2 * d * (sa + sb)
    if p_squared < 0:
        return None
    p = math.sqrt(p_squared)
    tmp = math.atan2(ca + cb, d - sa - sb) - math.atan2(2.0, p)
    return _mod2pi(alpha - tmp), p, _mod2pi(beta - tmp)


def _rlr(alpha: float, beta: float, d: float) -> Word:
    sa, sb, ca, cb, cab = _trig(alpha, beta)
    tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sa - sb)) / 8.0
    if abs(tmp) > 1.0:
        return None
    p = _mod2pi(TWO_PI - math.acos(tmp))
    t = _mod2pi(alpha - math.atan2(ca - cb, d - sa + sb) + p / 2.0)
    return t, p, _mod2pi(alpha - beta - t + p)


def _lrl(alpha: float, beta: float, d: float) -> Word:
    sa, sb, ca, cb, cab = _trig(alpha, beta)
    tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (-sa + sb)) / 8.0
    if abs(tmp) > 1.0:
        return None
    p = _mod2pi(TWO_PI - math.acos(tmp))
    t = _mod2pi(-alpha - math.atan2(ca - cb, d + sa - sb) + p / 2.0)
    return t, p, _mod2pi(_mod2pi(beta) - alpha - t + p)


# Evaluation order doubles as the tie-break order.
WORDS: Dict[str, Callable[[float, float, float], Word]] = {
    "LSL": _lsl,
    "RSR": _rsr,
    "LSR": _lsr,
    "RSL": _rsl,
    "RLR": _rlr,
    "LRL": _lrl,
}


def _zero_edge(state: VehicleState, turn_radius: float) -> PathEdge:
    return PathEdge(
        start=state,
        end=state,
        segments=(),
        turn_radius=turn_radius,
        total_length=0.0,
    )


def connect(
    start: VehicleState, goal: VehicleState, turn_radius: float
) -> PathEdge:
    """Shortest planar Dubins path from `start` to `goal` among the six words."""
    if turn_radius <= 0:
        raise ValueError(f"turn_radius must be positive, got {turn_radius}.")

    dx, dy = goal.x - start.x, goal.y - start.y
    planar = math.hypot(dx, dy)
    heading_gap = abs(math.remainder(goal.psi - start.psi, TWO_PI))
    if planar < _ZERO_LENGTH and heading_gap < _ZERO_LENGTH:
        return PathEdge(
            start=start,
            end=goal,
            segments=(),
            turn_radius=turn_radius,
            total_length=0.0,
        )

    d = planar / turn_radius
    theta = math.atan2(dy, dx) if planar > 0 else 0.0
    alpha = _mod2pi(start.psi - theta)
    beta = _mod2pi(goal.psi - theta)

    best_word, best_params, best_cost = None, None, math.inf
    for name, planner in WORDS.items():
        params = planner(alpha, beta, d)
        if params is None:
            continue
        cost = sum(params)
        # Strict comparison keeps the first word on ties.
        if cost < best_cost:
            best_word, best_params, best_cost = name, params, cost

    if best_word is None:
        raise ArithmeticError(
            f"No Dubins word connects {start} to {goal} with radius {turn_radius}."
        )

    segments = []
    for letter, normalized in zip(best_word, best_params):
        length = normalized * turn_radius
        if length > _ZERO_LENGTH:
            segments.append((SegmentKind(letter), length))

    return PathEdge(
        start=start,
        end=goal,
        segments=tuple(segments),
        turn_radius=turn_radius,
        total_length=sum(length for _, length in segments),
        word=best_word,
    )


def _advance(x, y, psi, kind: SegmentKind, length, radius):
    """Move along a single segment by `length` (scalar or array)."""
    if kind is SegmentKind.STRAIGHT:
        return x + length * np.cos(psi), y + length * np.sin(psi), psi + 0 * length

    sign = 1.0 if kind is SegmentKind.LEFT else -1.0
    turn = sign * length / radius
    # Center of the turning circle sits perpendicular to the heading.
    cx = x - sign * radius * math.sin(psi)
    cy = y + sign * radius * math.cos(psi)
    new_psi = psi + turn
    return (
        cx + sign * radius * np.sin(new_psi),
        cy - sign * radius * np.cos(new_psi),
        new_psi,
    )


def poses_at(edge: PathEdge, stations: np.ndarray) -> np.ndarray:
    """Vectorized pose_at for an array of arc lengths; returns an (n, 4) array."""
    stations = np.asarray(stations, dtype=float)
    out = np.empty((stations.size, 4))
    out[:, 0] = edge.start.x
    out[:, 1] = edge.start.y
    out[:, 3] = edge.start.psi

    x, y, psi = edge.start.x, edge.start.y, edge.start.psi
    offsets = edge._offsets
    for index, (kind, length) in enumerate(edge.segments):
        lo = offsets[index]
        mask = stations > lo
        if np.any(mask):
            local = np.minimum(stations[mask] - lo, length)
            px, py, ppsi = _advance(x, y, psi, kind, local, edge.turn_radius)
            out[mask, 0] = px
            out[mask, 1] = py
            out[mask, 3] = ppsi
        x, y, psi = _advance(x, y, psi, kind, length, edge.turn_radius)
        x, y, psi = float(x), float(y), float(psi)

    if edge.total_length > 0:
        fraction = np.clip(stations / edge.total_length, 0.0, 1.0)
    else:
        fraction = np.zeros_like(stations)
    out[:, 2] = edge.start.z + (edge.end.z - edge.start.z) * fraction
    out[:, 3] = np.mod(out[:, 3], TWO_PI)
    return out


def _check_station(edge: PathEdge, s: float):
    # Allow for rounding in callers that compute s from lengths.
    if s < 0 or s > edge.total_length * (1 + 1e-12) + 1e-12:
        raise ValueError(
            f"Arc length {s} is outside the edge range [0, {edge.total_length}]."
        )


def pose_at(edge: PathEdge, s: float) -> VehicleState:
    """Pose on the edge at arc length s, heading tangent to the path."""
    _check_station(edge, s)
    if s == 0:
        return edge.start
    if s >= edge.total_length:
        return edge.end
    x, y, z, psi = poses_at(edge, np.array([s]))[0]
    return VehicleState(float(x), float(y), float(z), float(psi))


def truncate(edge: PathEdge, s: float) -> PathEdge:
    """Prefix of the edge with total length exactly s."""
    _check_station(edge, s)
    s = min(s, edge.total_length)
    if s >= edge.total_length:
        return edge
    if s == 0:
        return _zero_edge(edge.start, edge.turn_radius)

    segments = []
    remaining = s
    for kind, length in edge.segments:
        if remaining <= 0:
            break
        piece = min(length, remaining)
        segments.append((kind, piece))
        remaining -= piece

    return PathEdge(
        start=edge.start,
        end=pose_at(edge, s),
        segments=tuple(segments),
        turn_radius=edge.turn_radius,
        total_length=s,
        word=edge.word,
    )
