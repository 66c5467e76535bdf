"""Forward-facing camera model: range-dependent detection rate, ground footprint of
the view frustum, and the minimum slant range to a cell passed along a straight edge.

Angles are radians; the pitch is measured from nadir, so a pitch of 0 looks straight
down.
"""
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple, Union

import numpy as np

from tigris_ipp.belief import BeliefGrid
from tigris_ipp.dubins import VehicleState

log = logging.getLogger("tigris.sensor")

EDGE_RANGE_MODELS = ("closed_form", "footprint")

ArrayLike = Union[float, np.ndarray]
Box = Tuple[float, float, float, float]


@dataclass(frozen=True)
class SensorConfig:
    pitch_theta: float = math.radians(65.0)
    vfov: float = math.radians(40.0)
    hfov: float = math.radians(60.0)
    a: float = 1.0
    b: float = 0.05
    c: float = 250.0
    beta: float = 250.0
    v_opt: float = 0.5
    # How edge_reward places the side-edge term of the minimum range.
    edge_range_model: str = "footprint"

    def __post_init__(self):
        if not 0 <= self.pitch_theta < math.pi / 2:
            raise ValueError(f"pitch_theta must be in [0, π/2), got {self.pitch_theta}.")
        if not 0 < self.vfov < math.pi:
            raise ValueError(f"vfov must be in (0, π), got {self.vfov}.")
        if not 0 < self.hfov < math.pi:
            raise ValueError(f"hfov must be in (0, π), got {self.hfov}.")
        if self.pitch_theta + self.vfov / 2 >= math.pi / 2:
            raise ValueError(
                "pitch_theta + vfov/2 must stay below π/2 so the top of the frame "
                "hits the ground."
            )
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}.")
        if self.a < 1:
            raise ValueError(f"a must be at least 1 so that f(r) <= 1, got {self.a}.")
        if not 0 <= self.v_opt <= 1:
            raise ValueError(f"v_opt must be in [0, 1], got {self.v_opt}.")
        if self.edge_range_model not in EDGE_RANGE_MODELS:
            raise ValueError(
                f"edge_range_model must be one of {EDGE_RANGE_MODELS}, "
                f"got {self.edge_range_model!r}."
            )

        jump = abs(detection_rate(self.beta, self) - 0.5)
        if jump > 0.02:
            log.warning(
                f"Detection rate jumps by {jump:.3f} at the cutoff range "
                f"beta={self.beta} m; f(beta) should be close to 0.5."
            )

    @property
    def half_vfov(self) -> float:
        return self.vfov / 2.0

    @property
    def half_hfov(self) -> float:
        return self.hfov / 2.0

    @property
    def looks_ahead(self) -> bool:
        """True when the whole frame is ahead of the vehicle (θ > Θ_v/2)."""
        return self.pitch_theta > self.half_vfov


def detection_rate(r: ArrayLike, cfg: SensorConfig) -> ArrayLike:
    """True positive rate f(r); the false positive rate is 1 - f(r). Beyond beta the
    sensor is uninformative (0.5)."""
    r = np.asarray(r, dtype=float)
    with np.errstate(over="ignore"):
        fitted = 1.0 / (cfg.a + np.exp(cfg.b * (r - cfg.c)))
    rate = np.where(r <= cfg.beta, fitted, 0.5)
    return float(rate) if rate.ndim == 0 else rate


class FrustumGeometry(NamedTuple):
    """Ground trapezoid of a level camera in the vehicle frame (x ahead, y left)."""

    near: float
    near_half_width: float
    far: float
    far_half_width: float


def frustum_geometry(cfg: SensorConfig, z: float) -> FrustumGeometry:
    near_angle = cfg.pitch_theta - cfg.half_vfov
    far_angle = cfg.pitch_theta + cfg.half_vfov
    spread = math.tan(cfg.half_hfov)
    return FrustumGeometry(
        near=z * math.tan(near_angle),
        near_half_width=z * spread / math.cos(near_angle),
        far=z * math.tan(far_angle),
        far_half_width=z * spread / math.cos(far_angle),
    )


class FootprintPolygon:
    """Convex ground quadrilateral, corners counter-clockwise."""

    __slots__ = ("corners",)

    def __init__(self, corners: np.ndarray):
        self.corners = np.asarray(corners, dtype=float).reshape(4, 2)

    def __repr__(self):
        return f"FootprintPolygon({self.corners.tolist()})"

    @property
    def bounds(self):
        lo = self.corners.min(axis=0)
        hi = self.corners.max(axis=0)
        return lo[0], hi[0], lo[1], hi[1]

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of (n, 2) points inside or on the boundary."""
        return points_in_quads(self.corners[None], points)[0]


def points_in_quads(corners: np.ndarray, points: np.ndarray) -> np.ndarray:
    """(n_quads, n_points) mask of points inside or on the boundary of each convex,
    counter-clockwise quadrilateral in the (n_quads, 4, 2) array `corners`."""
    corners = np.asarray(corners, dtype=float).reshape(-1, 4, 2)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    scale = np.maximum(1.0, np.abs(corners).max(axis=(1, 2)))
    slack = (-1e-9 * scale * scale)[:, None]
    px, py = points[None, :, 0], points[None, :, 1]
    inside = np.ones((corners.shape[0], points.shape[0]), dtype=bool)
    for i in range(4):
        a = corners[:, i, None, :]
        b = corners[:, (i + 1) % 4, None, :]
        cross = (b[..., 0] - a[..., 0]) * (py - a[..., 1]) - (b[..., 1] - a[..., 1]) * (
            px - a[..., 0]
        )
        inside &= cross >= slack
    return inside


def footprint_corners(poses: np.ndarray, cfg: SensorConfig) -> np.ndarray:
    """(n, 4, 2) ground corners for (n, 4) poses of (x, y, z, psi). The trapezoid
    scales linearly with altitude."""
    poses = np.atleast_2d(np.asarray(poses, dtype=float))
    unit = frustum_geometry(cfg, 1.0)
    local = np.array(
        [
            [unit.near, -unit.near_half_width],
            [unit.far, -unit.far_half_width],
            [unit.far, unit.far_half_width],
            [unit.near, unit.near_half_width],
        ]
    )
    scaled = local[None] * poses[:, 2, None, None]
    cos_psi = np.cos(poses[:, 3])[:, None]
    sin_psi = np.sin(poses[:, 3])[:, None]
    xs = scaled[..., 0] * cos_psi - scaled[..., 1] * sin_psi + poses[:, 0, None]
    ys = scaled[..., 0] * sin_psi + scaled[..., 1] * cos_psi + poses[:, 1, None]
    return np.stack([xs, ys], axis=-1)


def footprints_contain(poses: np.ndarray, points: np.ndarray, cfg: SensorConfig) -> np.ndarray:
    """(n_poses, n_points) mask of which points each pose sees. Poses at or below the
    ground see nothing."""
    poses = np.atleast_2d(np.asarray(poses, dtype=float))
    mask = points_in_quads(footprint_corners(poses, cfg), points)
    mask[poses[:, 2] <= 0] = False
    return mask


def footprint(state: VehicleState, cfg: SensorConfig) -> FootprintPolygon:
    """Project the four frustum corner rays onto the ground plane."""
    if state.z <= 0:
        raise ValueError(f"The footprint needs a positive altitude, got z={state.z}.")
    pose = np.array([[state.x, state.y, state.z, state.psi]])
    return FootprintPolygon(footprint_corners(pose, cfg)[0])


def cells_in_footprint(
    poly: FootprintPolygon, grid: BeliefGrid, clip: Optional[Box] = None
) -> np.ndarray:
    """Indices of every cell whose center lies in the polygon, clipped to the grid
    and, if given, to the (xmin, xmax, ymin, ymax) box `clip`."""
    xmin, xmax, ymin, ymax = poly.bounds
    if clip is not None:
        xmin, xmax = max(xmin, clip[0]), min(xmax, clip[1])
        ymin, ymax = max(ymin, clip[2]), min(ymax, clip[3])
    candidates = grid.cells_in_box(xmin, xmax, ymin, ymax)
    if candidates.size == 0:
        return candidates
    return candidates[poly.contains(grid.centers[candidates])]


def transition_distance(cfg: SensorConfig, z: float) -> float:
    """Lateral distance L at which the closest view of a cell moves from the bottom
    of the frame to its side."""
    if z <= 0:
        raise ValueError(f"Altitude must be positive, got z={z}.")
    if cfg.looks_ahead:
        return z / math.cos(cfg.pitch_theta - cfg.half_vfov) * math.tan(cfg.half_hfov)
    return z * math.tan(cfg.half_hfov)


def visible_offset(
    d: ArrayLike, cfg: SensorConfig, z: float, model: str = "footprint"
) -> ArrayLike:
    """How far behind a cell (along the edge) the vehicle is when the cell is seen
    closest, for a cell at perpendicular distance d. Infinite if never seen."""
    if model not in EDGE_RANGE_MODELS:
        raise ValueError(f"Unknown edge range model {model!r}.")
    d = np.abs(np.asarray(d, dtype=float))
    geometry = frustum_geometry(cfg, z)
    tan_pitch = math.tan(cfg.pitch_theta)

    with np.errstate(divide="ignore", invalid="ignore"):
        if model == "closed_form":
            transition = transition_distance(cfg, z)
            base = geometry.near if cfg.looks_ahead else 0.0
            side = (d - transition) / tan_pitch if tan_pitch > 0 else np.inf
            # A cell inside the far half width is seen by the far edge at the latest.
            offset = np.minimum(np.where(d < transition, base, base + side), geometry.far)
        else:
            spread = geometry.far_half_width - geometry.near_half_width
            slope = (geometry.far - geometry.near) / spread if spread > 0 else np.inf
            excess = np.maximum(d - geometry.near_half_width, 0.0)
            side = np.where(excess > 0, excess * slope, 0.0)
            offset = np.maximum(geometry.near + side, 0.0)

    hidden = (d > geometry.far_half_width) | (offset > geometry.far)
    offset = np.where(hidden | np.isnan(offset), np.inf, offset)
    return float(offset) if offset.ndim == 0 else offset


def min_range_to_edge(
    d: ArrayLike, cfg: SensorConfig, z: float, model: str = "footprint"
) -> ArrayLike:
    """Minimum slant range to a cell at perpendicular distance d from a straight edge
    flown at altitude z."""
    d = np.abs(np.asarray(d, dtype=float))
    offset = np.asarray(visible_offset(d, cfg, z, model))
    with np.errstate(invalid="ignore"):
        rng = np.sqrt(d * d + offset * offset + z * z)
    rng = np.where(np.isfinite(offset), rng, np.inf)
    return float(rng) if rng.ndim == 0 else rng
