"""Belief grid over the search area: Gaussian-kernel priors, Bayes updates and binary
entropy."""
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Tuple, Union

import numpy as np
from matplotlib.path import Path as MplPath
from scipy.special import entr

# Priors are clamped below 1 so the entropy terms never saturate.
PROB_EPSILON = 1e-6

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class GridSpec:
    width_cells: int
    height_cells: int
    cell_size: float
    origin: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.width_cells < 1 or self.height_cells < 1:
            raise ValueError(
                f"Grid needs at least one cell, got {self.width_cells}x{self.height_cells}."
            )
        if self.cell_size <= 0:
            raise ValueError(f"cell_size must be positive, got {self.cell_size}.")
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))

    @classmethod
    def from_extent(
        cls, width: float, height: float, cell_size: float, origin=(0.0, 0.0)
    ) -> "GridSpec":
        return cls(
            width_cells=int(round(width / cell_size)),
            height_cells=int(round(height / cell_size)),
            cell_size=cell_size,
            origin=origin,
        )

    @property
    def size(self) -> int:
        return self.width_cells * self.height_cells

    @property
    def extent(self) -> Tuple[float, float, float, float]:
        """(xmin, xmax, ymin, ymax) of the mapped area in meters."""
        x0, y0 = self.origin
        return (
            x0,
            x0 + self.width_cells * self.cell_size,
            y0,
            y0 + self.height_cells * self.cell_size,
        )

    def contains(self, x: float, y: float) -> bool:
        xmin, xmax, ymin, ymax = self.extent
        return xmin <= x <= xmax and ymin <= y <= ymax


@dataclass(frozen=True, eq=False)
class BeliefGrid:
    """Row-major probabilities P(X_i) of an object being in each cell. Rows run north
    (y), columns east (x)."""

    spec: GridSpec
    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float).reshape(-1)
        if probs.size != self.spec.size:
            raise ValueError(
                f"Grid of {self.spec.width_cells}x{self.spec.height_cells} cells needs "
                f"{self.spec.size} probabilities, got {probs.size}."
            )
        if np.any(probs < 0) or np.any(probs > 1) or np.any(np.isnan(probs)):
            raise ValueError("Every cell probability must lie in [0, 1].")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def width_cells(self) -> int:
        return self.spec.width_cells

    @property
    def height_cells(self) -> int:
        return self.spec.height_cells

    @property
    def cell_size(self) -> float:
        return self.spec.cell_size

    @property
    def origin(self) -> Tuple[float, float]:
        return self.spec.origin

    @cached_property
    def centers(self) -> np.ndarray:
        """(n, 2) array of cell-center coordinates, indexed like `probs`."""
        x0, y0 = self.origin
        cols = np.arange(self.width_cells)
        rows = np.arange(self.height_cells)
        xs = x0 + (cols + 0.5) * self.cell_size
        ys = y0 + (rows + 0.5) * self.cell_size
        grid_x, grid_y = np.meshgrid(xs, ys)
        centers = np.column_stack([grid_x.ravel(), grid_y.ravel()])
        centers.setflags(write=False)
        return centers

    def cells_in_box(
        self, xmin: float, xmax: float, ymin: float, ymax: float
    ) -> np.ndarray:
        """Indices of cells whose centers fall inside the axis-aligned box."""
        x0, y0 = self.origin
        size = self.cell_size
        col_lo = max(0, int(math.ceil((xmin - x0) / size - 0.5)))
        col_hi = min(self.width_cells - 1, int(math.floor((xmax - x0) / size - 0.5)))
        row_lo = max(0, int(math.ceil((ymin - y0) / size - 0.5)))
        row_hi = min(self.height_cells - 1, int(math.floor((ymax - y0) / size - 0.5)))
        if col_lo > col_hi or row_lo > row_hi:
            return np.empty(0, dtype=np.intp)
        rows = np.arange(row_lo, row_hi + 1)
        cols = np.arange(col_lo, col_hi + 1)
        return (rows[:, None] * self.width_cells + cols[None, :]).ravel()

    def as_image(self, values: np.ndarray = None) -> np.ndarray:
        """Reshape per-cell values (the priors by default) to (rows, cols)."""
        values = self.probs if values is None else np.asarray(values)
        return values.reshape(self.height_cells, self.width_cells)


@dataclass(frozen=True)
class GaussianCentroid:
    center: Tuple[float, float]
    peak_prob: float
    sigma: float

    def __post_init__(self):
        if not 0 < self.peak_prob <= 1:
            raise ValueError(f"peak_prob must be in (0, 1], got {self.peak_prob}.")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}.")
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))


def _segments_intersect(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


@dataclass(frozen=True)
class NoFlyZone:
    polygon: Tuple[Tuple[float, float], ...]
    _path: MplPath = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        polygon = tuple((float(x), float(y)) for x, y in self.polygon)
        if len(polygon) < 3:
            raise ValueError(
                f"A no-fly zone needs at least 3 vertices, got {len(polygon)}."
            )
        edges = [(polygon[i], polygon[(i + 1) % len(polygon)]) for i in range(len(polygon))]
        for i in range(len(edges)):
            for j in range(i + 2, len(edges)):
                if i == 0 and j == len(edges) - 1:
                    continue  # neighbours through the closing edge
                if _segments_intersect(*edges[i], *edges[j]):
                    raise ValueError("No-fly zone polygon must not self-intersect.")
        object.__setattr__(self, "polygon", polygon)
        object.__setattr__(self, "_path", MplPath(np.array(polygon), closed=False))

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of which (n, 2) points lie inside the zone."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return self._path.contains_points(points)


def build_prior(
    spec: GridSpec,
    centroids: Sequence[GaussianCentroid],
    background: float,
) -> BeliefGrid:
    """Background probability plus a Gaussian bump per centroid, clamped below 1."""
    if not 0 <= background < 1:
        raise ValueError(f"background must be in [0, 1), got {background}.")

    grid = BeliefGrid(spec=spec, probs=np.zeros(spec.size))
    centers = grid.centers
    probs = np.full(spec.size, float(background))
    for centroid in centroids:
        squared = np.sum((centers - np.asarray(centroid.center)) ** 2, axis=1)
        probs += centroid.peak_prob * np.exp(-squared / (2.0 * centroid.sigma ** 2))
    np.minimum(probs, 1.0 - PROB_EPSILON, out=probs)
    return BeliefGrid(spec=spec, probs=probs)


def entropy(p: ArrayLike) -> ArrayLike:
    """Binary Shannon entropy in bits; 0·log 0 is 0."""
    p = np.asarray(p, dtype=float)
    bits = (entr(p) + entr(1.0 - p)) / math.log(2.0)
    return float(bits) if bits.ndim == 0 else bits


def bayes_update(
    prior: ArrayLike, tpr: ArrayLike, fpr: ArrayLike, measurement: bool
) -> ArrayLike:
    """Posterior P(X|Z) (measurement true) or P(X|¬Z) (false). A zero denominator
    leaves the prior unchanged."""
    prior = np.asarray(prior, dtype=float)
    tpr = np.asarray(tpr, dtype=float)
    fpr = np.asarray(fpr, dtype=float)
    if measurement:
        hit, false_hit = tpr, fpr
    else:
        hit, false_hit = 1.0 - tpr, 1.0 - fpr
    numerator = hit * prior
    denominator = numerator + false_hit * (1.0 - prior)
    with np.errstate(divide="ignore", invalid="ignore"):
        posterior = np.where(denominator > 0, numerator / denominator, prior)
    posterior = np.clip(posterior, 0.0, 1.0)
    return float(posterior) if posterior.ndim == 0 else posterior
