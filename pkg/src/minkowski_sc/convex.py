"""Planar convex hulls and the quantities measured on them.

Mean width W(K) is the average projection length of K over all directions;
for a planar convex set it equals perimeter / π.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from minkowski_sc.constants import (
    HULL_TOLERANCE,
    MEAN_WIDTH_MIN_QUADRATURE,
    MEAN_WIDTH_QUADRATURE,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Counterclockwise hull vertices with no three collinear."""

    vertices: np.ndarray

    def __len__(self):
        return len(self.vertices)

    @property
    def degenerate(self):
        """``"point"``, ``"segment"`` or None for a proper polygon."""
        return {1: "point", 2: "segment"}.get(len(self.vertices))


def _turn(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points, tol=HULL_TOLERANCE):
    """Convex hull by Andrew's monotone chain.

    Points are sorted lexicographically; turns within ``tol`` (relative to
    the squared extent of the set) count as collinear and are dropped.

    Raises:
        ValueError: If no points are given.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(points) == 0:
        raise ValueError("Convex hull needs at least one point")

    unique = np.unique(points, axis=0)
    if len(unique) == 1:
        return ConvexPolygon(unique)

    extent = float(np.max(unique.max(axis=0) - unique.min(axis=0)))
    threshold = tol * extent * extent

    def chain(ordered):
        hull = []
        for p in ordered:
            while len(hull) >= 2 and _turn(hull[-2], hull[-1], p) <= threshold:
                hull.pop()
            hull.append(p)
        return hull

    lower = chain(unique)
    upper = chain(unique[::-1])
    vertices = np.array(lower[:-1] + upper[:-1])
    logger.debug(f"Hull of {len(points)} points has {len(vertices)} vertices")
    return ConvexPolygon(vertices)


def diameter(polygon):
    """Largest Euclidean distance between two hull vertices."""
    vertices = polygon.vertices
    if len(vertices) < 2:
        return 0.0
    diffs = vertices[:, None, :] - vertices[None, :, :]
    return float(np.max(np.hypot(diffs[..., 0], diffs[..., 1])))


def perimeter(polygon):
    """Length of the boundary; a segment hull counts both sides."""
    vertices = polygon.vertices
    if len(vertices) < 2:
        return 0.0
    edges = np.roll(vertices, -1, axis=0) - vertices
    return float(np.hypot(edges[:, 0], edges[:, 1]).sum())


def mean_width(polygon, quadrature_n=MEAN_WIDTH_QUADRATURE):
    """Average projection width by trapezoidal quadrature over the circle."""
    if quadrature_n < MEAN_WIDTH_MIN_QUADRATURE:
        raise ValueError(
            f"quadrature_n must be ≥ {MEAN_WIDTH_MIN_QUADRATURE}, got {quadrature_n}"
        )
    if polygon.degenerate == "point":
        return 0.0
    if polygon.degenerate == "segment":
        return exact_mean_width(polygon)

    angles = np.linspace(0.0, 2.0 * math.pi, quadrature_n, endpoint=False)
    directions = np.column_stack((np.cos(angles), np.sin(angles)))
    support = polygon.vertices @ directions.T
    widths = support.max(axis=0) - support.min(axis=0)
    return float(widths.mean())


def exact_mean_width(polygon):
    """Mean width through W = perimeter / π."""
    return perimeter(polygon) / math.pi
