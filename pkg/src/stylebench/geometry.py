"""2D geometry primitives for the safety gates.

Oriented-rectangle overlap uses the separating-axis test with the
convention that touching counts as overlap (conservative on safety).
Point-in-polygon uses an even-odd crossing test with boundary points
counted as inside (lenient on compliance).
"""

from __future__ import annotations

import math
from typing import Sequence

Point = tuple[float, float]

# Slack for on-edge detection in point_in_polygon.
_EDGE_EPS = 1e-9


def rectangle_corners(
    cx: float, cy: float, yaw: float, half_length: float, half_width: float
) -> list[Point]:
    """Corners of an oriented rectangle, counter-clockwise."""
    cos_y = math.cos(yaw)
    sin_y = math.sin(yaw)
    corners = []
    for sx, sy in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
        dx = sx * half_length
        dy = sy * half_width
        corners.append((cx + dx * cos_y - dy * sin_y, cy + dx * sin_y + dy * cos_y))
    return corners


def _project(corners: Sequence[Point], axis: Point) -> tuple[float, float]:
    dots = [c[0] * axis[0] + c[1] * axis[1] for c in corners]
    return min(dots), max(dots)


def rectangles_overlap(a: Sequence[Point], b: Sequence[Point]) -> bool:
    """Separating-axis test for two convex quadrilaterals.

    Returns True when the rectangles intersect or touch: a projection gap
    of exactly zero is not treated as separating.
    """
    for corners in (a, b):
        for i in range(len(corners)):
            x1, y1 = corners[i]
            x2, y2 = corners[(i + 1) % len(corners)]
            axis = (y1 - y2, x2 - x1)
            norm = math.hypot(*axis)
            if norm == 0:
                continue
            axis = (axis[0] / norm, axis[1] / norm)
            a_lo, a_hi = _project(a, axis)
            b_lo, b_hi = _project(b, axis)
            if a_hi < b_lo or b_hi < a_lo:
                return False
    return True


def point_on_segment(px: float, py: float, x1: float, y1: float, x2: float, y2: float) -> bool:
    cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
    seg_len = math.hypot(x2 - x1, y2 - y1)
    if seg_len == 0:
        return math.hypot(px - x1, py - y1) <= _EDGE_EPS
    if abs(cross) / seg_len > _EDGE_EPS:
        return False
    dot = (px - x1) * (x2 - x1) + (py - y1) * (y2 - y1)
    return -_EDGE_EPS <= dot <= seg_len * seg_len + _EDGE_EPS


def point_in_polygon(px: float, py: float, polygon: Sequence[Point]) -> bool:
    """Even-odd point-in-polygon test, boundary-inclusive.

    Raises ValueError for degenerate polygons with fewer than 3 vertices.
    """
    n = len(polygon)
    if n < 3:
        raise ValueError(f"polygon needs at least 3 vertices, got {n}")

    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if point_on_segment(px, py, x1, y1, x2, y2):
            return True

    inside = False
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < x_cross:
                inside = not inside
    return inside
