"""Geometry checked against shapely as an independent oracle."""

import math

import numpy as np
import pytest
from shapely.geometry import Point as ShapelyPoint
from shapely.geometry import Polygon

from stylebench.geometry import (
    point_in_polygon,
    point_on_segment,
    rectangle_corners,
    rectangles_overlap,
)


def shapely_rect(cx, cy, yaw, hl, hw):
    return Polygon(rectangle_corners(cx, cy, yaw, hl, hw))


def test_rectangle_corners_shape_and_order():
    corners = rectangle_corners(0.0, 0.0, 0.0, 2.0, 1.0)
    assert len(corners) == 4
    assert Polygon(corners).area == pytest.approx(8.0)
    # CCW: shoelace sum positive
    area2 = sum(
        corners[i][0] * corners[(i + 1) % 4][1] - corners[(i + 1) % 4][0] * corners[i][1]
        for i in range(4)
    )
    assert area2 > 0


def test_rectangle_corners_rotation():
    corners = rectangle_corners(1.0, 2.0, math.pi / 2, 2.0, 0.5)
    xs = sorted(c[0] for c in corners)
    ys = sorted(c[1] for c in corners)
    assert xs[0] == pytest.approx(0.5) and xs[-1] == pytest.approx(1.5)
    assert ys[0] == pytest.approx(0.0) and ys[-1] == pytest.approx(4.0)


def test_overlap_hand_cases():
    a = rectangle_corners(0, 0, 0, 2, 1)
    assert rectangles_overlap(a, rectangle_corners(0, 0, 0.3, 2, 1))
    assert not rectangles_overlap(a, rectangle_corners(10, 0, 0, 2, 1))
    # exact edge contact counts as overlap
    assert rectangles_overlap(a, rectangle_corners(4.0, 0, 0, 2, 1))
    # corner touch counts too
    assert rectangles_overlap(a, rectangle_corners(4.0, 2.0, 0, 2, 1))
    # separated by a hair does not
    assert not rectangles_overlap(a, rectangle_corners(4.01, 0, 0, 2, 1))


def test_overlap_matches_shapely_on_random_pairs():
    rng = np.random.default_rng(7)
    disagreements = 0
    for _ in range(2000):
        ax, ay, at = rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0, 2 * math.pi)
        bx, by, bt = rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0, 2 * math.pi)
        ahl, ahw = rng.uniform(0.2, 3), rng.uniform(0.2, 3)
        bhl, bhw = rng.uniform(0.2, 3), rng.uniform(0.2, 3)
        ra = rectangle_corners(ax, ay, at, ahl, ahw)
        rb = rectangle_corners(bx, by, bt, bhl, bhw)
        ours = rectangles_overlap(ra, rb)
        oracle = Polygon(ra).intersects(Polygon(rb))
        if ours != oracle:
            disagreements += 1
    assert disagreements == 0


def test_point_on_segment():
    assert point_on_segment(1.0, 1.0, 0, 0, 2, 2)
    assert point_on_segment(0.0, 0.0, 0, 0, 2, 2)
    assert not point_on_segment(1.0, 1.1, 0, 0, 2, 2)
    assert not point_on_segment(3.0, 3.0, 0, 0, 2, 2)
    # zero-length segment degenerates to a point check
    assert point_on_segment(1.0, 1.0, 1, 1, 1, 1)


def test_point_in_polygon_hand_cases():
    square = [(0, 0), (4, 0), (4, 4), (0, 4)]
    assert point_in_polygon(2, 2, square)
    assert not point_in_polygon(5, 2, square)
    # boundary and vertices count as inside
    assert point_in_polygon(0, 0, square)
    assert point_in_polygon(2, 0, square)
    assert point_in_polygon(4, 4, square)


def test_point_in_polygon_concave():
    # L-shape: the notch is outside
    ell = [(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)]
    assert point_in_polygon(1, 3, ell)
    assert point_in_polygon(3, 1, ell)
    assert not point_in_polygon(3, 3, ell)


def test_point_in_polygon_rejects_degenerate():
    with pytest.raises(ValueError):
        point_in_polygon(0, 0, [(0, 0), (1, 1)])


def test_point_in_polygon_matches_shapely_on_random_convex():
    rng = np.random.default_rng(11)
    disagreements = 0
    for _ in range(300):
        # star-shaped polygon: angularly sorted points around their centroid
        pts = rng.uniform(-5, 5, size=(rng.integers(3, 9), 2))
        cx, cy = pts.mean(axis=0)
        order = np.argsort(np.arctan2(pts[:, 1] - cy, pts[:, 0] - cx))
        poly = [tuple(p) for p in pts[order]]
        shp = Polygon(poly)
        if not shp.is_valid:
            continue
        for _ in range(20):
            x, y = rng.uniform(-6, 6, size=2)
            if point_in_polygon(x, y, poly) != shp.covers(ShapelyPoint(x, y)):
                disagreements += 1
    assert disagreements == 0
