"""Geometry primitives against hand-derived values and an independent
point-in-polygon oracle."""

import numpy as np

from cutpaste.geometry import (
    Box,
    polygon_area,
    polygon_bbox,
    polygon_is_simple,
    rasterize_box,
    rasterize_polygon,
    transform_polygon,
)


# independent oracle: even-odd crossing parity at one sample point
def point_in_polygon(px, py, verts):
    inside = False
    n = len(verts)
    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        if (y1 <= py < y2) or (y2 <= py < y1):
            xc = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < xc:
                inside = not inside
    return inside


def oracle_raster(verts, width, height):
    out = np.zeros((height, width), dtype=bool)
    for r in range(height):
        for c in range(width):
            out[r, c] = point_in_polygon(c + 0.5, r + 0.5, verts)
    return out


class TestBox:
    def test_area_and_corners(self):
        b = Box(2, 3, 4, 5)
        assert b.area() == 20
        assert (b.x2(), b.y2()) == (6, 8)

    def test_intersection_area_hand_value(self):
        # overlap spans x in [2, 4), y in [1, 4): 2 * 3 = 6
        assert Box(0, 0, 4, 4).intersection_area(Box(2, 1, 4, 4)) == 6
        assert Box(0, 0, 2, 2).intersection_area(Box(2, 0, 2, 2)) == 0

    def test_overlaps_excludes_edge_contact(self):
        assert not Box(0, 0, 2, 2).overlaps(Box(2, 0, 2, 2))
        assert Box(0, 0, 3, 3).overlaps(Box(2, 2, 3, 3))

    def test_contains_box(self):
        outer = Box(0, 0, 10, 10)
        assert outer.contains_box(Box(0, 0, 10, 10))
        assert outer.contains_box(Box(3, 4, 2, 2))
        assert not outer.contains_box(Box(8, 8, 3, 3))

    def test_clip(self):
        assert Box(-5, -5, 20, 20).clip(10, 8) == Box(0, 0, 10, 8)
        assert Box(12, 3, 4, 4).clip(10, 8).area() == 0


class TestPolygonBasics:
    def test_shoelace_rectangle(self):
        assert polygon_area([(0, 0), (4, 0), (4, 3), (0, 3)]) == 12.0

    def test_shoelace_triangle_orientation_independent(self):
        tri = [(0, 0), (5, 0), (0, 4)]
        assert polygon_area(tri) == 10.0
        assert polygon_area(tri[::-1]) == 10.0

    def test_bbox(self):
        assert polygon_bbox([(2, 5), (9, 1), (4, 7)]) == Box(2, 1, 7, 6)

    def test_transform_exact(self):
        out = transform_polygon([(1, 2), (3, 4)], scale=(2, 3), offset=(10, 20))
        assert out == [(12.0, 26.0), (16.0, 32.0)]

    def test_transform_identity(self):
        poly = [(1.5, 2.5), (3.0, 4.0)]
        assert transform_polygon(poly) == poly


class TestSimplicity:
    def test_square_is_simple(self):
        assert polygon_is_simple([(0, 0), (4, 0), (4, 4), (0, 4)])

    def test_bowtie_is_not(self):
        assert not polygon_is_simple([(0, 0), (4, 4), (4, 0), (0, 4)])

    def test_too_few_vertices(self):
        assert not polygon_is_simple([(0, 0), (4, 4)])

    def test_duplicate_neighbour(self):
        assert not polygon_is_simple([(0, 0), (0, 0), (4, 0), (4, 4)])

    def test_fold_back_spike(self):
        assert not polygon_is_simple([(0, 0), (4, 0), (2, 0), (2, 3)])

    def test_collinear_forward_edge_is_fine(self):
        assert polygon_is_simple([(0, 0), (2, 0), (4, 0), (4, 4)])


class TestRasterizePolygon:
    def test_integer_square_pixel_count(self):
        # centers 0.5 .. 9.5 fall inside [0, 10) on both axes: 100 pixels
        mask = rasterize_polygon([(0, 0), (10, 0), (10, 10), (0, 10)], 16, 16)
        assert int(mask.sum()) == 100
        assert mask[:10, :10].all()
        assert not mask[10:, :].any() and not mask[:, 10:].any()

    def test_half_open_partition(self):
        # rectangles abutting at x = 5 share no pixel and leave no gap
        left = rasterize_polygon([(0, 0), (5, 0), (5, 8), (0, 8)], 10, 8)
        right = rasterize_polygon([(5, 0), (10, 0), (10, 8), (5, 8)], 10, 8)
        assert not (left & right).any()
        assert (left | right).all()

    def test_orientation_invariance(self):
        poly = [(1, 1), (9, 2), (7, 9), (2, 7)]
        a = rasterize_polygon(poly, 12, 12)
        b = rasterize_polygon(poly[::-1], 12, 12)
        assert np.array_equal(a, b)

    def test_out_of_page_is_empty(self):
        mask = rasterize_polygon([(20, 20), (30, 20), (25, 28)], 10, 10)
        assert not mask.any()

    def test_degenerate_is_empty(self):
        assert not rasterize_polygon([(3, 3), (7, 3), (5, 3)], 10, 10).any()

    def test_matches_point_oracle_on_fixed_shapes(self):
        shapes = [
            [(0, 0), (10, 0), (10, 10), (0, 10)],
            [(1, 1), (11, 3), (8, 12), (2, 9)],
            [(2, 2), (14, 2), (8, 13)],
            [(0.5, 0.5), (12.5, 1.5), (6.5, 11.5)],  # non-integer vertices
        ]
        for verts in shapes:
            got = rasterize_polygon(verts, 16, 16)
            want = oracle_raster(verts, 16, 16)
            assert np.array_equal(got, want), verts

    def test_matches_point_oracle_on_random_stars(self):
        # star-shaped polygons around a center are always simple
        rng = np.random.default_rng(20240817)
        for _ in range(40):
            cx, cy = 10 + rng.uniform(-2, 2), 10 + rng.uniform(-2, 2)
            n = 3 + int(rng.integers(8))
            angles = np.sort(rng.uniform(0, 2 * np.pi, size=n))
            radii = rng.uniform(2.0, 9.0, size=n)
            verts = [(cx + r * np.cos(a), cy + r * np.sin(a))
                     for a, r in zip(angles, radii)]
            got = rasterize_polygon(verts, 20, 20)
            want = oracle_raster(verts, 20, 20)
            assert np.array_equal(got, want)

    def test_concave_polygon_holes_out_the_notch(self):
        # a U shape: the notch between the arms must stay empty
        verts = [(0, 0), (12, 0), (12, 10), (8, 10), (8, 4), (4, 4), (4, 10), (0, 10)]
        mask = rasterize_polygon(verts, 14, 12)
        assert np.array_equal(mask, oracle_raster(verts, 14, 12))
        assert not mask[5:10, 4:8].any()


class TestRasterizeBox:
    def test_matches_polygon_of_corners(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            x, y = int(rng.integers(8)), int(rng.integers(8))
            w, h = 1 + int(rng.integers(8)), 1 + int(rng.integers(8))
            box_mask = rasterize_box(Box(x, y, w, h), 18, 18)
            poly_mask = rasterize_polygon(
                [(x, y), (x + w, y), (x + w, y + h), (x, y + h)], 18, 18)
            assert np.array_equal(box_mask, poly_mask)

    def test_pixel_count(self):
        assert int(rasterize_box(Box(2, 3, 4, 5), 10, 10).sum()) == 20
