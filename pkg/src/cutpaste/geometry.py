"""Pixel-grid geometry shared by the corpus, compositor and metrics code.

Conventions used throughout the package:

* Pixel (row, col) covers the unit square [col, col+1) x [row, row+1);
  its sampling point is the centre (col + 0.5, row + 0.5).
* Boxes are (x, y, w, h) and address the half-open region
  [x, x+w) x [y, y+h).
* Polygons are vertex lists; the edge from the last vertex back to the
  first is implicit.  A pixel belongs to a polygon mask iff its centre
  lies inside under the even-odd rule, with half-open edge handling so
  shared edges never double-count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

Vertex = Tuple[float, float]


@dataclass(frozen=True)
class Box:
    """Axis-aligned box over the half-open region [x, x+w) x [y, y+h)."""

    x: float
    y: float
    w: float
    h: float

    def area(self) -> float:
        return max(0.0, self.w) * max(0.0, self.h)

    def x2(self) -> float:
        return self.x + self.w

    def y2(self) -> float:
        return self.y + self.h

    def intersection_area(self, other: "Box") -> float:
        iw = min(self.x2(), other.x2()) - max(self.x, other.x)
        ih = min(self.y2(), other.y2()) - max(self.y, other.y)
        if iw <= 0 or ih <= 0:
            return 0.0
        return iw * ih

    def overlaps(self, other: "Box") -> bool:
        return self.intersection_area(other) > 0

    def contains_box(self, other: "Box") -> bool:
        return (
            other.x >= self.x
            and other.y >= self.y
            and other.x2() <= self.x2()
            and other.y2() <= self.y2()
        )

    def clip(self, width: float, height: float) -> "Box":
        """Clip to the page rectangle [0, width) x [0, height)."""
        x1 = min(max(self.x, 0.0), width)
        y1 = min(max(self.y, 0.0), height)
        x2 = min(max(self.x2(), 0.0), width)
        y2 = min(max(self.y2(), 0.0), height)
        return Box(x1, y1, max(0.0, x2 - x1), max(0.0, y2 - y1))

    def as_int_tuple(self) -> Tuple[int, int, int, int]:
        return (int(self.x), int(self.y), int(self.w), int(self.h))


# ---------------------------------------------------------------------------
# polygon helpers
# ---------------------------------------------------------------------------

def polygon_array(vertices: Iterable[Vertex]) -> np.ndarray:
    arr = np.asarray(list(vertices), dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("polygon vertices must be a sequence of (x, y) pairs")
    return arr


def polygon_bounds(vertices: Iterable[Vertex]) -> Tuple[float, float, float, float]:
    """(min_x, min_y, max_x, max_y) over the vertex list."""
    arr = polygon_array(vertices)
    return (
        float(arr[:, 0].min()),
        float(arr[:, 1].min()),
        float(arr[:, 0].max()),
        float(arr[:, 1].max()),
    )


def polygon_bbox(vertices: Iterable[Vertex]) -> Box:
    min_x, min_y, max_x, max_y = polygon_bounds(vertices)
    return Box(min_x, min_y, max_x - min_x, max_y - min_y)


def polygon_area(vertices: Iterable[Vertex]) -> float:
    """Unsigned shoelace area."""
    arr = polygon_array(vertices)
    x = arr[:, 0]
    y = arr[:, 1]
    return abs(float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))) / 2.0


def transform_polygon(
    vertices: Iterable[Vertex],
    scale: Tuple[float, float] = (1.0, 1.0),
    offset: Tuple[float, float] = (0.0, 0.0),
) -> List[Vertex]:
    """Apply an axis-aligned affine map (scale then translate) to vertices."""
    arr = polygon_array(vertices)
    out = arr * np.asarray(scale, dtype=np.float64) + np.asarray(offset, dtype=np.float64)
    return [(float(px), float(py)) for px, py in out]


def _orient(ax, ay, bx, by, cx, cy) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _on_segment(ax, ay, bx, by, px, py) -> bool:
    # assumes p collinear with a-b
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


def _segments_intersect(a, b, c, d) -> bool:
    """True if closed segments a-b and c-d share any point."""
    o1 = _orient(*a, *b, *c)
    o2 = _orient(*a, *b, *d)
    o3 = _orient(*c, *d, *a)
    o4 = _orient(*c, *d, *b)
    if ((o1 > 0) != (o2 > 0)) and ((o3 > 0) != (o4 > 0)) and o1 != 0 and o2 != 0 and o3 != 0 and o4 != 0:
        return True
    if o1 == 0 and _on_segment(*a, *b, *c):
        return True
    if o2 == 0 and _on_segment(*a, *b, *d):
        return True
    if o3 == 0 and _on_segment(*c, *d, *a):
        return True
    if o4 == 0 and _on_segment(*c, *d, *b):
        return True
    return False


def polygon_is_simple(vertices: Sequence[Vertex]) -> bool:
    """True for a usable polygon: >= 3 vertices, no duplicate neighbours,
    no folded-back spike, and no intersection between non-adjacent edges."""
    arr = polygon_array(vertices)
    n = len(arr)
    if n < 3:
        return False
    for i in range(n):
        a = arr[i]
        b = arr[(i + 1) % n]
        if a[0] == b[0] and a[1] == b[1]:
            return False
    # spikes: consecutive edges collinear and pointing back
    for i in range(n):
        a = arr[(i - 1) % n]
        b = arr[i]
        c = arr[(i + 1) % n]
        if _orient(a[0], a[1], b[0], b[1], c[0], c[1]) == 0:
            if np.dot(b - a, c - b) < 0:
                return False
    for i in range(n):
        a = tuple(arr[i])
        b = tuple(arr[(i + 1) % n])
        for j in range(i + 1, n):
            # skip the edge itself and the two edges sharing a vertex with it
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            c = tuple(arr[j])
            d = tuple(arr[(j + 1) % n])
            if _segments_intersect(a, b, c, d):
                return False
    return True


def rasterize_polygon(vertices: Iterable[Vertex], width: int, height: int) -> np.ndarray:
    """Scanline-rasterize a polygon onto a (height, width) boolean grid.

    A pixel is set iff its centre lies inside the polygon (even-odd rule).
    Edge crossings use the half-open interval [y_lo, y_hi) so a scanline
    passing exactly through a vertex is counted once.  Geometry outside the
    grid is clipped by construction.  A degenerate polygon yields an empty
    (or near-empty) mask rather than an error.
    """
    mask = np.zeros((height, width), dtype=bool)
    arr = polygon_array(vertices)
    if len(arr) < 3:
        return mask
    x0 = arr[:, 0]
    y0 = arr[:, 1]
    x1 = np.roll(x0, -1)
    y1 = np.roll(y0, -1)
    row_lo = max(0, int(np.floor(y0.min() - 0.5)))
    row_hi = min(height - 1, int(np.ceil(y0.max() + 0.5)))
    for row in range(row_lo, row_hi + 1):
        yc = row + 0.5
        crossing = ((y0 <= yc) & (yc < y1)) | ((y1 <= yc) & (yc < y0))
        if not crossing.any():
            continue
        xs = x0[crossing] + (yc - y0[crossing]) * (x1[crossing] - x0[crossing]) / (
            y1[crossing] - y0[crossing]
        )
        xs.sort()
        for k in range(0, len(xs) - 1, 2):
            lo, hi = xs[k], xs[k + 1]
            # pixel col j is covered iff lo <= j + 0.5 < hi
            j_lo = max(0, int(np.ceil(lo - 0.5)))
            j_hi = min(width, int(np.ceil(hi - 0.5)))
            if j_hi > j_lo:
                mask[row, j_lo:j_hi] = True
    return mask


def rasterize_box(box: Box, width: int, height: int) -> np.ndarray:
    """Rasterize a box with the same pixel-centre rule as polygons."""
    mask = np.zeros((height, width), dtype=bool)
    j_lo = max(0, int(np.ceil(box.x - 0.5)))
    j_hi = min(width, int(np.ceil(box.x2() - 0.5)))
    i_lo = max(0, int(np.ceil(box.y - 0.5)))
    i_hi = min(height, int(np.ceil(box.y2() - 0.5)))
    if j_hi > j_lo and i_hi > i_lo:
        mask[i_lo:i_hi, j_lo:j_hi] = True
    return mask
