"""Exact plane geometry on rational (Fraction or int) coordinates.

Convex sets are represented by their hull vertex list in counter-clockwise
order; a single point or a segment is a valid degenerate hull.
"""
import math
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

Number = Union[int, Fraction]
Point = Tuple[Number, Number]
Hull = Tuple[Point, ...]


def orient(a: Point, b: Point, c: Point) -> Number:
    """Twice the signed area of abc; positive for a left turn."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def convex_hull(points: Iterable[Point]) -> Hull:
    """Andrew's monotone chain without collinear vertices."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return tuple(pts)
    lower: List[Point] = []
    for p in pts:
        while len(lower) >= 2 and orient(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: List[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and orient(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return tuple(lower[:-1] + upper[:-1])


def hull_edges(hull: Hull) -> List[Tuple[Point, Point]]:
    if len(hull) < 2:
        return []
    if len(hull) == 2:
        return [(hull[0], hull[1])]
    return [(hull[k], hull[(k + 1) % len(hull)]) for k in range(len(hull))]


def bbox(hull: Hull) -> Tuple[Number, Number, Number, Number]:
    xs = [p[0] for p in hull]
    ys = [p[1] for p in hull]
    return min(xs), min(ys), max(xs), max(ys)


def _boxes_meet(a: Tuple, b: Tuple) -> bool:
    return a[0] <= b[2] and b[0] <= a[2] and a[1] <= b[3] and b[1] <= a[3]


def on_segment(p: Point, a: Point, b: Point) -> bool:
    if orient(a, b, p) != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def point_in_hull(p: Point, hull: Hull) -> bool:
    """Closed containment."""
    if not hull:
        return False
    if len(hull) == 1:
        return p == hull[0]
    if len(hull) == 2:
        return on_segment(p, hull[0], hull[1])
    return all(orient(a, b, p) >= 0 for a, b in hull_edges(hull))


def _signs(a: Point, b: Point, c: Point, d: Point) -> Tuple[Number, Number, Number, Number]:
    return orient(c, d, a), orient(c, d, b), orient(a, b, c), orient(a, b, d)


def _opposite_or_zero(x: Number, y: Number) -> bool:
    return not ((x > 0 and y > 0) or (x < 0 and y < 0))


def segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Closed segments ab and cd share at least one point (collinear overlap included)."""
    d1, d2, d3, d4 = _signs(a, b, c, d)
    if d1 == 0 and d2 == 0 and d3 == 0 and d4 == 0:
        lo = max(min(a, b), min(c, d))
        hi = min(max(a, b), max(c, d))
        return lo <= hi
    return _opposite_or_zero(d1, d2) and _opposite_or_zero(d3, d4)


def segment_intersection(a: Point, b: Point, c: Point, d: Point) -> Optional[Tuple[Point, Point]]:
    """Intersection of closed segments as (start, end); start == end for a single point."""
    d1, d2, d3, d4 = _signs(a, b, c, d)
    if d1 == 0 and d2 == 0 and d3 == 0 and d4 == 0:
        # collinear: lexicographic order is the order along the line
        lo = max(min(a, b), min(c, d))
        hi = min(max(a, b), max(c, d))
        return (lo, hi) if lo <= hi else None
    if not (_opposite_or_zero(d1, d2) and _opposite_or_zero(d3, d4)):
        return None
    t = Fraction(d1) / (d1 - d2)
    p = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
    p = tuple(int(x) if isinstance(x, Fraction) and x.denominator == 1 else x for x in p)
    return p, p


def hulls_intersect(h1: Hull, h2: Hull) -> bool:
    if not h1 or not h2 or not _boxes_meet(bbox(h1), bbox(h2)):
        return False
    if any(point_in_hull(p, h2) for p in h1) or any(point_in_hull(p, h1) for p in h2):
        return True
    return any(
        segments_intersect(a, b, c, d) for a, b in hull_edges(h1) for c, d in hull_edges(h2)
    )


def intersection_witness(h1: Hull, h2: Hull) -> Optional[Point]:
    """Lexicographically smallest point of h1 and h2 intersected, or None."""
    if not h1 or not h2 or not _boxes_meet(bbox(h1), bbox(h2)):
        return None
    candidates = [p for p in h1 if point_in_hull(p, h2)]
    candidates += [p for p in h2 if point_in_hull(p, h1)]
    for a, b in hull_edges(h1):
        for c, d in hull_edges(h2):
            meet = segment_intersection(a, b, c, d)
            if meet is not None:
                candidates.extend(meet)
    return min(candidates) if candidates else None


def common_scale(point_sets: Sequence[Sequence[Point]]) -> Tuple[int, List[List[Tuple[int, int]]]]:
    """Scales rational point sets by the lcm of all denominators to integer points."""
    scale = 1
    for points in point_sets:
        for x, y in points:
            scale = math.lcm(scale, Fraction(x).denominator, Fraction(y).denominator)
    scaled = [
        [(int(Fraction(x) * scale), int(Fraction(y) * scale)) for x, y in points] for points in point_sets
    ]
    return scale, scaled
