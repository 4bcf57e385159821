import logging
import math
from typing import Iterable, List, Optional, Tuple, Union

import drawsvg as draw

from app.packing import CirclePacking
from app.representation import ConvexRepresentation, StringRepresentation

logger = logging.getLogger("canonconv.svg")

CANVAS = 800.0
PADDING = 20.0
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


# ---------------------------------------------------
# Style Helpers
# ---------------------------------------------------
class _Frame:
    """Maps plane coordinates (y up) to SVG pixels (y down), rounded for display."""

    def __init__(self, xs: List[float], ys: List[float]):
        self.min_x, self.max_y = min(xs), max(ys)
        extent = max(max(xs) - self.min_x, self.max_y - min(ys), 1e-9)
        self.scale = (CANVAS - 2 * PADDING) / extent
        self.width = round((max(xs) - self.min_x) * self.scale + 2 * PADDING, 3)
        self.height = round((self.max_y - min(ys)) * self.scale + 2 * PADDING, 3)

    def xy(self, x: float, y: float) -> Tuple[float, float]:
        return (
            round((x - self.min_x) * self.scale + PADDING, 4),
            round((self.max_y - y) * self.scale + PADDING, 4),
        )

    def length(self, r: float) -> float:
        return round(r * self.scale, 4)


def _colour(k: int) -> str:
    return PALETTE[k % len(PALETTE)]


def _flat(points: Iterable[Tuple[float, float]]) -> List[float]:
    return [c for p in points for c in p]


def _disk_layer(frame: _Frame, p: CirclePacking) -> draw.Group:
    group = draw.Group(id="disks")
    for i, (c, r) in enumerate(zip(p.centers, p.radii)):
        cx, cy = frame.xy(c.real, c.imag)
        group.append(draw.Circle(cx, cy, frame.length(float(r)), fill="none", stroke="#555555", stroke_width=1))
        group.append(draw.Text(str(i), 12, cx, cy, text_anchor="middle", fill="#555555"))
    return group


def _tangency_layer(frame: _Frame, p: CirclePacking) -> draw.Group:
    group = draw.Group(id="tangency")
    for (i, j), t in sorted(p.tangency.items()):
        tx, ty = frame.xy(t.real, t.imag)
        group.append(draw.Circle(tx, ty, 2.5, fill="#000000"))
    return group


def _packing_extent(p: CirclePacking) -> Tuple[List[float], List[float]]:
    xs = [c.real + s * r for c, r in zip(p.centers, p.radii) for s in (-1, 1)]
    ys = [c.imag + s * r for c, r in zip(p.centers, p.radii) for s in (-1, 1)]
    return xs, ys


def _finish(d: draw.Drawing, path: Optional[str], what: str) -> str:
    if path:
        d.save_svg(path)
        logger.info(f"🖼️ Wrote {what} SVG to {path}")
    return d.as_svg()


# ---------------------------------------------------
# Public API
# ---------------------------------------------------
def packing_svg(p: CirclePacking, path: Optional[str] = None) -> str:
    frame = _Frame(*_packing_extent(p))
    d = draw.Drawing(frame.width, frame.height)
    d.append(draw.Rectangle(0, 0, frame.width, frame.height, fill="#ffffff"))
    d.append(_disk_layer(frame, p))
    d.append(_tangency_layer(frame, p))
    return _finish(d, path, "packing")


def representation_svg(rep: ConvexRepresentation, path: Optional[str] = None) -> str:
    hull_points = [[(float(x), float(y)) for x, y in hull] for hull in rep.hulls]
    xs = [x for hull in hull_points for x, _ in hull]
    ys = [y for hull in hull_points for _, y in hull]
    if rep.packing is not None:
        px, py = _packing_extent(rep.packing)
        xs, ys = xs + px, ys + py
    frame = _Frame(xs, ys)
    d = draw.Drawing(frame.width, frame.height)
    d.append(draw.Rectangle(0, 0, frame.width, frame.height, fill="#ffffff"))
    if rep.packing is not None:
        d.append(_disk_layer(frame, rep.packing))

    arcs = draw.Group(id="arcs")
    for arc in rep.arcs:
        samples = [
            arc.center + arc.radius * complex(math.cos(a), math.sin(a))
            for a in (arc.mid_angle + arc.span * (k / 8 - 0.5) for k in range(9))
        ]
        arcs.append(
            draw.Lines(*_flat(frame.xy(z.real, z.imag) for z in samples), close=False,
                       fill="none", stroke="#aaaaaa", stroke_width=3)
        )
    d.append(arcs)

    hulls = draw.Group(id="hulls")
    for v, hull in enumerate(hull_points):
        colour = _colour(v)
        if len(hull) == 1:
            x, y = frame.xy(*hull[0])
            hulls.append(draw.Circle(x, y, 3, fill=colour))
        else:
            hulls.append(
                draw.Lines(*_flat(frame.xy(x, y) for x, y in hull), close=len(hull) > 2,
                           fill=colour, fill_opacity=0.25, stroke=colour, stroke_width=1)
            )
    d.append(hulls)

    points = draw.Group(id="points")
    for v, pts in enumerate(rep.points):
        for x, y in sorted(set(pts)):
            px, py = frame.xy(float(x), float(y))
            points.append(draw.Circle(px, py, 1.5, fill=_colour(v)))
    d.append(points)
    return _finish(d, path, "representation")


def strings_svg(strings: StringRepresentation, path: Optional[str] = None) -> str:
    curves = [[(float(x), float(y)) for x, y in c] for c in strings.curves]
    frame = _Frame([x for c in curves for x, _ in c], [y for c in curves for _, y in c])
    d = draw.Drawing(frame.width, frame.height)
    d.append(draw.Rectangle(0, 0, frame.width, frame.height, fill="#ffffff"))
    group = draw.Group(id="strings")
    for v, curve in enumerate(curves):
        if len(curve) == 1:
            x, y = frame.xy(*curve[0])
            group.append(draw.Circle(x, y, 3, fill=_colour(v)))
        else:
            group.append(
                draw.Lines(*_flat(frame.xy(x, y) for x, y in curve), close=False,
                           fill="none", stroke=_colour(v), stroke_width=1.5)
            )
    d.append(group)
    return _finish(d, path, "strings")


def export_svg(obj: Union[CirclePacking, ConvexRepresentation, StringRepresentation], path: Optional[str] = None) -> str:
    if isinstance(obj, CirclePacking):
        return packing_svg(obj, path)
    if isinstance(obj, ConvexRepresentation):
        return representation_svg(obj, path)
    if isinstance(obj, StringRepresentation):
        return strings_svg(obj, path)
    raise TypeError(f"Cannot export {type(obj).__name__} to SVG")
