import cmath
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from app.config import get_settings
from app.errors import ConstructionError, DefectError, InputError
from app.geometry import (
    Hull,
    Point,
    bbox,
    common_scale,
    convex_hull,
    hulls_intersect,
    intersection_witness,
    segment_intersection,
)
from app.graph import Graph, iter_bits, members, popcount
from app.packing import CirclePacking, PlanarEmbedding, k5_minus_edge_embedding, min_gap_angle, pack
from app.partition import find_great_partition

logger = logging.getLogger("canonconv.representation")

MAX_DELTA_RETRIES = 8
RETRY_BITS = 16

# Template vertex for each canonical part: X1, X2, X3 -> 0, 1, 2; X4a, X4b -> 3, 4.
# {3, 4} is the edge missing from K5.
CANONICAL_SLOTS = ("X1", "X2", "X3", "X4a", "X4b")


# --------------------------
# Blow-up specification
# --------------------------
@dataclass(frozen=True)
class BlowupSpec:
    """Template vertex i becomes a clique of sizes[i] vertices v_i1..v_in_i.

    cross_edges holds (i, m, j, M) with i < j adjacent in the template and
    0-based clique indices m < sizes[i], M < sizes[j].
    """

    template: PlanarEmbedding
    sizes: Tuple[int, ...]
    cross_edges: FrozenSet[Tuple[int, int, int, int]] = frozenset()

    def __post_init__(self):
        h = self.template.graph
        if len(self.sizes) != h.n or any(s < 0 for s in self.sizes):
            raise InputError(f"Sizes {self.sizes} do not fit a template on {h.n} vertices")
        for i, m, j, big_m in self.cross_edges:
            if not (i < j and h.has_edge(i, j)):
                raise InputError(f"Cross edge ({i},{m})-({j},{big_m}) is not on a template edge i<j")
            if not (0 <= m < self.sizes[i] and 0 <= big_m < self.sizes[j]):
                raise InputError(f"Cross edge ({i},{m})-({j},{big_m}) outside clique sizes")

    @cached_property
    def offsets(self) -> Tuple[int, ...]:
        return tuple(int(x) for x in np.concatenate(([0], np.cumsum(self.sizes)))[:-1])

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def vertex(self, i: int, m: int) -> int:
        return self.offsets[i] + m

    def labels(self) -> Tuple[str, ...]:
        return tuple(f"v{i + 1}_{m + 1}" for i, size in enumerate(self.sizes) for m in range(size))

    @cached_property
    def _traces(self) -> Dict[Tuple[int, int, int], int]:
        traces: Dict[Tuple[int, int, int], int] = {}
        for i, m, j, big_m in self.cross_edges:
            traces[(i, j, big_m)] = traces.get((i, j, big_m), 0) | 1 << m
        return traces

    def trace(self, i: int, j: int, big_m: int) -> int:
        """Neighbourhood of v_jM inside clique i, as a bitmask over m."""
        return self._traces.get((i, j, big_m), 0)

    def graph(self) -> Graph:
        edges = []
        for i, size in enumerate(self.sizes):
            edges += [(self.vertex(i, a), self.vertex(i, b)) for b in range(size) for a in range(b)]
        edges += [(self.vertex(i, m), self.vertex(j, big_m)) for i, m, j, big_m in self.cross_edges]
        return Graph.from_edges(self.n, edges)


def random_blowup_spec(template: PlanarEmbedding, max_size: int, rng: np.random.Generator) -> BlowupSpec:
    sizes = tuple(int(s) for s in rng.integers(1, max_size + 1, size=template.graph.n))
    cross = set()
    for i, j in template.graph.edges():
        for m in range(sizes[i]):
            for big_m in range(sizes[j]):
                if rng.random() < 0.5:
                    cross.add((i, m, j, big_m))
    return BlowupSpec(template, sizes, frozenset(cross))


# --------------------------
# Representations
# --------------------------
@dataclass(frozen=True)
class Arc:
    """Arc on the boundary of disk `owner`, centered at its tangency with `other`."""

    owner: int
    other: int
    center: complex
    radius: float
    mid_angle: float
    span: float


@dataclass(frozen=True, eq=False)
class ConvexRepresentation:
    labels: Tuple[str, ...]
    points: Tuple[Tuple[Point, ...], ...]
    epsilon: float
    delta: Fraction
    packing: Optional[CirclePacking] = None
    arcs: Tuple[Arc, ...] = ()
    retries: int = 0

    @property
    def n(self) -> int:
        return len(self.points)

    @cached_property
    def hulls(self) -> Tuple[Hull, ...]:
        return tuple(convex_hull(pts) for pts in self.points)

    def relabel(self, new_index: Sequence[int]) -> "ConvexRepresentation":
        """Vertex v moves to position new_index[v]."""
        points: List[Tuple[Point, ...]] = [()] * self.n
        labels: List[str] = [""] * self.n
        for old, new in enumerate(new_index):
            points[new] = self.points[old]
            labels[new] = self.labels[old]
        return ConvexRepresentation(
            tuple(labels), tuple(points), self.epsilon, self.delta, self.packing, self.arcs, self.retries
        )


@dataclass
class VerificationReport:
    ok: bool
    missing: List[Tuple[int, int]] = field(default_factory=list)
    extra: List[Tuple[int, int]] = field(default_factory=list)
    problems: List[str] = field(default_factory=list)

    def as_dict(self) -> Dict:
        return {
            "ok": self.ok,
            "missing": [list(p) for p in self.missing],
            "extra": [list(p) for p in self.extra],
            "problems": list(self.problems),
        }


@dataclass(frozen=True)
class StringRepresentation:
    curves: Tuple[Tuple[Point, ...], ...]
    crossings: Dict[Tuple[int, int], int]

    @property
    def n(self) -> int:
        return len(self.curves)

    def max_crossings(self) -> int:
        return max(self.crossings.values(), default=0)


def intersection_graph(rep: ConvexRepresentation) -> Graph:
    """Graph of pairwise hull intersections, computed on an integer grid."""
    _, scaled = common_scale(rep.points)
    hulls = [convex_hull(pts) for pts in scaled]
    edges = [
        (i, j) for i in range(rep.n) for j in range(i + 1, rep.n) if hulls_intersect(hulls[i], hulls[j])
    ]
    return Graph.from_edges(rep.n, edges)


def verify_representation(rep: ConvexRepresentation, g: Graph) -> VerificationReport:
    """Exact check that hull intersections reproduce g edge for edge."""
    report = VerificationReport(ok=True)
    if rep.n != g.n:
        report.problems.append(f"representation has {rep.n} sets for {g.n} vertices")
        report.ok = False
        return report
    for v, pts in enumerate(rep.points):
        if not pts:
            report.problems.append(f"vertex {v} has an empty point set")
        if any(not isinstance(c, (int, Fraction)) for p in pts for c in p):
            report.problems.append(f"vertex {v} has non-rational coordinates")
    if report.problems:
        report.ok = False
        return report
    h = intersection_graph(rep)
    for i in range(g.n):
        for j in range(i + 1, g.n):
            if g.has_edge(i, j) and not h.has_edge(i, j):
                report.missing.append((i, j))
            elif h.has_edge(i, j) and not g.has_edge(i, j):
                report.extra.append((i, j))
    report.ok = not (report.missing or report.extra)
    return report


# --------------------------
# Construction
# --------------------------
def _dyadic(x, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(round(x * scale), scale)


def _rationalize(z: complex, bits: int) -> Point:
    return _dyadic(z.real, bits), _dyadic(z.imag, bits)


def _place_points(spec: BlowupSpec, p: CirclePacking, delta: Fraction, epsilon: float, bits: int):
    """Puts the arc points of each template edge on an exact parabola osculating D_i.

    Points on one parabola are in strictly convex position whatever their
    spacing, so shrinking delta never merges or reorders them.
    """
    points: List[List[Point]] = []
    for i, size in enumerate(spec.sizes):
        center = _rationalize(complex(p.centers[i]), bits)
        points += [[center] for _ in range(size)]

    arcs = []
    for i, j in spec.template.graph.edges():
        by_trace: Dict[int, List[int]] = {}
        for big_m in range(spec.sizes[j]):
            a = spec.trace(i, j, big_m)
            if a:
                by_trace.setdefault(a, []).append(big_m)
        if not by_trace:
            continue
        o_i = complex(p.centers[i])
        r_i = float(p.radii[i])
        t = p.tangency_point(i, j)
        bx, by = _rationalize(t, bits)
        dx, dy = _rationalize((o_i - t) / abs(o_i - t), bits)
        kappa = max(_dyadic(0.5 / r_i, bits), Fraction(1, 1 << bits))
        subsets = sorted(by_trace)
        k = len(subsets)
        offset_bits = bits + max(0, math.ceil(math.log2(k / float(delta))))
        for s, a in enumerate(subsets):
            step = _dyadic(delta * Fraction(2 * s + 1 - k, 2 * k), offset_bits)
            bend = kappa * step * step
            point = (bx - step * dy + bend * dx, by + step * dx + bend * dy)
            for m in iter_bits(a):
                points[spec.vertex(i, m)].append(point)
            for big_m in by_trace[a]:
                points[spec.vertex(j, big_m)].append(point)
        arcs.append(Arc(i, j, o_i, r_i, cmath.phase(t - o_i), float(delta) / r_i))
    return ConvexRepresentation(
        labels=spec.labels(),
        points=tuple(tuple(pts) for pts in points),
        epsilon=epsilon,
        delta=delta,
        packing=p,
        arcs=tuple(arcs),
    )


def build_representation(
    spec: BlowupSpec,
    p: CirclePacking,
    delta: Optional[Fraction] = None,
    max_retries: int = MAX_DELTA_RETRIES,
    bits: Optional[int] = None,
) -> ConvexRepresentation:
    """Blows up a packed template into convex sets whose intersection graph is spec.graph().

    For each template edge i < j, every non-empty trace A of a vertex of clique j
    on clique i gets one point p_ij(A) within delta of the tangency point, on an exact
    parabola osculating the boundary of D_i. p_ij(A) belongs to P_im for m in A and to P_jM
    for every v_jM whose trace is A. Every P_im also holds the center o_i.
    """
    h = spec.template.graph
    bits = bits if bits is not None else get_settings().max_denominator_bits
    if p.n != h.n:
        raise ConstructionError(f"Packing has {p.n} circles, template has {h.n} vertices")
    missing = [e for e in h.edges() if e not in p.tangency]
    if missing:
        raise ConstructionError(f"Packing lacks tangency points for template edges {missing}")

    epsilon = min(min_gap_angle(p), 1.0) if p.tangency else 1.0
    bound = Fraction(epsilon) ** 2 / 100
    if delta is None:
        delta = Fraction(epsilon * epsilon / 200).limit_denominator(1 << 30)
        while delta >= bound:
            delta /= 2
    else:
        delta = Fraction(delta)
        if not 0 < delta < bound:
            raise InputError(f"delta must lie in (0, eps^2/100 = {float(bound):.3e}), got {float(delta):.3e}")

    target = spec.graph()
    for attempt in range(max_retries + 1):
        rep = _place_points(spec, p, delta, epsilon, bits)
        report = verify_representation(rep, target)
        if report.ok:
            logger.info(
                f"✅ Representation of {target.n} vertices verified (eps={epsilon:.4f}, delta={float(delta):.3e})"
            )
            return ConvexRepresentation(
                rep.labels, rep.points, rep.epsilon, rep.delta, rep.packing, rep.arcs, attempt
            )
        logger.warning(
            f"⚠️ Verification failed at delta={float(delta):.3e} "
            f"({len(report.missing)} missing, {len(report.extra)} extra); halving delta, {bits + RETRY_BITS} bits"
        )
        delta /= 2
        bits += RETRY_BITS
    raise ConstructionError(f"Point placement failed after {max_retries} delta reductions")


@lru_cache(maxsize=1)
def canonical_template_packing() -> CirclePacking:
    return pack(k5_minus_edge_embedding())


def canonical_spec(g: Graph, parts: Sequence[int]) -> Tuple[BlowupSpec, List[int]]:
    """Blow-up of K5 - e for a great partition; returns the spec and its vertex order in g."""
    template = k5_minus_edge_embedding()
    order = [v for part in parts for v in members(part)]
    groups = [members(part) for part in parts]
    cross = set()
    for i, j in template.graph.edges():
        for m, u in enumerate(groups[i]):
            for big_m, w in enumerate(groups[j]):
                if g.has_edge(u, w):
                    cross.add((i, m, j, big_m))
    sizes = tuple(popcount(part) for part in parts)
    return BlowupSpec(template, sizes, frozenset(cross)), order


def represent_canonical(g: Graph) -> Optional[ConvexRepresentation]:
    """Convex-set representation of a great graph via K5 - e; None when g is not great."""
    logger.info(f"🚀 Representing graph n={g.n} by convex sets")
    p = find_great_partition(g)
    if p is None:
        logger.info("Graph has no great partition")
        return None
    spec, order = canonical_spec(g, (p.x1, p.x2, p.x3, p.x4a, p.x4b))
    try:
        rep = build_representation(spec, canonical_template_packing())
    except ConstructionError as exc:
        raise DefectError(f"Construction failed on a great graph: {exc}") from exc
    rep = rep.relabel(order)
    report = verify_representation(rep, g)
    if not report.ok:
        raise DefectError(f"Representation does not match the input graph: {report.as_dict()}")
    return rep


# --------------------------
# Strings from convex sets
# --------------------------
def _pieces_touch(a: Tuple[Point, Point], b: Tuple[Point, Point]) -> bool:
    return segment_intersection(a[0], a[1], b[0], b[1]) is not None


def _crossing_components(c1: Sequence[Point], c2: Sequence[Point]) -> int:
    """Number of connected components of the intersection of two polylines."""
    segs1 = list(zip(c1, c1[1:])) or [(c1[0], c1[0])]
    segs2 = list(zip(c2, c2[1:])) or [(c2[0], c2[0])]
    if not _boxes(c1, c2):
        return 0
    pieces = []
    for a, b in segs1:
        for c, d in segs2:
            meet = segment_intersection(a, b, c, d)
            if meet is not None and meet not in pieces:
                pieces.append(meet)
    parent = list(range(len(pieces)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x in range(len(pieces)):
        for y in range(x + 1, len(pieces)):
            if _pieces_touch(pieces[x], pieces[y]):
                parent[find(x)] = find(y)
    return len({find(x) for x in range(len(pieces))})


def _boxes(c1: Sequence[Point], c2: Sequence[Point]) -> bool:
    b1, b2 = bbox(tuple(c1)), bbox(tuple(c2))
    return b1[0] <= b2[2] and b2[0] <= b1[2] and b1[1] <= b2[3] and b2[1] <= b1[3]


def strings_from_convex(rep: ConvexRepresentation) -> StringRepresentation:
    """Polygonal curves through one witness point per intersecting pair, in x order (ties by y)."""
    scale, scaled = common_scale(rep.points)
    hulls = [convex_hull(pts) for pts in scaled]
    selected: List[set] = [set() for _ in range(rep.n)]
    adjacent = set()
    for i in range(rep.n):
        for j in range(i + 1, rep.n):
            w = intersection_witness(hulls[i], hulls[j])
            if w is not None:
                adjacent.add((i, j))
                selected[i].add(w)
                selected[j].add(w)
    curves = []
    for v in range(rep.n):
        chosen = selected[v] or {min(hulls[v])}
        curves.append(tuple(sorted(chosen)))

    crossings: Dict[Tuple[int, int], int] = {}
    limit = 2 * rep.n
    for i in range(rep.n):
        for j in range(i + 1, rep.n):
            count = _crossing_components(curves[i], curves[j])
            crossings[(i, j)] = count
            if count > limit:
                raise DefectError(f"Curves {i} and {j} meet {count} times, above 2n = {limit}")
            if (count > 0) != ((i, j) in adjacent):
                raise DefectError(f"Curves {i} and {j} disagree with the convex sets on adjacency")

    def unscale(p: Point) -> Point:
        return Fraction(p[0]) / scale, Fraction(p[1]) / scale

    logger.info(f"✅ Strings built; max pairwise crossing count {max(crossings.values(), default=0)}")
    return StringRepresentation(tuple(tuple(unscale(p) for p in c) for c in curves), crossings)
