import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from app.config import get_settings
from app.errors import InputError, PackingError
from app.graph import Graph, components, k5_minus_edge, to_networkx, wheel_graph

logger = logging.getLogger("canonconv.packing")

ANGLE_TOL = 1e-13
MAX_SWEEPS = 200000
MARGIN_FACTOR = 10.0
POLISH_ROUNDS = 8
POLISH_TARGET = 4.0 * np.finfo(float).eps
POLISH_LIMIT = 1500

# Rotation chosen once for K5 - {3,4}; faces (1,0,4) [outer], (0,1,3), (0,2,4),
# (0,3,2), (1,2,3), (1,4,2).
K5_MINUS_EDGE_ROTATION = ((1, 3, 2, 4), (4, 2, 3, 0), (4, 0, 3, 1), (2, 0, 1), (0, 2, 1))
K5_MINUS_EDGE_OUTER = (1, 0, 4)


# --------------------------
# Planar embedding
# --------------------------
def _trace_faces(rotation: Sequence[Sequence[int]]) -> List[Tuple[int, ...]]:
    """Faces of a rotation system, each with its interior on the left."""
    position = {(v, u): k for v, flower in enumerate(rotation) for k, u in enumerate(flower)}
    seen = set()
    faces = []
    for u, flower in enumerate(rotation):
        for v in flower:
            if (u, v) in seen:
                continue
            face = []
            a, b = u, v
            while (a, b) not in seen:
                seen.add((a, b))
                face.append(a)
                around = rotation[b]
                c = around[(position[(b, a)] - 1) % len(around)]
                a, b = b, c
            faces.append(tuple(face))
    return faces


def _same_cycle(a: Sequence[int], b: Sequence[int]) -> bool:
    if len(a) != len(b):
        return False
    doubled = tuple(b) + tuple(b)
    return any(doubled[k:k + len(a)] == tuple(a) for k in range(len(b)))


@dataclass(frozen=True)
class PlanarEmbedding:
    """Connected planar graph with a counter-clockwise rotation and a chosen outer face."""

    graph: Graph
    rotation: Tuple[Tuple[int, ...], ...]
    outer_face: Tuple[int, ...]

    def __post_init__(self):
        g = self.graph
        if len(self.rotation) != g.n:
            raise InputError("Rotation system must list every vertex")
        for v, flower in enumerate(self.rotation):
            if sorted(flower) != sorted(u for u in range(g.n) if g.has_edge(v, u)):
                raise InputError(f"Rotation at vertex {v} is not a permutation of its neighbors")
        if g.edge_count() == 0:
            if g.n != 1 or tuple(self.outer_face) != (0,):
                raise InputError("An edgeless embedding must be the single vertex 0")
            return
        faces = self.faces()
        if g.n - g.edge_count() + len(faces) != 2:
            raise InputError(
                f"Rotation fails Euler check: V - E + F = {g.n - g.edge_count() + len(faces)}"
            )
        if not any(_same_cycle(self.outer_face, f) for f in faces):
            raise InputError(f"Outer face {self.outer_face} is not a face of the rotation")

    def faces(self) -> List[Tuple[int, ...]]:
        return _trace_faces(self.rotation)

    @classmethod
    def from_graph(cls, g: Graph, outer_face: Optional[Sequence[int]] = None) -> "PlanarEmbedding":
        """Embeds via networkx planarity testing; default outer face is the longest face."""
        if g.n == 0:
            raise InputError("Cannot embed the empty graph")
        if len(components(g, g.vertex_mask)) != 1:
            raise PackingError("Tangency graph must be connected")
        is_planar, emb = nx.check_planarity(to_networkx(g))
        if not is_planar:
            raise PackingError("Graph is not planar")
        rotation = tuple(tuple(reversed(list(emb.neighbors_cw_order(v)))) for v in range(g.n))
        if g.edge_count() == 0:
            return cls(g, rotation, (0,))
        faces = _trace_faces(rotation)
        if outer_face is None:
            outer = max(faces, key=len)
        else:
            matches = [f for f in faces if _same_cycle(tuple(outer_face), f)]
            if not matches:
                raise InputError(f"Requested outer face {tuple(outer_face)} is not a face")
            outer = matches[0]
        return cls(g, rotation, tuple(outer))


@lru_cache(maxsize=1)
def k5_minus_edge_embedding() -> PlanarEmbedding:
    return PlanarEmbedding(k5_minus_edge(), K5_MINUS_EDGE_ROTATION, K5_MINUS_EDGE_OUTER)


def wheel_embedding(k: int) -> PlanarEmbedding:
    return PlanarEmbedding.from_graph(wheel_graph(k))


# --------------------------
# Circle packing
# --------------------------
@dataclass(frozen=True, eq=False)
class CirclePacking:
    centers: np.ndarray
    radii: np.ndarray
    tangency: Dict[Tuple[int, int], complex]
    sweeps: int = 0
    angle_residual: float = 0.0

    @property
    def n(self) -> int:
        return len(self.radii)

    def tangency_point(self, i: int, j: int) -> complex:
        return self.tangency[(min(i, j), max(i, j))]

    def touching(self, i: int) -> List[int]:
        return sorted(b if a == i else a for a, b in self.tangency if i in (a, b))


@dataclass
class PackingReport:
    ok: bool
    violations: List[str] = field(default_factory=list)
    max_tangency_residual: float = 0.0
    min_nonedge_margin: float = math.inf


def _corner(r: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Angle at the circle of radius r in the triangle of three mutually tangent circles."""
    return 2.0 * np.arcsin(np.sqrt(a * b / ((r + a) * (r + b))))


def _triangulate(e: PlanarEmbedding) -> Tuple[int, List[Tuple[int, int, int]], Tuple[int, int, int]]:
    """Triangulates every face longer than 3 with a ring of helper vertices and a hub.

    Returns the total vertex count, the interior triangles, and the boundary
    triangle whose radii stay fixed.
    """
    n = e.graph.n
    faces = e.faces()
    outer_index = next(k for k, f in enumerate(faces) if _same_cycle(e.outer_face, f))
    triangles: List[Tuple[int, int, int]] = []
    boundary: Optional[Tuple[int, int, int]] = None
    total = n
    for index, face in enumerate(faces):
        length = len(face)
        if length == 3:
            triangles.append(face)
            if index == outer_index:
                boundary = face
            continue
        ring = list(range(total, total + length))
        hub = total + length
        total += length + 1
        for k in range(length):
            c0, c1 = face[k], face[(k + 1) % length]
            h0, h1 = ring[k], ring[(k + 1) % length]
            triangles += [(c0, c1, h0), (h0, c1, h1), (h0, h1, hub)]
        if index == outer_index:
            boundary = (ring[0], ring[1], hub)
    interior = [t for t in triangles if t != boundary]
    return total, interior, boundary


def _solve_radii(total: int, triangles: np.ndarray, boundary: Sequence[int]) -> Tuple[np.ndarray, int, float]:
    radii = np.ones(total)
    free = np.ones(total, dtype=bool)
    free[list(boundary)] = False
    petals = np.bincount(triangles.ravel(), minlength=total).astype(float)
    petals[petals == 0] = 1.0
    if not free.any():
        return radii, 0, 0.0

    a_idx, b_idx, c_idx = triangles[:, 0], triangles[:, 1], triangles[:, 2]
    residual = math.inf
    for sweep in range(1, MAX_SWEEPS + 1):
        ra, rb, rc = radii[a_idx], radii[b_idx], radii[c_idx]
        theta = (
            np.bincount(a_idx, _corner(ra, rb, rc), total)
            + np.bincount(b_idx, _corner(rb, rc, ra), total)
            + np.bincount(c_idx, _corner(rc, ra, rb), total)
        )
        residual = float(np.max(np.abs(theta[free] - 2.0 * np.pi)))
        if residual < ANGLE_TOL:
            return radii, sweep, residual
        # uniform-neighbor update
        beta = np.sin(theta / (2.0 * petals))
        delta = np.sin(np.pi / petals)
        proposal = radii * beta / (1.0 - beta) * (1.0 - delta) / delta
        radii = np.where(free, proposal, radii)
    return radii, MAX_SWEEPS, residual


def _layout(total: int, triangles: List[Tuple[int, int, int]], radii: np.ndarray) -> np.ndarray:
    centers = np.zeros(total, dtype=complex)
    placed = np.zeros(total, dtype=bool)
    a, b, _ = triangles[0]
    centers[b] = radii[a] + radii[b]
    placed[[a, b]] = True
    corners = [t for tri in triangles for t in (tri, tri[1:] + tri[:1], tri[2:] + tri[:2])]
    progress = True
    while progress and not placed.all():
        progress = False
        for a, b, c in corners:
            if placed[a] and placed[b] and not placed[c]:
                alpha = float(_corner(radii[a], radii[b], radii[c]))
                direction = (centers[b] - centers[a]) / abs(centers[b] - centers[a])
                centers[c] = centers[a] + (radii[a] + radii[c]) * direction * np.exp(1j * alpha)
                placed[c] = True
                progress = True
    if not placed.all():
        raise PackingError("Layout did not reach every circle")
    return centers


def _polish(
    centers: np.ndarray, radii: np.ndarray, edges: np.ndarray, fixed: Sequence[int]
) -> Tuple[np.ndarray, np.ndarray, float]:
    """Gauss-Newton on |c_i - c_j| = r_i + r_j over every triangulation edge.

    Radii in `fixed` stay put; rigid motions are left to the minimum-norm step.
    """
    total = len(radii)
    i_idx, j_idx = edges[:, 0], edges[:, 1]
    rows = np.arange(len(edges))
    free_idx = np.setdiff1d(np.arange(total), np.asarray(fixed))
    column = np.full(total, -1)
    column[free_idx] = 2 * total + np.arange(len(free_idx))
    xy = np.column_stack([centers.real, centers.imag])
    r = radii.astype(float).copy()
    best = (math.inf, xy.copy(), r.copy())
    for _ in range(POLISH_ROUNDS):
        diff = xy[i_idx] - xy[j_idx]
        dist = np.hypot(diff[:, 0], diff[:, 1])
        f = dist - (r[i_idx] + r[j_idx])
        err = float(np.max(np.abs(f)))
        if err < best[0]:
            best = (err, xy.copy(), r.copy())
        if err <= POLISH_TARGET * max(float(np.max(np.abs(xy))), float(np.max(r))):
            break
        u = diff / dist[:, None]
        jac = np.zeros((len(edges), 2 * total + len(free_idx)))
        jac[rows, 2 * i_idx], jac[rows, 2 * i_idx + 1] = u[:, 0], u[:, 1]
        jac[rows, 2 * j_idx], jac[rows, 2 * j_idx + 1] = -u[:, 0], -u[:, 1]
        for idx in (i_idx, j_idx):
            has = column[idx] >= 0
            jac[rows[has], column[idx][has]] = -1.0
        step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        xy = xy + step[:2 * total].reshape(total, 2)
        r[free_idx] += step[2 * total:]
    err, xy, r = best
    return xy[:, 0] + 1j * xy[:, 1], r, err


def _tangencies(g: Graph, centers: np.ndarray, radii: np.ndarray) -> Dict[Tuple[int, int], complex]:
    points = {}
    for i, j in g.edges():
        towards = centers[j] - centers[i]
        points[(i, j)] = complex(centers[i] + radii[i] * towards / abs(towards))
    return points


def pack(e: PlanarEmbedding, tol: Optional[float] = None) -> CirclePacking:
    """Koebe packing by angle-sum iteration; radii are normalized so the smallest is 1.

    The layout is refined by a few Gauss-Newton rounds on the tangency equations
    so errors placed triangle by triangle do not accumulate.
    """
    tol = tol if tol is not None else get_settings().pack_tol
    g = e.graph
    logger.info(f"🚀 Packing tangency graph n={g.n} edges={g.edge_count()}")

    if g.n <= 2:
        centers = np.array([0.0, 2.0][:g.n], dtype=complex)
        radii = np.ones(g.n)
        p = CirclePacking(centers, radii, _tangencies(g, centers, radii))
    else:
        total, triangles, boundary = _triangulate(e)
        logger.debug(f"Triangulated with {total - g.n} helper circles, {len(triangles)} triangles")
        radii, sweeps, residual = _solve_radii(total, np.array(triangles, dtype=np.int64), boundary)
        if residual >= ANGLE_TOL:
            if residual > tol:
                raise PackingError(f"Angle sums did not converge in {sweeps} sweeps", residual)
            logger.warning(f"⚠️ Angle residual {residual:.2e} above target after {sweeps} sweeps")
        centers = _layout(total, triangles, radii)
        scale = 1.0 / float(radii[:g.n].min())
        centers, radii = centers * scale, radii * scale
        if total <= POLISH_LIMIT:
            edges = sorted(
                {(min(a, b), max(a, b)) for t in triangles + [boundary] for a, b in zip(t, t[1:] + t[:1])}
            )
            centers, radii, err = _polish(centers, radii, np.array(edges, dtype=np.int64), boundary)
            logger.debug(f"Layout polished to tangency residual {err:.2e}")
        centers, radii = centers[:g.n], radii[:g.n]
        p = CirclePacking(centers, radii, _tangencies(g, centers, radii), sweeps, residual)

    report = check_packing(e, p, tol)
    if not report.ok:
        raise PackingError(f"Packing failed verification: {report.violations[0]}", report.max_tangency_residual)
    logger.info(
        f"✅ Packing converged after {p.sweeps} sweeps, tangency residual {report.max_tangency_residual:.2e}"
    )
    return p


def rescale(p: CirclePacking, factor: float) -> CirclePacking:
    if factor <= 0:
        raise InputError(f"Scale factor must be positive, got {factor}")
    tangency = {k: v * factor for k, v in p.tangency.items()}
    return CirclePacking(p.centers * factor, p.radii * factor, tangency, p.sweeps, p.angle_residual)


def min_gap_angle(p: CirclePacking) -> float:
    """Smallest angle at a center between cyclically consecutive tangency points.

    Circles with a single tangency have no consecutive pair and are skipped; if
    every circle is such, the result is capped at 1.
    """
    if not p.tangency:
        raise InputError("Packing has no tangencies")
    best = None
    for i in range(p.n):
        directions = sorted(
            math.atan2(t.imag - p.centers[i].imag, t.real - p.centers[i].real)
            for (a, b), t in p.tangency.items()
            if i in (a, b)
        )
        if len(directions) < 2:
            continue
        gaps = [hi - lo for lo, hi in zip(directions, directions[1:])]
        gaps.append(2 * math.pi - (directions[-1] - directions[0]))
        smallest = min(gaps)
        best = smallest if best is None else min(best, smallest)
    return 1.0 if best is None else best


def check_packing(e: PlanarEmbedding, p: CirclePacking, tol: float) -> PackingReport:
    """Re-validates a packing from raw coordinates."""
    g = e.graph
    report = PackingReport(ok=True)
    if p.n != g.n:
        report.violations.append(f"packing has {p.n} circles for {g.n} vertices")
        report.ok = False
        return report

    xy = [(float(c.real), float(c.imag)) for c in p.centers]
    r = [float(x) for x in p.radii]
    for i in range(g.n):
        if r[i] < 1.0 - tol:
            report.violations.append(f"radius of circle {i} is {r[i]:.6g} < 1")
    for i in range(g.n):
        for j in range(i + 1, g.n):
            distance = math.hypot(xy[i][0] - xy[j][0], xy[i][1] - xy[j][1])
            if g.has_edge(i, j):
                residual = abs(distance - (r[i] + r[j]))
                report.max_tangency_residual = max(report.max_tangency_residual, residual)
                if residual > tol:
                    report.violations.append(f"circles {i},{j} not tangent: residual {residual:.3e}")
                if (i, j) not in p.tangency:
                    report.violations.append(f"missing tangency point for edge {i}-{j}")
                    continue
                t = p.tangency[(i, j)]
                expected = (
                    xy[i][0] + r[i] * (xy[j][0] - xy[i][0]) / distance,
                    xy[i][1] + r[i] * (xy[j][1] - xy[i][1]) / distance,
                )
                if math.hypot(t.real - expected[0], t.imag - expected[1]) > tol:
                    report.violations.append(f"tangency point of {i}-{j} off the center segment")
            else:
                margin = distance - (r[i] + r[j])
                report.min_nonedge_margin = min(report.min_nonedge_margin, margin)
                if margin < MARGIN_FACTOR * tol:
                    report.violations.append(f"non-adjacent circles {i},{j} too close: margin {margin:.3e}")
    report.ok = not report.violations
    return report
