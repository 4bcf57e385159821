import logging
import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from app.errors import InputError
from app.graph import (
    Graph,
    GreatPartition,
    VertexSet,
    common_neighbors,
    components,
    is_clique,
    is_two_clique_union,
    iter_bits,
    lowest,
    members,
    popcount,
)

logger = logging.getLogger("canonconv.partition")

EXACT_COUNT_LIMIT = 16
RS_LIMIT = 6
WITNESS_CAP = 25


@dataclass(frozen=True)
class RSColoring:
    """First s classes are cliques, the remaining r - s are stable sets."""

    r: int
    s: int
    classes: Tuple[VertexSet, ...]


@dataclass
class PStarReport:
    holds: bool
    failures: List[Tuple[str, Tuple[int, ...]]]
    failure_counts: Dict[str, int]
    threshold: int
    n: int

    def as_dict(self) -> Dict:
        return {
            "holds": self.holds,
            "threshold": self.threshold,
            "n": self.n,
            "failure_counts": dict(self.failure_counts),
            "failures": [{"condition": c, "witness": list(w)} for c, w in self.failures],
        }


def common_neighbor_threshold(n: int) -> int:
    """ceil(13n/32), used as 'at least' for same-part pairs and strict bound across parts."""
    return -(-13 * n // 32)


# --------------------------
# Validators
# --------------------------
def validate_great_partition(g: Graph, p: GreatPartition) -> List[str]:
    """Independent check of every GreatPartition invariant; returns the violations."""
    problems = []
    sets = {"X1": p.x1, "X2": p.x2, "X3": p.x3, "X4a": p.x4a, "X4b": p.x4b}
    union = 0
    for name, s in sets.items():
        if s < 0 or s >> g.n:
            problems.append(f"{name} has vertices outside 0..{g.n - 1}")
            continue
        if union & s:
            problems.append(f"{name} overlaps an earlier part on {members(union & s)}")
        union |= s
    if union != g.vertex_mask:
        problems.append(f"parts miss vertices {members(g.vertex_mask & ~union)}")
    if problems:
        return problems
    for name, s in sets.items():
        for u in iter_bits(s):
            for v in iter_bits(s):
                if u < v and not g.has_edge(u, v):
                    problems.append(f"{name} is not a clique: {u} and {v} are not adjacent")
    for u in iter_bits(p.x4a):
        for v in iter_bits(p.x4b):
            if g.has_edge(u, v):
                problems.append(f"edge {min(u, v)}-{max(u, v)} runs between X4a and X4b")
    return problems


def validate_rs_coloring(g: Graph, c: RSColoring) -> List[str]:
    problems = []
    if len(c.classes) != c.r:
        problems.append(f"expected {c.r} classes, found {len(c.classes)}")
    union = 0
    for k, cls in enumerate(c.classes):
        if union & cls:
            problems.append(f"class {k} overlaps earlier classes")
        union |= cls
        for u in iter_bits(cls):
            for v in iter_bits(cls):
                if u < v and g.has_edge(u, v) != (k < c.s):
                    kind = "clique" if k < c.s else "stable set"
                    problems.append(f"class {k} is not a {kind} on pair {u}-{v}")
    if union != g.vertex_mask:
        problems.append(f"classes miss vertices {members(g.vertex_mask & ~union)}")
    return problems


def is_almost_balanced(p: GreatPartition, slack: int = 1) -> bool:
    """'Almost equal size': the four parts differ in size by at most `slack`."""
    sizes = p.sizes()
    return max(sizes) - min(sizes) <= slack


# --------------------------
# Great partition search
# --------------------------
def find_great_partition(g: Graph) -> Optional[GreatPartition]:
    """Branch-and-bound over X1, X2, X3, X4a, X4b.

    Vertices are placed in index order. Clique parts only open in order (a vertex
    may enter X2 only once X1 is non-empty, X3 only once X2 is), and X4b opens
    only after X4a, which makes the output deterministic and symmetry-free.
    """
    n = g.n
    adj = g.adj
    parts = [0, 0, 0, 0, 0]

    def place(v: int) -> bool:
        if v == n:
            return True
        bit = 1 << v
        nv = adj[v]
        for k in range(5):
            if k in (1, 2, 4) and parts[k - 1] == 0:
                continue
            if parts[k] & ~nv:
                continue
            if k == 3 and parts[4] & nv:
                continue
            if k == 4 and parts[3] & nv:
                continue
            parts[k] |= bit
            if place(v + 1):
                return True
            parts[k] &= ~bit
        return False

    if not place(0):
        return None
    return GreatPartition(n, *parts)


def is_great(g: Graph) -> bool:
    return find_great_partition(g) is not None


def find_rs_coloring(g: Graph, r: int, s: int) -> Optional[RSColoring]:
    """Exact backtracking for an (r,s)-coloring: s cliques then r - s stable sets."""
    if not (0 <= s <= r <= RS_LIMIT):
        raise InputError(f"(r, s) = ({r}, {s}) outside 0 <= s <= r <= {RS_LIMIT}")
    n = g.n
    adj = g.adj
    classes = [0] * r

    def place(v: int) -> bool:
        if v == n:
            return True
        bit = 1 << v
        for k in range(r):
            first_of_kind = k == 0 or k == s
            if not first_of_kind and classes[k - 1] == 0:
                continue
            if k < s:
                if classes[k] & ~adj[v]:
                    continue
            elif classes[k] & adj[v]:
                continue
            classes[k] |= bit
            if place(v + 1):
                return True
            classes[k] &= ~bit
        return False

    if not place(0):
        return None
    return RSColoring(r, s, tuple(classes))


def is_rs_colorable(g: Graph, r: int, s: int) -> bool:
    return find_rs_coloring(g, r, s) is not None


# --------------------------
# Counting
# --------------------------
def _count_three_clique_partitions(g: Graph, rest: VertexSet, cache: Dict[VertexSet, int]) -> int:
    """Ordered (X1, X2, X3) clique partitions of `rest`, empty parts allowed.

    These are exactly the proper 3-colourings of the complement of G[rest]; the
    count factors over the complement's components.
    """
    total = 1
    full = g.vertex_mask
    comp_adj = {v: (full & ~g.adj[v] & ~(1 << v)) & rest for v in iter_bits(rest)}
    remaining = rest
    while remaining:
        comp = frontier = remaining & -remaining
        while frontier:
            reach = 0
            for v in iter_bits(frontier):
                reach |= comp_adj[v]
            frontier = reach & remaining & ~comp
            comp |= frontier
        remaining &= ~comp
        if comp not in cache:
            cache[comp] = _count_colourings(members(comp), comp_adj)
        total *= cache[comp]
        if total == 0:
            return 0
    return total


def _count_colourings(order: List[int], comp_adj: Dict[int, int]) -> int:
    colour = {}

    def extend(k: int) -> int:
        if k == len(order):
            return 1
        v = order[k]
        count = 0
        for c in range(3):
            if any(colour.get(u) == c for u in iter_bits(comp_adj[v])):
                continue
            colour[v] = c
            count += extend(k + 1)
            del colour[v]
        return count

    # colour symmetry: fix the first vertex, multiply by 3
    colour[order[0]] = 0
    result = 3 * extend(1)
    return result


def _count_exact(g: Graph) -> int:
    n = g.n
    cache: Dict[VertexSet, int] = {}
    total = 0

    def grow(v: int, x4: VertexSet) -> None:
        nonlocal total
        if v == n:
            total += _count_three_clique_partitions(g, g.vertex_mask & ~x4, cache)
            return
        grow(v + 1, x4)
        candidate = x4 | 1 << v
        if is_two_clique_union(g, candidate) is not None:
            grow(v + 1, candidate)

    grow(0, 0)
    return total


def _ordered_tuples(g: Graph, unordered: Sequence[VertexSet]) -> List[Tuple[VertexSet, ...]]:
    """All orderings of four disjoint sets that form a great partition of g."""
    valid = []
    for order in permutations(range(4)):
        x1, x2, x3, x4 = (unordered[k] for k in order)
        if not (is_clique(g, x1) and is_clique(g, x2) and is_clique(g, x3)):
            continue
        if is_two_clique_union(g, x4) is None:
            continue
        valid.append((x1, x2, x3, x4))
    return valid


def _single_vertex_moves(parts: Tuple[VertexSet, ...], n: int) -> Iterable[Tuple[VertexSet, ...]]:
    for src in range(4):
        for v in iter_bits(parts[src]):
            for dst in range(4):
                if dst == src:
                    continue
                moved = list(parts)
                moved[src] &= ~(1 << v)
                moved[dst] |= 1 << v
                yield tuple(moved)


def _count_candidates(g: Graph, hints: Sequence[GreatPartition]) -> int:
    seeds = list(hints)
    recovered = reconstruct_by_common_neighbors(g)
    if recovered is not None:
        seeds.append(recovered)
    if not seeds:
        return 0

    found = set()
    examined = set()
    for p in seeds:
        base = p.parts()
        for candidate in [base, *_single_vertex_moves(base, g.n)]:
            key = tuple(sorted(candidate))
            if key in examined:
                continue
            examined.add(key)
            found.update(_ordered_tuples(g, candidate))
    logger.debug(f"Candidate count examined {len(examined)} unordered candidates, found {len(found)} tuples")
    return len(found)


def count_great_partitions(
    g: Graph,
    mode: str = "exact",
    hints: Sequence[GreatPartition] = (),
) -> int:
    """Number of ordered great partitions (X1, X2, X3, X4); the X4 split is not a multiplicity.

    `exact` enumerates every X4 and counts clique partitions of the remainder
    (n <= 16). `candidates` counts only tuples reachable from the recovered
    partition, and from any `hints`, by reordering parts and moving one vertex.
    """
    if mode == "exact":
        if g.n > EXACT_COUNT_LIMIT:
            raise InputError(f"Exact counting supports n <= {EXACT_COUNT_LIMIT}, got {g.n}")
        return _count_exact(g)
    if mode == "candidates":
        return _count_candidates(g, hints)
    raise InputError(f"Unknown counting mode {mode!r}")


def graphs_admitting_partition(sizes: Sequence[int]) -> int:
    """Labeled graphs for which a fixed ordered partition with these part sizes is great.

    Pairs between parts are free; G[X4] has 2^(|X4|-1) two-clique shapes.
    """
    if len(sizes) != 4 or any(s < 0 for s in sizes):
        raise InputError(f"Need four non-negative part sizes, got {sizes}")
    n = sum(sizes)
    cross = math.comb(n, 2) - sum(math.comb(s, 2) for s in sizes)
    return 2 ** cross * 2 ** max(sizes[3] - 1, 0)


# --------------------------
# P* conditions
# --------------------------
def _forms_induced_path(g: Graph, v: int, part: VertexSet) -> bool:
    """True iff v and two vertices of `part` induce a path on three vertices."""
    nv = g.adj[v]
    for a in iter_bits(part):
        others = part & ~(1 << a)
        if nv >> a & 1:
            if others & (nv ^ g.adj[a]):
                return True
        elif others & nv & g.adj[a]:
            return True
    return False


def pstar_check(g: Graph, p: GreatPartition, witness_cap: int = WITNESS_CAP) -> PStarReport:
    problems = validate_great_partition(g, p)
    if problems:
        raise InputError(f"pstar_check needs a valid great partition: {problems[0]}")
    n = g.n
    threshold = common_neighbor_threshold(n)
    counts = {"a": 0, "b": 0, "c": 0, "d": 0}
    failures: List[Tuple[str, Tuple[int, ...]]] = []

    def fail(condition: str, witness: Tuple[int, ...]) -> None:
        counts[condition] += 1
        if counts[condition] <= witness_cap:
            failures.append((condition, witness))

    elements = list(p.parts())
    label = [0] * n
    for k, part in enumerate(elements):
        for v in iter_bits(part):
            label[v] = k
    clique_elements = [k for k, part in enumerate(elements) if k < 3 or is_clique(g, part)]

    for u in range(n):
        for v in range(u + 1, n):
            shared = popcount(common_neighbors(g, u, v))
            if label[u] == label[v]:
                if label[u] in clique_elements and shared < threshold:
                    fail("a", (u, v))
            elif shared >= threshold:
                fail("b", (u, v))

    for k, part in enumerate(elements):
        for v in range(n):
            if not part >> v & 1 and not _forms_induced_path(g, v, part):
                fail("c", (k + 1, v))

    if is_clique(g, p.x4):
        fail("d", tuple(members(p.x4)))

    holds = not any(counts.values())
    return PStarReport(holds=holds, failures=failures, failure_counts=counts, threshold=threshold, n=n)


# --------------------------
# Reconstruction from common neighbours
# --------------------------
def _finish_partition(g: Graph, cliques: List[VertexSet]) -> Optional[GreatPartition]:
    cliques = sorted(cliques, key=lambda c: lowest(c))
    cliques += [0] * (3 - len(cliques))
    taken = cliques[0] | cliques[1] | cliques[2]
    if not all(is_clique(g, c) for c in cliques):
        return None
    split = is_two_clique_union(g, g.vertex_mask & ~taken)
    if split is None:
        return None
    p = GreatPartition(g.n, cliques[0], cliques[1], cliques[2], split[0], split[1])
    return p if not validate_great_partition(g, p) else None


def _threshold_clusters(g: Graph) -> List[VertexSet]:
    threshold = common_neighbor_threshold(g.n)
    relation = [0] * g.n
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if popcount(common_neighbors(g, u, v)) >= threshold:
                relation[u] |= 1 << v
                relation[v] |= 1 << u
    closure = Graph(g.n, tuple(relation))
    clusters = [c for c in components(closure, g.vertex_mask) if popcount(c) > 1]
    clusters.sort(key=lambda c: (-popcount(c), lowest(c)))
    return clusters[:3]


def _greedy_clique(g: Graph, seed: int) -> VertexSet:
    clique = 1 << seed
    pool = g.adj[seed]
    while pool:
        best = max(iter_bits(pool), key=lambda v: (popcount(g.adj[v] & pool), -v))
        clique |= 1 << best
        pool &= g.adj[best]
    return clique


def _clique_core_partition(g: Graph) -> Optional[GreatPartition]:
    grown = {_greedy_clique(g, v) for v in range(g.n)}
    chosen: List[VertexSet] = []
    for c in sorted(grown, key=lambda c: (-popcount(c), lowest(c))):
        if len(chosen) == 3:
            break
        if all(not (c & other) for other in chosen):
            chosen.append(c)
    return _finish_partition(g, chosen)


def reconstruct_by_common_neighbors(g: Graph) -> Optional[GreatPartition]:
    """Recovers a great partition from common-neighbour counts.

    First clusters the relation "at least ceil(13n/32) common neighbours" by
    transitive closure. When that does not validate (at moderate n the
    threshold sits inside the spread of cross-part counts and clusters merge),
    falls back to greedy clique cores grown from every vertex.
    """
    if g.n == 0:
        return GreatPartition(0, 0, 0, 0, 0, 0)
    p = _finish_partition(g, _threshold_clusters(g))
    if p is not None:
        logger.debug("Threshold clustering recovered a great partition")
        return p
    p = _clique_core_partition(g)
    if p is not None:
        logger.debug("Clique-core growth recovered a great partition")
    return p
