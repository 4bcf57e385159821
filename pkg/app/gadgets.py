import json
import logging
import os
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from app.config import get_settings
from app.errors import DefectError, InputError
from app.graph import Graph, from_graph6, is_clique, iter_bits, members, popcount, to_graph6, to_mask
from app.workers import map_ordered

logger = logging.getLogger("canonconv.gadgets")

# Hubs v1..v5 are vertices 0..4; connector v_ij (i < j) follows in this order.
HUB_COUNT = 5
CONNECTOR_PAIRS = tuple((i, j) for i in range(1, 6) for j in range(i + 1, 6))
BASE_SIZE = HUB_COUNT + len(CONNECTOR_PAIRS)

GRID_NODE_BUDGET = 20000
GRID_MAX_VERTICES = 8
GRID_MAX_SIZE = 5
UNIVERSAL_BUILD_LIMIT = 16
UNIVERSAL_CHECK_LIMIT = 3

# Part kinds per partition type; identical consecutive kinds are interchangeable.
SHAPES: Dict[str, Tuple[str, ...]] = {
    "a": ("stable10", "stable10"),
    "b": ("clique5", "clique5", "clique5", "clique5", "single"),
    "c": ("clique5", "clique5", "clique5", "stable3"),
    "d": ("clique5", "clique5", "clique5", "path3"),
    "e": ("clique5", "clique5", "point_clique3", "point_clique3"),
}


# --------------------------
# Helper: base graph labelling
# --------------------------
def gadget_vertex(i: int, j: Optional[int] = None) -> int:
    """Vertex of hub v_i (1-based), or of connector v_ij when j is given."""
    if j is None:
        if not 1 <= i <= HUB_COUNT:
            raise InputError(f"Hub index {i} outside 1..5")
        return i - 1
    pair = (min(i, j), max(i, j))
    if pair not in CONNECTOR_PAIRS:
        raise InputError(f"No connector for indices {i}, {j}")
    return HUB_COUNT + CONNECTOR_PAIRS.index(pair)


def mandatory_edges() -> List[Tuple[int, int]]:
    edges = []
    for i, j in CONNECTOR_PAIRS:
        c = gadget_vertex(i, j)
        edges += [(gadget_vertex(i), c), (gadget_vertex(j), c)]
    return edges


def legal_optional_edges() -> List[Tuple[int, int]]:
    """Connector pairs (v_ij, v_ik) sharing exactly one index."""
    pairs = []
    for (a, pa), (b, pb) in combinations(enumerate(CONNECTOR_PAIRS), 2):
        if len(set(pa) & set(pb)) == 1:
            pairs.append((HUB_COUNT + a, HUB_COUNT + b))
    return pairs


_MANDATORY = frozenset(mandatory_edges())
_OPTIONAL = frozenset(legal_optional_edges())


def _pair(u: int, v: int) -> Tuple[int, int]:
    return (u, v) if u < v else (v, u)


def build_gadget_base(optional_edges: Iterable[Tuple[int, int]] = ()) -> Graph:
    optional = {_pair(u, v) for u, v in optional_edges}
    illegal = sorted(optional - _OPTIONAL)
    if illegal:
        raise InputError(f"Optional edges {illegal} do not join connectors sharing an index")
    return Graph.from_edges(BASE_SIZE, sorted(_MANDATORY | optional))


@dataclass(frozen=True)
class HubWitness:
    hubs: Tuple[int, ...]
    connectors: Dict[Tuple[int, int], int]

    def as_dict(self) -> Dict:
        return {
            "hubs": list(self.hubs),
            "connectors": {f"{i}{j}": v for (i, j), v in sorted(self.connectors.items())},
        }


def verify_hub_pattern(g: Graph) -> Optional[HubWitness]:
    """Finds 15 vertices inducing the base pattern plus legal optional edges.

    A witness proves g is not a string graph; no witness proves nothing.
    """
    if g.n < BASE_SIZE:
        return None

    def independent_sets(start: int, chosen: List[int], forbidden: int):
        if len(chosen) == HUB_COUNT:
            yield tuple(chosen)
            return
        for v in range(start, g.n):
            if forbidden >> v & 1:
                continue
            yield from independent_sets(v + 1, chosen + [v], forbidden | g.adj[v])

    for hubs in independent_sets(0, [], 0):
        hub_mask = to_mask(hubs)
        by_neighbourhood: Dict[int, List[int]] = {}
        for v in range(g.n):
            if not hub_mask >> v & 1:
                by_neighbourhood.setdefault(g.adj[v] & hub_mask, []).append(v)
        options = []
        for i, j in CONNECTOR_PAIRS:
            key = 1 << hubs[i - 1] | 1 << hubs[j - 1]
            options.append(by_neighbourhood.get(key, []))
        if not all(options):
            continue
        chosen = _pick_connectors(g, options)
        if chosen is not None:
            return HubWitness(hubs, dict(zip(CONNECTOR_PAIRS, chosen)))
    return None


def _pick_connectors(g: Graph, options: List[List[int]]) -> Optional[List[int]]:
    picked: List[int] = []

    def extend(k: int) -> bool:
        if k == len(options):
            return True
        pair = CONNECTOR_PAIRS[k]
        for v in options[k]:
            clash = any(
                g.has_edge(v, u) for u, other in zip(picked, CONNECTOR_PAIRS) if not set(pair) & set(other)
            )
            if clash:
                continue
            picked.append(v)
            if extend(k + 1):
                return True
            picked.pop()
        return False

    return picked if extend(0) else None


# --------------------------
# Partition certificates
# --------------------------
@dataclass(frozen=True)
class PartitionCertificate:
    type_tag: str
    parts: Tuple[int, ...]

    def as_dict(self) -> Dict:
        return {
            "type": self.type_tag,
            "kinds": list(SHAPES[self.type_tag]),
            "parts": [members(p) for p in self.parts],
        }


def _is_stable(g: Graph, s: int) -> bool:
    return all(not (g.adj[v] & s) for v in iter_bits(s))


def _point_plus_clique(g: Graph, s: int) -> bool:
    for x in iter_bits(s):
        rest = s & ~(1 << x)
        if not g.adj[x] & rest and is_clique(g, rest) and popcount(rest) <= 3:
            return True
    return False


def _part_problem(g: Graph, kind: str, s: int) -> Optional[str]:
    size = popcount(s)
    if kind == "clique5" and not (is_clique(g, s) and size <= 5):
        return "is not a clique of size at most 5"
    if kind == "stable10" and not (_is_stable(g, s) and size <= 10):
        return "is not a stable set of size at most 10"
    if kind == "single" and size != 1:
        return "is not a single vertex"
    if kind == "stable3" and not (_is_stable(g, s) and size == 3):
        return "is not a stable set of size 3"
    if kind == "path3":
        inner = sum(popcount(g.adj[v] & s) for v in iter_bits(s)) // 2
        if size != 3 or inner != 2:
            return "is not an induced path on three vertices"
    if kind == "point_clique3" and not _point_plus_clique(g, s):
        return "is not a point plus a clique of size at most 3"
    return None


def validate_certificate(g: Graph, cert: PartitionCertificate) -> List[str]:
    """Independent shape check of a partition certificate."""
    if cert.type_tag not in SHAPES:
        return [f"unknown partition type {cert.type_tag!r}"]
    kinds = SHAPES[cert.type_tag]
    if len(cert.parts) != len(kinds):
        return [f"type {cert.type_tag} needs {len(kinds)} parts, found {len(cert.parts)}"]
    problems = []
    union = 0
    for k, part in enumerate(cert.parts):
        if union & part:
            problems.append(f"part {k} overlaps earlier parts")
        union |= part
        issue = _part_problem(g, kinds[k], part)
        if issue:
            problems.append(f"part {k} {members(part)} {issue}")
    if union != g.vertex_mask:
        problems.append(f"parts miss vertices {members(g.vertex_mask & ~union)}")
    return problems


# --------------------------
# Gadget search
# --------------------------
# Bit k of an optional-edge mask is OPTIONAL_ORDER[k]; masks are searched in
# increasing integer order, so the top bit is decided first.
OPTIONAL_ORDER = tuple(legal_optional_edges())
_OPTIONAL_BIT = {e: k for k, e in enumerate(OPTIONAL_ORDER)}
_ALL_OPTIONAL = (1 << len(OPTIONAL_ORDER)) - 1
BLOCK_BITS = 3


def optional_mask(g: Graph) -> int:
    return sum(1 << k for k, (u, v) in enumerate(OPTIONAL_ORDER) if g.has_edge(u, v))


def mask_edges(mask: int) -> List[Tuple[int, int]]:
    return [OPTIONAL_ORDER[k] for k in iter_bits(mask)]


@lru_cache(maxsize=1)
def _index_permutations() -> Tuple[Tuple[int, ...], ...]:
    """Every permutation of the indices 1..5, acting on optional-edge bits."""
    images = []
    for perm in permutations(range(1, HUB_COUNT + 1)):
        move = {gadget_vertex(i, j): gadget_vertex(perm[i - 1], perm[j - 1]) for i, j in CONNECTOR_PAIRS}
        images.append(tuple(_OPTIONAL_BIT[_pair(move[u], move[v])] for u, v in OPTIONAL_ORDER))
    return tuple(images)


def _permute_mask(mask: int, image: Tuple[int, ...]) -> int:
    return sum(1 << image[k] for k in iter_bits(mask))


def is_orbit_minimal(mask: int) -> bool:
    return all(_permute_mask(mask, image) >= mask for image in _index_permutations())


def _canonical_state(present: int, absent: int) -> Tuple[int, int]:
    return min((_permute_mask(present, image), _permute_mask(absent, image)) for image in _index_permutations())


@dataclass(frozen=True)
class _EdgeState:
    """Optional edges decided present or absent; the others are still open."""

    present: int = 0
    absent: int = 0

    def can(self, u: int, v: int) -> bool:
        e = _pair(u, v)
        if e in _MANDATORY:
            return True
        k = _OPTIONAL_BIT.get(e)
        return k is not None and not self.absent >> k & 1

    def must(self, u: int, v: int) -> bool:
        e = _pair(u, v)
        if e in _MANDATORY:
            return True
        k = _OPTIONAL_BIT.get(e)
        return k is not None and bool(self.present >> k & 1)

    def decide(self, k: int, present: bool) -> "_EdgeState":
        if present:
            return _EdgeState(self.present | 1 << k, self.absent)
        return _EdgeState(self.present, self.absent | 1 << k)


def _partial_ok(kind: str, part: List[int], v: int, state: _EdgeState) -> bool:
    size = len(part) + 1
    if kind == "clique5":
        return size <= 5 and all(state.can(u, v) for u in part)
    if kind in ("stable10", "stable3"):
        return size <= (10 if kind == "stable10" else 3) and not any(state.must(u, v) for u in part)
    if kind == "single":
        return size <= 1
    if kind == "path3":
        return size <= 3 and (size < 3 or _path_centre(part + [v], state) is not None)
    if kind == "point_clique3":
        return size <= 4 and _point_split(part + [v], False, state) is not False
    raise InputError(f"Unknown part kind {kind!r}")


def _path_centre(part: List[int], state: _EdgeState) -> Optional[int]:
    for c in part:
        x, y = [u for u in part if u != c]
        if state.can(c, x) and state.can(c, y) and not state.must(x, y):
            return c
    return None


def _point_split(part: List[int], final: bool, state: _EdgeState):
    """Point of a point-plus-clique part: a vertex, None (not chosen yet), or False."""
    for x in part:
        rest = [u for u in part if u != x]
        if len(rest) <= 3 and not any(state.must(x, u) for u in rest) and all(
            state.can(a, b) for a, b in combinations(rest, 2)
        ):
            return x
    if not final and len(part) <= 3 and all(state.can(a, b) for a, b in combinations(part, 2)):
        return None
    return False


def _parts_complete(kinds: Sequence[str], parts: List[List[int]], state: _EdgeState) -> bool:
    for kind, part in zip(kinds, parts):
        if kind == "single" and len(part) != 1:
            return False
        if kind == "stable3" and len(part) != 3:
            return False
        if kind == "path3" and (len(part) != 3 or _path_centre(part, state) is None):
            return False
        if kind == "point_clique3":
            point = _point_split(part, True, state) if part else False
            if point is False or point is None:
                return False
    return True


def _find_parts(kinds: Sequence[str], state: _EdgeState) -> Optional[List[List[int]]]:
    """Partition of the base vertices into `kinds` for some completion of `state`.

    Open edges inside clique-like parts can be added and open edges elsewhere
    dropped, so a partition here means a fitting mask exists. Interchangeable
    parts open in order.
    """
    parts: List[List[int]] = [[] for _ in kinds]

    def place(v: int) -> bool:
        if v == BASE_SIZE:
            return _parts_complete(kinds, parts, state)
        for k, kind in enumerate(kinds):
            if k > 0 and kinds[k - 1] == kind and not parts[k - 1]:
                continue
            if not _partial_ok(kind, parts[k], v, state):
                continue
            parts[k].append(v)
            if place(v + 1):
                return True
            parts[k].pop()
        return False

    return [list(p) for p in parts] if place(0) else None


@lru_cache(maxsize=None)
def _feasible_up_to_symmetry(tag: str, present: int, absent: int) -> bool:
    return _find_parts(SHAPES[tag], _EdgeState(present, absent)) is not None


def _feasible(tag: str, state: _EdgeState) -> bool:
    return _feasible_up_to_symmetry(tag, *_canonical_state(state.present, state.absent))


def first_mask_in_block(tag: str, block: int) -> Optional[int]:
    """Lexicographically first fitting mask whose top BLOCK_BITS bits read `block`."""
    top = len(OPTIONAL_ORDER) - 1
    state = _EdgeState()
    for offset in range(BLOCK_BITS):
        state = state.decide(top - offset, bool(block >> (BLOCK_BITS - 1 - offset) & 1))
    if not _feasible(tag, state):
        return None
    for k in range(top - BLOCK_BITS, -1, -1):
        trial = state.decide(k, False)
        state = trial if _feasible(tag, trial) else state.decide(k, True)
    return state.present


def search_gadget(tag: str, jobs: int = 1) -> Tuple[Graph, PartitionCertificate]:
    """First optional-edge mask, in increasing order, whose graph has a partition of type `tag`.

    Feasibility of a partly decided mask is cached per orbit under the index
    permutations, which preserve the base. With jobs > 1 the blocks of the top
    BLOCK_BITS bits run in parallel and the first block with a hit wins.
    """
    if tag not in SHAPES:
        raise InputError(f"Unknown partition type {tag!r}; expected one of {sorted(SHAPES)}")
    logger.info(f"🔍 Searching gadget of type {tag} over {1 << len(OPTIONAL_ORDER)} optional-edge masks")
    blocks = [(tag, b) for b in range(1 << BLOCK_BITS)]
    if jobs == 1:
        hits = (first_mask_in_block(*task) for task in blocks)
    else:
        hits = iter(map_ordered(first_mask_in_block, blocks, jobs))
    mask = next((m for m in hits if m is not None), None)
    if mask is None:
        raise DefectError(f"No gadget of type {tag} exists over the {BASE_SIZE}-vertex base")

    parts = _find_parts(SHAPES[tag], _EdgeState(mask, _ALL_OPTIONAL & ~mask))
    g = build_gadget_base(mask_edges(mask))
    cert = PartitionCertificate(tag, tuple(to_mask(p) for p in parts or []))
    problems = validate_certificate(g, cert)
    if problems or verify_hub_pattern(g) is None or not is_orbit_minimal(mask):
        raise DefectError(f"Gadget search for type {tag} returned an invalid result: {problems}")
    logger.info(f"✅ Found gadget of type {tag} with {popcount(mask)} optional edges (mask {mask:#x})")
    return g, cert


def golden_paths(tag: str, directory: Optional[str] = None) -> Tuple[str, str]:
    directory = directory or get_settings().gadget_dir
    return os.path.join(directory, f"type_{tag}.g6"), os.path.join(directory, f"type_{tag}.json")


def load_golden(tag: str, directory: Optional[str] = None) -> Optional[Tuple[Graph, PartitionCertificate]]:
    g6_path, json_path = golden_paths(tag, directory)
    if not (os.path.exists(g6_path) and os.path.exists(json_path)):
        return None
    with open(g6_path, "r", encoding="ascii") as fh:
        g = from_graph6(fh.read().strip())
    with open(json_path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    cert = PartitionCertificate(data["type"], tuple(to_mask(p) for p in data["parts"]))
    if cert.type_tag != tag:
        logger.warning(f"⚠️ Golden file {json_path} holds type {cert.type_tag}, expected {tag}")
        return None
    if build_gadget_base(data.get("optional_edges", [])) != g:
        logger.warning(f"⚠️ Golden graph {g6_path} does not match its optional edge list")
        return None
    problems = validate_certificate(g, cert)
    if problems or verify_hub_pattern(g) is None:
        logger.warning(f"⚠️ Golden gadget {tag} failed re-validation: {problems or 'no base pattern witness'}")
        return None
    return g, cert


def save_golden(tag: str, g: Graph, cert: PartitionCertificate, directory: Optional[str] = None) -> None:
    g6_path, json_path = golden_paths(tag, directory)
    os.makedirs(os.path.dirname(g6_path), exist_ok=True)
    optional = sorted(e for e in g.edges() if e in _OPTIONAL)
    with open(g6_path, "w", encoding="ascii") as fh:
        fh.write(to_graph6(g) + "\n")
    payload = {"type": tag, "graph6": to_graph6(g), "optional_edges": [list(e) for e in optional]}
    payload.update(cert.as_dict())
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    logger.info(f"💾 Saved golden gadget {tag} to {g6_path}")


def find_gadget_for_type(
    tag: str, use_cache: bool = True, directory: Optional[str] = None, jobs: int = 1
) -> Tuple[Graph, PartitionCertificate]:
    if tag not in SHAPES:
        raise InputError(f"Unknown partition type {tag!r}; expected one of {sorted(SHAPES)}")
    if use_cache:
        golden = load_golden(tag, directory)
        if golden is not None:
            logger.info(f"📦 Loaded golden gadget of type {tag}")
            return golden
    return search_gadget(tag, jobs)


# --------------------------
# Grid certificates for string graphs
# --------------------------
@dataclass(frozen=True)
class GridRepresentation:
    k: int
    regions: Tuple[FrozenSet[Tuple[int, int]], ...]
    curves: Tuple[Tuple[Tuple[int, int], ...], ...]

    def as_dict(self) -> Dict:
        return {
            "k": self.k,
            "regions": [sorted(list(c) for c in region) for region in self.regions],
            "curves": [[list(c) for c in curve] for curve in self.curves],
        }


class _BudgetExceeded(Exception):
    pass


def _grid_neighbours(k: int) -> List[List[int]]:
    result = []
    for cell in range(k * k):
        r, c = divmod(cell, k)
        around = [(r - 1, c), (r, c - 1), (r, c + 1), (r + 1, c)]
        result.append([rr * k + cc for rr, cc in around if 0 <= rr < k and 0 <= cc < k])
    return result


def _walk(region: int, nbrs: List[List[int]], k: int) -> Tuple[Tuple[int, int], ...]:
    start = (region & -region).bit_length() - 1
    seen = {start}
    walk = [start]

    def visit(cell: int) -> None:
        for nxt in nbrs[cell]:
            if region >> nxt & 1 and nxt not in seen:
                seen.add(nxt)
                walk.append(nxt)
                visit(nxt)
                walk.append(cell)

    visit(start)
    return tuple(divmod(cell, k) for cell in walk)


def grid_string_search(g: Graph, k: int, budget: int = GRID_NODE_BUDGET) -> Optional[GridRepresentation]:
    """Connected regions of the k x k grid, one per vertex, meeting exactly along edges of g.

    Each uncovered edge is covered by growing both endpoints along shortest
    compatible paths to a common cell. Success proves g is a string graph.
    """
    if g.n > GRID_MAX_VERTICES or not 1 <= k <= GRID_MAX_SIZE:
        raise InputError(f"Grid search supports n <= {GRID_MAX_VERTICES} and 1 <= k <= {GRID_MAX_SIZE}")
    cells = k * k
    nbrs = _grid_neighbours(k)
    occupants = [0] * cells
    region = [0] * g.n
    edges = g.edges()
    nodes = 0

    def compatible(cell: int, v: int) -> bool:
        return not (occupants[cell] & ~(1 << v) & ~g.adj[v])

    def path_to(v: int, target: int) -> Optional[List[int]]:
        if region[v] >> target & 1:
            return []
        if not compatible(target, v):
            return None
        if not region[v]:
            return [target]
        parent = {c: None for c in iter_bits(region[v])}
        queue = deque(sorted(parent))
        while queue:
            cell = queue.popleft()
            for nxt in nbrs[cell]:
                if nxt in parent or not compatible(nxt, v):
                    continue
                parent[nxt] = cell
                if nxt == target:
                    path = []
                    while not region[v] >> nxt & 1:
                        path.append(nxt)
                        nxt = parent[nxt]
                    return path[::-1]
                queue.append(nxt)
        return None

    def apply(v: int, path: List[int]) -> None:
        for cell in path:
            occupants[cell] |= 1 << v
            region[v] |= 1 << cell

    def undo(v: int, path: List[int]) -> None:
        for cell in path:
            occupants[cell] &= ~(1 << v)
            region[v] &= ~(1 << cell)

    def moves(u: int, v: int) -> List[Tuple[int, int, int, List[int], List[int]]]:
        options = []
        seen = set()
        for target in range(cells):
            for a, b in ((u, v), (v, u)):
                first = path_to(a, target)
                if first is None:
                    continue
                apply(a, first)
                second = path_to(b, target)
                undo(a, first)
                if second is None:
                    continue
                key = (a, frozenset(first), b, frozenset(second))
                if key in seen:
                    continue
                seen.add(key)
                options.append((len(first) + len(second), target, a, first, b, second))
        options.sort(key=lambda o: (o[0], o[1], o[2]))
        return [(a, b, target, first, second) for _, target, a, first, b, second in options]

    def place_isolated() -> bool:
        placed = []
        for v in range(g.n):
            if region[v]:
                continue
            free = next((c for c in range(cells) if not occupants[c]), None)
            if free is None:
                for w, cell in placed:
                    undo(w, [cell])
                return False
            apply(v, [free])
            placed.append((v, free))
        return True

    def search() -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise _BudgetExceeded()
        pending = next(((u, v) for u, v in edges if not region[u] & region[v]), None)
        if pending is None:
            return place_isolated()
        for a, b, _, first, second in moves(*pending):
            apply(a, first)
            apply(b, second)
            if search():
                return True
            undo(b, second)
            undo(a, first)
        return False

    try:
        found = search()
    except _BudgetExceeded:
        logger.info(f"Grid search hit the node budget ({budget}) for n={g.n}, k={k}")
        return None
    if not found:
        return None
    regions = tuple(frozenset(divmod(c, k) for c in iter_bits(r)) for r in region)
    curves = tuple(_walk(r, nbrs, k) for r in region)
    logger.info(f"✅ Grid representation found on a {k}x{k} grid after {nodes} nodes")
    return GridRepresentation(k, regions, curves)


def check_grid_representation(g: Graph, rep: GridRepresentation) -> List[str]:
    problems = []
    if len(rep.regions) != g.n:
        return [f"{len(rep.regions)} regions for {g.n} vertices"]
    for v, region in enumerate(rep.regions):
        if not region:
            problems.append(f"vertex {v} has an empty region")
            continue
        if any(not (0 <= r < rep.k and 0 <= c < rep.k) for r, c in region):
            problems.append(f"vertex {v} leaves the grid")
        start = min(region)
        reached = {start}
        queue = deque([start])
        while queue:
            r, c = queue.popleft()
            for nxt in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                if nxt in region and nxt not in reached:
                    reached.add(nxt)
                    queue.append(nxt)
        if reached != set(region):
            problems.append(f"region of vertex {v} is not connected")
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if bool(rep.regions[u] & rep.regions[v]) != g.has_edge(u, v):
                problems.append(f"regions of {u} and {v} disagree with the graph")
    return problems


# --------------------------
# Universal bipartite graphs
# --------------------------
def build_universal(k: int) -> Graph:
    """Left vertices 0..k-1; right vertex k + A is adjacent to i exactly when i is in A."""
    if not 0 <= k <= UNIVERSAL_BUILD_LIMIT:
        raise InputError(f"U(k) generation supports 0 <= k <= {UNIVERSAL_BUILD_LIMIT}, got {k}")
    edges = [(i, k + subset) for subset in range(1 << k) for i in range(k) if subset >> i & 1]
    return Graph.from_edges(k + (1 << k), edges)


def contains_universal(g: Graph, k: int) -> bool:
    """Disjoint A, B with the bipartite graph between them isomorphic to U(k)."""
    if not 0 <= k <= UNIVERSAL_CHECK_LIMIT:
        raise InputError(f"U(k) containment supports 0 <= k <= {UNIVERSAL_CHECK_LIMIT}, got {k}")
    if g.n < k + (1 << k):
        return False
    for left in combinations(range(g.n), k):
        left_mask = to_mask(left)
        traces = set()
        for v in range(g.n):
            if left_mask >> v & 1:
                continue
            trace = 0
            for pos, u in enumerate(left):
                if g.has_edge(u, v):
                    trace |= 1 << pos
            traces.add(trace)
        if len(traces) == 1 << k:
            return True
    return False
