import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from app.errors import Graph6Error, InputError

logger = logging.getLogger("canonconv.graph")

# A vertex set is a Python int used as a bitset: bit v set <=> v is a member.
# Python ints are unbounded, so the same code covers n <= 64 and the larger
# sampling experiments.
VertexSet = int
SetLike = Union[int, Iterable[int]]

GRAPH6_HEADER = ">>graph6<<"
EXHAUSTIVE_LIMIT = 6


# --------------------------
# Helper: bitset plumbing
# --------------------------
def to_mask(s: SetLike) -> VertexSet:
    if isinstance(s, int):
        return s
    mask = 0
    for v in s:
        mask |= 1 << v
    return mask


def iter_bits(mask: VertexSet) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def members(mask: VertexSet) -> List[int]:
    return list(iter_bits(mask))


def popcount(mask: VertexSet) -> int:
    return bin(mask).count("1")


def lowest(mask: VertexSet) -> int:
    return (mask & -mask).bit_length() - 1


def pair_order(n: int) -> List[Tuple[int, int]]:
    """Vertex pairs in graph6 column order: (0,1), (0,2), (1,2), (0,3), ..."""
    return [(i, j) for j in range(1, n) for i in range(j)]


# --------------------------
# Graph type
# --------------------------
@dataclass(frozen=True)
class Graph:
    n: int
    adj: Tuple[int, ...]

    def __post_init__(self):
        if self.n < 0 or len(self.adj) != self.n:
            raise InputError(f"Adjacency has {len(self.adj)} rows for n={self.n}")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.adj):
            if row >> v & 1:
                raise InputError(f"Loop at vertex {v}")
            if row & ~full:
                raise InputError(f"Vertex {v} has a neighbor outside 0..{self.n - 1}")
            for u in iter_bits(row):
                if not self.adj[u] >> v & 1:
                    raise InputError(f"Adjacency not symmetric on pair ({v}, {u})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"Edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise InputError(f"Loop at vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @property
    def vertex_mask(self) -> VertexSet:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def neighbors(self, v: int) -> VertexSet:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return popcount(self.adj[v])

    def edges(self) -> List[Tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in iter_bits(self.adj[u]) if u < v]

    def edge_count(self) -> int:
        return sum(popcount(row) for row in self.adj) // 2

    def check_subset(self, s: VertexSet) -> None:
        if s < 0 or s & ~self.vertex_mask:
            raise InputError(f"Vertex set {members(s) if s >= 0 else s} outside 0..{self.n - 1}")


@dataclass(frozen=True)
class GreatPartition:
    """Ordered parts X1, X2, X3 (cliques) and X4 = X4a + X4b (two cliques, no edge between)."""

    n: int
    x1: VertexSet
    x2: VertexSet
    x3: VertexSet
    x4a: VertexSet
    x4b: VertexSet

    @property
    def x4(self) -> VertexSet:
        return self.x4a | self.x4b

    def cliques(self) -> Tuple[VertexSet, VertexSet, VertexSet]:
        return (self.x1, self.x2, self.x3)

    def parts(self) -> Tuple[VertexSet, VertexSet, VertexSet, VertexSet]:
        return (self.x1, self.x2, self.x3, self.x4)

    def sizes(self) -> Tuple[int, int, int, int]:
        return tuple(popcount(p) for p in self.parts())

    def as_dict(self) -> Dict[str, List[int]]:
        return {
            "X1": members(self.x1),
            "X2": members(self.x2),
            "X3": members(self.x3),
            "X4a": members(self.x4a),
            "X4b": members(self.x4b),
        }

    @classmethod
    def from_dict(cls, n: int, data: Dict[str, Sequence[int]]) -> "GreatPartition":
        masks = [to_mask(data.get(key, ())) for key in ("X1", "X2", "X3", "X4a", "X4b")]
        return cls(n, *masks)


# --------------------------
# graph6 codec
# --------------------------
def _encode_n(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    if n <= 68719476735:
        return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))
    raise InputError(f"n={n} too large for graph6")


def to_graph6(g: Graph) -> str:
    bits = [1 if g.has_edge(i, j) else 0 for i, j in pair_order(g.n)]
    bits += [0] * (-len(bits) % 6)
    body = []
    for k in range(0, len(bits), 6):
        value = 0
        for b in bits[k:k + 6]:
            value = value << 1 | b
        body.append(chr(value + 63))
    return _encode_n(g.n) + "".join(body)


def _read_n(data: bytes, pos: int) -> Tuple[int, int]:
    def group(start: int, count: int) -> int:
        if start + count > len(data):
            raise Graph6Error("Truncated vertex-count field", len(data))
        value = 0
        for k in range(start, start + count):
            c = data[k]
            if not 63 <= c <= 126:
                raise Graph6Error(f"Byte {c!r} out of range 63..126", k)
            value = value << 6 | (c - 63)
        return value

    if pos >= len(data):
        raise Graph6Error("Empty graph6 text", pos)
    if data[pos] != 126:
        return group(pos, 1), pos + 1
    if pos + 1 < len(data) and data[pos + 1] == 126:
        return group(pos + 2, 6), pos + 8
    return group(pos + 1, 3), pos + 4


def from_graph6(text: Union[str, bytes]) -> Graph:
    """Decodes one graph6 line; a trailing newline and the optional header are accepted."""
    if isinstance(text, str):
        try:
            data = text.encode("ascii")
        except UnicodeEncodeError as exc:
            raise Graph6Error(f"Non-ASCII character {text[exc.start]!r}", exc.start) from exc
    else:
        data = bytes(text)
    if data.endswith(b"\r\n"):
        data = data[:-2]
    elif data.endswith(b"\n"):
        data = data[:-1]
    pos = len(GRAPH6_HEADER) if data.startswith(GRAPH6_HEADER.encode()) else 0
    n, pos = _read_n(data, pos)

    pairs = pair_order(n)
    needed = (len(pairs) + 5) // 6
    body = data[pos:pos + needed]
    if len(body) < needed:
        raise Graph6Error(f"Expected {needed} adjacency bytes, found {len(body)}", len(data))
    rows = [0] * n
    k = 0
    for offset, c in enumerate(body, start=pos):
        if not 63 <= c <= 126:
            raise Graph6Error(f"Byte {c!r} out of range 63..126", offset)
        value = c - 63
        for shift in range(5, -1, -1):
            bit = value >> shift & 1
            if k < len(pairs):
                if bit:
                    i, j = pairs[k]
                    rows[i] |= 1 << j
                    rows[j] |= 1 << i
            elif bit:
                raise Graph6Error("Non-zero padding bit", offset)
            k += 1
    if pos + needed != len(data):
        raise Graph6Error("Trailing garbage after adjacency data", pos + needed)
    return Graph(n, tuple(rows))


def read_graph6_lines(text: str) -> List[Graph]:
    return [from_graph6(line) for line in text.splitlines() if line.strip()]


# --------------------------
# Set predicates
# --------------------------
def is_clique(g: Graph, s: SetLike) -> bool:
    s = to_mask(s)
    g.check_subset(s)
    for v in iter_bits(s):
        if (s & ~(1 << v)) & ~g.adj[v]:
            return False
    return True


def components(g: Graph, s: VertexSet) -> List[VertexSet]:
    """Connected components of G[s], ordered by lowest vertex."""
    result = []
    rest = s
    while rest:
        comp = frontier = rest & -rest
        while frontier:
            reach = 0
            for v in iter_bits(frontier):
                reach |= g.adj[v]
            frontier = reach & rest & ~comp
            comp |= frontier
        result.append(comp)
        rest &= ~comp
    return result


def is_two_clique_union(g: Graph, s: SetLike) -> Optional[Tuple[VertexSet, VertexSet]]:
    """Splits s into cliques (A, B) with no edge between them; A holds the lowest vertex."""
    s = to_mask(s)
    g.check_subset(s)
    comps = components(g, s)
    if len(comps) > 2:
        return None
    if not all(is_clique(g, c) for c in comps):
        return None
    comps += [0] * (2 - len(comps))
    return comps[0], comps[1]


def common_neighbors(g: Graph, u: int, v: int) -> VertexSet:
    if u == v:
        raise InputError(f"common_neighbors needs two distinct vertices, got {u} twice")
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise InputError(f"Vertex out of range: ({u}, {v}) for n={g.n}")
    return g.adj[u] & g.adj[v] & ~(1 << u | 1 << v)


# --------------------------
# Constructors and transforms
# --------------------------
def empty_graph(n: int) -> Graph:
    return Graph(n, (0,) * n)


def complete_graph(n: int) -> Graph:
    full = (1 << n) - 1
    return Graph(n, tuple(full & ~(1 << v) for v in range(n)))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(v, (v + 1) % n) for v in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(v, v + 1) for v in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, v) for v in range(1, leaves + 1)])


def wheel_graph(k: int) -> Graph:
    """Hub 0 joined to the rim cycle 1..k."""
    rim = [(v, v % k + 1) for v in range(1, k + 1)]
    return Graph.from_edges(k + 1, [(0, v) for v in range(1, k + 1)] + rim)


def k5_minus_edge() -> Graph:
    """K5 without the edge {3, 4}."""
    return Graph.from_edges(5, [(i, j) for i, j in pair_order(5) if (i, j) != (3, 4)])


def disjoint_cliques(sizes: Sequence[int]) -> Graph:
    edges = []
    start = 0
    for size in sizes:
        edges += [(start + i, start + j) for j in range(size) for i in range(j)]
        start += size
    return Graph.from_edges(start, edges)


def complement(g: Graph) -> Graph:
    full = g.vertex_mask
    return Graph(g.n, tuple(full & ~row & ~(1 << v) for v, row in enumerate(g.adj)))


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Vertex v of g becomes perm[v]."""
    if sorted(perm) != list(range(g.n)):
        raise InputError("relabel needs a permutation of 0..n-1")
    return Graph.from_edges(g.n, [(perm[u], perm[v]) for u, v in g.edges()])


def graph_from_edge_mask(n: int, mask: int) -> Graph:
    rows = [0] * n
    for k, (i, j) in enumerate(pair_order(n)):
        if mask >> k & 1:
            rows[i] |= 1 << j
            rows[j] |= 1 << i
    return Graph(n, tuple(rows))


def enumerate_labeled(n: int) -> Iterator[Graph]:
    """All 2^C(n,2) labeled graphs on n vertices, in edge-mask order."""
    if n < 0 or n > EXHAUSTIVE_LIMIT:
        raise InputError(f"Exhaustive enumeration supports n <= {EXHAUSTIVE_LIMIT}, got {n}")
    total = 1 << (n * (n - 1) // 2)
    for mask in range(total):
        yield graph_from_edge_mask(n, mask)


def to_networkx(g: Graph) -> nx.Graph:
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.n))
    nxg.add_edges_from(g.edges())
    return nxg


def from_networkx(nxg: nx.Graph) -> Graph:
    nodes = sorted(nxg.nodes())
    index = {v: k for k, v in enumerate(nodes)}
    return Graph.from_edges(len(nodes), [(index[u], index[v]) for u, v in nxg.edges()])


# --------------------------
# Random great graphs
# --------------------------
def as_rng(seed: Union[int, np.random.Generator, np.random.SeedSequence, None]) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def balanced_sizes(n: int) -> Tuple[int, int, int, int]:
    base, extra = divmod(n, 4)
    return tuple(base + (1 if k < extra else 0) for k in range(4))


def _mask_from_row(row: np.ndarray) -> int:
    return int.from_bytes(np.packbits(row.astype(np.uint8), bitorder="little").tobytes(), "little")


def random_great_graph(
    n: int,
    sizes: Optional[Sequence[int]] = None,
    seed: Union[int, np.random.Generator, None] = None,
    shuffle: bool = True,
) -> Tuple[Graph, GreatPartition]:
    """Samples a graph together with the great partition it was generated from.

    X1..X3 are complete, X4 is split uniformly among its 2^(|X4|-1) two-clique
    shapes, and every pair between different parts is an independent fair coin.
    """
    sizes = tuple(sizes) if sizes is not None else balanced_sizes(n)
    if len(sizes) != 4 or any(s < 0 for s in sizes) or sum(sizes) != n:
        raise InputError(f"Part sizes {sizes} do not describe 4 parts summing to n={n}")
    rng = as_rng(seed)

    order = rng.permutation(n) if shuffle else np.arange(n)
    labels = np.empty(n, dtype=np.int64)
    start = 0
    for part, size in enumerate(sizes):
        labels[order[start:start + size]] = part
        start += size

    x4 = np.sort(order[start - sizes[3]:start]) if sizes[3] else np.empty(0, dtype=np.int64)
    if len(x4):
        side = rng.integers(0, 2, size=len(x4))
        side[0] = 0
        labels[x4] = 3 + side

    coins = np.triu(rng.random((n, n)) < 0.5, 1)
    coins = coins | coins.T
    same = labels[:, None] == labels[None, :]
    split_x4 = (labels[:, None] >= 3) & (labels[None, :] >= 3) & ~same
    adj = np.where(same, True, coins) & ~split_x4
    np.fill_diagonal(adj, False)

    g = Graph(n, tuple(_mask_from_row(adj[v]) for v in range(n)))
    part_masks = [to_mask(np.flatnonzero(labels == k).tolist()) for k in range(5)]
    logger.debug(f"Sampled great graph n={n} sizes={sizes} edges={g.edge_count()}")
    return g, GreatPartition(n, *part_masks)
