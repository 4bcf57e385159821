import networkx as nx
import pytest
from hypothesis import given, strategies as st

from app.errors import Graph6Error, InputError
from app.graph import (
    Graph,
    GreatPartition,
    common_neighbors,
    complement,
    complete_graph,
    components,
    cycle_graph,
    disjoint_cliques,
    empty_graph,
    enumerate_labeled,
    from_graph6,
    from_networkx,
    graph_from_edge_mask,
    is_clique,
    is_two_clique_union,
    k5_minus_edge,
    members,
    pair_order,
    random_great_graph,
    read_graph6_lines,
    relabel,
    star_graph,
    to_graph6,
    to_mask,
    to_networkx,
    wheel_graph,
)
from app.partition import validate_great_partition
from tests.property_settings import QUICK_SETTINGS, STANDARD_SETTINGS


@st.composite
def graphs(draw, min_n: int = 1, max_n: int = 10):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    mask = draw(st.integers(min_value=0, max_value=(1 << (n * (n - 1) // 2)) - 1))
    return graph_from_edge_mask(n, mask)


class TestGraph6:
    def test_known_encodings(self):
        assert to_graph6(complete_graph(4)) == "C~"
        assert to_graph6(cycle_graph(5)) == "Dhc"
        assert to_graph6(empty_graph(0)) == "?"

    def test_header_and_newline_are_accepted(self):
        assert from_graph6(">>graph6<<Dhc\n") == cycle_graph(5)
        assert from_graph6(b"Dhc\r\n") == cycle_graph(5)

    @STANDARD_SETTINGS
    @given(graphs())
    def test_matches_networkx_encoder(self, g):
        expected = nx.to_graph6_bytes(to_networkx(g), header=False).decode().strip()
        assert to_graph6(g) == expected

    @STANDARD_SETTINGS
    @given(graphs())
    def test_decodes_what_networkx_reads(self, g):
        text = to_graph6(g)
        assert from_networkx(nx.from_graph6_bytes(text.encode())) == from_graph6(text)

    def test_large_vertex_count_header(self):
        g = star_graph(69)
        assert to_graph6(g).startswith("~?@E")
        assert from_graph6(to_graph6(g)) == g

    @pytest.mark.parametrize(
        "text, offset",
        [
            ("", 0),
            ("D", 1),
            ("D h", 1),
            ("D~~", 2),
            ("Dhc?", 3),
            ("D?é", 2),
            (b"D?\xe9", 2),
        ],
    )
    def test_malformed_input_reports_offset(self, text, offset):
        with pytest.raises(Graph6Error) as info:
            from_graph6(text)
        assert info.value.offset == offset
        assert f"at byte {offset}" in str(info.value)

    def test_graph6_error_is_an_input_error(self):
        with pytest.raises(InputError):
            from_graph6("D~~")

    def test_read_lines_skips_blank_lines(self):
        assert read_graph6_lines("C~\n\nDhc\n") == [complete_graph(4), cycle_graph(5)]


class TestGraphBasics:
    def test_rejects_asymmetric_adjacency(self):
        with pytest.raises(InputError):
            Graph(2, (0b10, 0))

    def test_rejects_loops_and_out_of_range(self):
        with pytest.raises(InputError):
            Graph.from_edges(3, [(1, 1)])
        with pytest.raises(InputError):
            Graph.from_edges(3, [(0, 3)])

    def test_edges_are_lexicographic(self):
        assert cycle_graph(4).edges() == [(0, 1), (0, 3), (1, 2), (2, 3)]

    def test_pair_order_is_column_major(self):
        assert pair_order(4) == [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]

    def test_constructors(self):
        assert k5_minus_edge().edge_count() == 9
        assert not k5_minus_edge().has_edge(3, 4)
        assert wheel_graph(4).edge_count() == 8
        assert wheel_graph(4).degree(0) == 4
        assert disjoint_cliques([3, 2]).edge_count() == 4

    def test_enumerate_labeled_counts(self):
        assert sum(1 for _ in enumerate_labeled(4)) == 64
        with pytest.raises(InputError):
            next(enumerate_labeled(7))

    @STANDARD_SETTINGS
    @given(graphs())
    def test_complement_is_an_involution(self, g):
        assert complement(complement(g)) == g
        assert g.edge_count() + complement(g).edge_count() == g.n * (g.n - 1) // 2

    @STANDARD_SETTINGS
    @given(graphs(max_n=8), st.randoms(use_true_random=False))
    def test_relabel_preserves_structure(self, g, rnd):
        perm = list(range(g.n))
        rnd.shuffle(perm)
        h = relabel(g, perm)
        assert h.edge_count() == g.edge_count()
        assert all(h.has_edge(perm[u], perm[v]) for u, v in g.edges())


class TestSetPredicates:
    def test_is_clique(self):
        g = complete_graph(4)
        assert is_clique(g, [0, 1, 2, 3])
        assert is_clique(g, 0)
        assert not is_clique(cycle_graph(4), [0, 2])

    def test_two_clique_union_splits_by_components(self):
        g = disjoint_cliques([2, 3])
        a, b = is_two_clique_union(g, g.vertex_mask)
        assert members(a) == [0, 1]
        assert members(b) == [2, 3, 4]

    def test_two_clique_union_accepts_a_clique_and_the_empty_set(self):
        assert is_two_clique_union(complete_graph(3), 0b111) == (0b111, 0)
        assert is_two_clique_union(complete_graph(3), 0) == (0, 0)

    def test_two_clique_union_rejects(self):
        assert is_two_clique_union(empty_graph(3), 0b111) is None
        assert is_two_clique_union(cycle_graph(4), 0b1111) is None

    @STANDARD_SETTINGS
    @given(graphs(max_n=12), st.integers(min_value=0, max_value=(1 << 12) - 1))
    def test_two_clique_union_matches_brute_force(self, g, raw):
        s = raw & g.vertex_mask
        vs = members(s)
        expected = any(
            is_clique(g, a) and is_clique(g, s & ~a) and not any(g.adj[v] & s & ~a for v in members(a))
            for a in (to_mask(v for k, v in enumerate(vs) if bits >> k & 1) for bits in range(1 << len(vs)))
        )
        split = is_two_clique_union(g, s)
        assert (split is not None) == expected
        if split is not None:
            a, b = split
            assert a | b == s and not a & b
            assert is_clique(g, a) and is_clique(g, b)
            assert not any(g.adj[v] & b for v in members(a))

    def test_components(self):
        g = disjoint_cliques([1, 2, 1])
        assert components(g, g.vertex_mask) == [0b1, 0b110, 0b1000]

    def test_common_neighbors(self):
        g = wheel_graph(4)
        assert members(common_neighbors(g, 1, 2)) == [0]
        with pytest.raises(InputError):
            common_neighbors(g, 2, 2)

    def test_subset_out_of_range(self):
        with pytest.raises(InputError):
            is_two_clique_union(complete_graph(3), to_mask([5]))


class TestRandomGreatGraph:
    @QUICK_SETTINGS
    @given(st.integers(min_value=0, max_value=40), st.integers(min_value=0, max_value=2**32))
    def test_generating_partition_is_great(self, n, seed):
        g, p = random_great_graph(n, seed=seed)
        assert validate_great_partition(g, p) == []
        assert sorted(p.sizes()) == sorted([n // 4 + (1 if k < n % 4 else 0) for k in range(4)])

    def test_same_seed_same_graph(self):
        assert random_great_graph(20, seed=5) == random_great_graph(20, seed=5)

    def test_unshuffled_parts_are_contiguous(self):
        _, p = random_great_graph(8, sizes=(2, 2, 2, 2), seed=1, shuffle=False)
        assert (p.x1, p.x2, p.x3, p.x4) == (0b11, 0b1100, 0b110000, 0b11000000)
        assert p.x4a >> 6 & 1

    def test_bad_sizes(self):
        with pytest.raises(InputError):
            random_great_graph(5, sizes=(1, 1, 1, 1))

    def test_partition_dict_round_trip(self):
        _, p = random_great_graph(12, seed=3)
        assert GreatPartition.from_dict(12, p.as_dict()) == p

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_cross_pairs_are_half_edges(self, seed):
        g, p = random_great_graph(64, seed=seed)
        label = {}
        for k, part in enumerate((p.x1, p.x2, p.x3, p.x4a, p.x4b)):
            for v in members(part):
                label[v] = min(k, 3)
        cross = [(u, v) for u, v in pair_order(64) if label[u] != label[v]]
        density = sum(g.has_edge(u, v) for u, v in cross) / len(cross)
        assert 0.45 <= density <= 0.55
