import json
import os

import pytest

from app.config import DEFAULT_GADGET_DIR
from app.errors import InputError
from app.gadgets import (
    BASE_SIZE,
    BLOCK_BITS,
    OPTIONAL_ORDER,
    SHAPES,
    GridRepresentation,
    PartitionCertificate,
    build_gadget_base,
    build_universal,
    check_grid_representation,
    contains_universal,
    find_gadget_for_type,
    first_mask_in_block,
    golden_paths,
    grid_string_search,
    is_orbit_minimal,
    gadget_vertex,
    legal_optional_edges,
    load_golden,
    mandatory_edges,
    mask_edges,
    optional_mask,
    save_golden,
    search_gadget,
    validate_certificate,
    verify_hub_pattern,
)
from app.graph import (
    Graph,
    complete_graph,
    cycle_graph,
    empty_graph,
    from_graph6,
    path_graph,
    relabel,
    to_graph6,
    to_mask,
)
from app.models import certificate_from_model, certificate_to_model


class TestGadgetBase:
    def test_labelling(self):
        assert gadget_vertex(1) == 0
        assert gadget_vertex(1, 2) == 5
        assert gadget_vertex(2, 1) == 5
        assert gadget_vertex(4, 5) == 14
        with pytest.raises(InputError):
            gadget_vertex(6)
        with pytest.raises(InputError):
            gadget_vertex(2, 2)

    def test_edge_sets(self):
        assert len(mandatory_edges()) == 20
        optional = legal_optional_edges()
        assert len(optional) == 30
        # v12 - v13 share index 1; v12 - v34 share none
        assert (5, 6) in optional
        assert (5, 12) not in optional

    def test_base_graph(self):
        g = build_gadget_base()
        assert g.n == BASE_SIZE and g.edge_count() == 20
        assert build_gadget_base(legal_optional_edges()).edge_count() == 50

    def test_rejects_illegal_optional_edge(self):
        with pytest.raises(InputError):
            build_gadget_base([(0, 1)])
        with pytest.raises(InputError):
            build_gadget_base([(5, 12)])


class TestHubWitness:
    def test_base_has_witness(self):
        w = verify_hub_pattern(build_gadget_base())
        assert w is not None
        assert w.hubs == (0, 1, 2, 3, 4)
        assert w.as_dict()["connectors"]["12"] == 5

    def test_all_optional_edges(self):
        assert verify_hub_pattern(build_gadget_base(legal_optional_edges())) is not None

    def test_relabelled_base(self):
        perm = list(reversed(range(BASE_SIZE)))
        w = verify_hub_pattern(relabel(build_gadget_base(), perm))
        assert w is not None and sorted(w.hubs) == [10, 11, 12, 13, 14]

    def test_no_witness(self, c5):
        assert verify_hub_pattern(c5) is None
        assert verify_hub_pattern(complete_graph(15)) is None

    def test_forbidden_connector_edge_breaks_pattern(self):
        base = build_gadget_base()
        # v12 - v34 is not a legal optional edge
        with_bad_edge = Graph.from_edges(base.n, base.edges() + [(5, 12)])
        assert verify_hub_pattern(with_bad_edge) is None


class TestCertificates:
    @pytest.mark.parametrize("tag", sorted(SHAPES))
    def test_golden_files_are_valid(self, tag):
        golden = load_golden(tag, DEFAULT_GADGET_DIR)
        assert golden is not None
        g, cert = golden
        assert validate_certificate(g, cert) == []
        assert verify_hub_pattern(g) is not None

    @pytest.mark.parametrize("tag", sorted(SHAPES))
    def test_golden_graph6_matches_edge_list(self, tag):
        g6_path, json_path = golden_paths(tag, DEFAULT_GADGET_DIR)
        with open(json_path, encoding="utf-8") as fh:
            data = json.load(fh)
        with open(g6_path, encoding="ascii") as fh:
            text = fh.read().strip()
        assert text == data["graph6"]
        assert from_graph6(text) == build_gadget_base(data["optional_edges"])
        assert data["kinds"] == list(SHAPES[tag])

    def test_reports_shape_problems(self):
        g = build_gadget_base()
        assert validate_certificate(g, PartitionCertificate("z", ())) == ["unknown partition type 'z'"]
        one_part = PartitionCertificate("a", (g.vertex_mask,))
        assert validate_certificate(g, one_part) == ["type a needs 2 parts, found 1"]
        swallowed = PartitionCertificate("a", (g.vertex_mask, 0))
        assert any("not a stable set" in p for p in validate_certificate(g, swallowed))

    def test_reports_missing_vertices(self):
        g = build_gadget_base()
        cert = PartitionCertificate("a", (to_mask(range(5)), to_mask(range(5, 14))))
        assert validate_certificate(g, cert) == ["parts miss vertices [14]"]

    def test_certificate_model(self):
        g, cert = load_golden("b", DEFAULT_GADGET_DIR)
        model = certificate_to_model(g, cert, verify_hub_pattern(g))
        assert model.optional_edges[0] == [5, 6]
        assert certificate_from_model(model) == (g, cert)


class TestGadgetSearch:
    @pytest.mark.parametrize("tag", ["a", "b"])
    def test_search_finds_valid_gadget(self, tag):
        g, cert = search_gadget(tag)
        assert validate_certificate(g, cert) == []
        assert verify_hub_pattern(g) is not None

    @pytest.mark.slow
    @pytest.mark.parametrize("tag", ["c", "d", "e"])
    def test_search_finds_valid_gadget_slow(self, tag):
        g, cert = search_gadget(tag)
        assert validate_certificate(g, cert) == []
        assert verify_hub_pattern(g) is not None

    def test_type_a_is_the_bare_base(self):
        g, cert = search_gadget("a")
        assert g == build_gadget_base()
        assert cert.parts == (to_mask(range(5)), to_mask(range(5, 15)))

    def test_parallel_blocks_match_sequential(self):
        assert search_gadget("a", jobs=2) == search_gadget("a")

    @pytest.mark.parametrize("tag", ["a", "b"])
    def test_found_mask_is_first_in_its_orbit(self, tag):
        g, _ = search_gadget(tag)
        mask = optional_mask(g)
        assert is_orbit_minimal(mask)
        assert build_gadget_base(mask_edges(mask)) == g

    @pytest.mark.slow
    def test_blocks_are_searched_in_mask_order(self):
        hits = [first_mask_in_block("b", block) for block in range(1 << BLOCK_BITS)]
        g, _ = search_gadget("b")
        assert optional_mask(g) == next(m for m in hits if m is not None)
        top = len(OPTIONAL_ORDER) - BLOCK_BITS
        for block, mask in enumerate(hits):
            assert mask is None or mask >> top == block

    def test_orbit_minimal_masks(self):
        # all legal optional edges form one orbit under index permutations
        assert is_orbit_minimal(0) and is_orbit_minimal(1)
        assert not is_orbit_minimal(1 << (len(OPTIONAL_ORDER) - 1))

    def test_unknown_type(self):
        with pytest.raises(InputError):
            search_gadget("f")
        with pytest.raises(InputError):
            find_gadget_for_type("f")

    def test_cache_round_trip(self, tmp_path):
        directory = str(tmp_path / "gadgets")
        assert load_golden("a", directory) is None
        g, cert = find_gadget_for_type("a", directory=directory)
        save_golden("a", g, cert, directory)
        assert all(os.path.exists(p) for p in golden_paths("a", directory))
        assert load_golden("a", directory) == (g, cert)

    def test_tampered_golden_is_ignored(self, tmp_path):
        directory = str(tmp_path)
        g, cert = load_golden("a", DEFAULT_GADGET_DIR)
        save_golden("a", g, cert, directory)
        g6_path, _ = golden_paths("a", directory)
        with open(g6_path, "w", encoding="ascii") as fh:
            fh.write(to_graph6(build_gadget_base([(5, 6)])) + "\n")
        assert load_golden("a", directory) is None


class TestGridSearch:
    @pytest.mark.parametrize(
        "g, k",
        [(complete_graph(3), 2), (cycle_graph(4), 3), (path_graph(4), 2), (empty_graph(1), 1)],
    )
    def test_finds_checked_representation(self, g, k):
        rep = grid_string_search(g, k)
        assert rep is not None
        assert check_grid_representation(g, rep) == []
        assert len(rep.curves) == g.n

    def test_too_few_cells_for_isolated_vertices(self):
        assert grid_string_search(empty_graph(2), 1) is None

    def test_budget(self):
        assert grid_string_search(complete_graph(3), 2, budget=0) is None

    def test_limits(self):
        with pytest.raises(InputError):
            grid_string_search(empty_graph(9), 3)
        with pytest.raises(InputError):
            grid_string_search(complete_graph(3), 6)

    def test_checker_rejects_bad_regions(self):
        g = complete_graph(2)
        apart = GridRepresentation(2, (frozenset({(0, 0)}), frozenset({(1, 1)})), (((0, 0),), ((1, 1),)))
        assert check_grid_representation(g, apart) == ["regions of 0 and 1 disagree with the graph"]
        split = GridRepresentation(2, (frozenset({(0, 0), (1, 1)}), frozenset({(0, 0)})), ((), ()))
        assert "region of vertex 0 is not connected" in check_grid_representation(g, split)


class TestUniversal:
    def test_build(self):
        u1 = build_universal(1)
        assert u1.n == 3 and u1.edge_count() == 1
        assert build_universal(0).n == 1
        for k in range(1, 5):
            assert build_universal(k).edge_count() == k * 2 ** (k - 1)

    def test_contains(self):
        assert contains_universal(build_universal(2), 2)
        assert contains_universal(build_universal(3), 2)
        assert not contains_universal(complete_graph(3), 2)
        assert not contains_universal(complete_graph(8), 2)

    def test_limits(self):
        with pytest.raises(InputError):
            build_universal(17)
        with pytest.raises(InputError):
            contains_universal(complete_graph(3), 4)
