import math

import networkx as nx
import numpy as np
import pytest

from app.errors import InputError, PackingError
from app.graph import (
    Graph,
    complete_graph,
    cycle_graph,
    disjoint_cliques,
    empty_graph,
    k5_minus_edge,
    path_graph,
    star_graph,
    to_networkx,
)
from app.packing import (
    K5_MINUS_EDGE_OUTER,
    PlanarEmbedding,
    check_packing,
    k5_minus_edge_embedding,
    min_gap_angle,
    pack,
    rescale,
    wheel_embedding,
)

TOL = 1e-10


class TestEmbedding:
    def test_k5_minus_edge_faces(self):
        e = k5_minus_edge_embedding()
        assert len(e.faces()) == 6
        assert e.outer_face == K5_MINUS_EDGE_OUTER

    def test_from_graph_picks_longest_face(self):
        e = PlanarEmbedding.from_graph(cycle_graph(6))
        assert sorted(e.outer_face) == list(range(6))

    def test_non_planar(self):
        with pytest.raises(PackingError):
            PlanarEmbedding.from_graph(complete_graph(5))

    def test_disconnected(self):
        with pytest.raises(PackingError):
            PlanarEmbedding.from_graph(disjoint_cliques([2, 2]))

    def test_bad_rotation_fails_euler_check(self):
        g = complete_graph(4)
        # every vertex lists its neighbours in increasing order: not a planar rotation
        rotation = tuple(tuple(u for u in range(4) if u != v) for v in range(4))
        with pytest.raises(InputError):
            PlanarEmbedding(g, rotation, (0, 1, 2))

    def test_requested_outer_face_must_exist(self):
        with pytest.raises(InputError):
            PlanarEmbedding.from_graph(wheel_embedding(4).graph, outer_face=(1, 2, 3))


class TestPack:
    def test_k3_is_symmetric(self):
        p = pack(PlanarEmbedding.from_graph(complete_graph(3)))
        assert np.allclose(p.radii, 1.0, atol=1e-9)
        for i in range(3):
            for j in range(i + 1, 3):
                assert abs(abs(p.centers[i] - p.centers[j]) - 2.0) < 1e-9

    def test_k5_minus_edge_converges(self):
        e = k5_minus_edge_embedding()
        p = pack(e)
        report = check_packing(e, p, TOL)
        assert report.ok, report.violations
        assert report.max_tangency_residual < TOL
        assert report.min_nonedge_margin > 0
        assert min(p.radii) == pytest.approx(1.0)

    @pytest.mark.parametrize("k", [3, 4, 5, 6])
    def test_wheels(self, k):
        e = wheel_embedding(k)
        p = pack(e)
        assert check_packing(e, p, TOL).ok
        assert sorted(p.tangency) == e.graph.edges()

    def test_path_and_cycle(self):
        for g in (path_graph(4), cycle_graph(5)):
            e = PlanarEmbedding.from_graph(g)
            assert check_packing(e, pack(e), TOL).ok

    def test_k1_and_k2_closed_form(self):
        p1 = pack(PlanarEmbedding.from_graph(empty_graph(1)))
        assert p1.n == 1 and p1.radii[0] == 1.0
        p2 = pack(PlanarEmbedding.from_graph(complete_graph(2)))
        assert p2.tangency_point(1, 0) == complex(1.0, 0.0)

    def test_tangency_points_lie_on_both_circles(self):
        p = pack(k5_minus_edge_embedding())
        for (i, j), t in p.tangency.items():
            assert abs(abs(t - p.centers[i]) - p.radii[i]) < 1e-9
            assert abs(abs(t - p.centers[j]) - p.radii[j]) < 1e-9

    def test_touching(self):
        p = pack(k5_minus_edge_embedding())
        assert p.touching(3) == [0, 1, 2]


class TestPackingHelpers:
    def test_gap_angle_of_k3(self):
        p = pack(PlanarEmbedding.from_graph(complete_graph(3)))
        assert min_gap_angle(p) == pytest.approx(math.pi / 3, abs=1e-9)

    def test_gap_angle_needs_tangencies(self):
        with pytest.raises(InputError):
            min_gap_angle(pack(PlanarEmbedding.from_graph(empty_graph(1))))

    def test_gap_angle_capped_for_single_tangencies(self):
        assert min_gap_angle(pack(PlanarEmbedding.from_graph(complete_graph(2)))) == 1.0

    def test_gap_angle_is_scale_invariant(self):
        p = pack(k5_minus_edge_embedding())
        assert min_gap_angle(rescale(p, 3.5)) == pytest.approx(min_gap_angle(p), abs=1e-9)

    def test_rescale(self):
        p = pack(k5_minus_edge_embedding())
        q = rescale(p, 2.0)
        assert np.allclose(q.radii, 2.0 * p.radii)
        with pytest.raises(InputError):
            rescale(p, 0.0)

    @pytest.mark.parametrize("factor", [2.0, 3.0, 1e3])
    def test_checker_is_scale_invariant(self, factor):
        e = wheel_embedding(5)
        p = pack(e)
        base = check_packing(e, p, TOL)
        scaled = check_packing(e, rescale(p, factor), TOL * factor)
        assert scaled.ok and base.ok
        assert scaled.max_tangency_residual == pytest.approx(factor * base.max_tangency_residual, abs=1e-12 * factor)
        assert scaled.min_nonedge_margin == pytest.approx(factor * base.min_nonedge_margin)

    def test_checker_catches_moved_circle(self):
        e = k5_minus_edge_embedding()
        p = pack(e)
        p.centers[0] += 0.5
        report = check_packing(e, p, TOL)
        assert not report.ok
        assert any("not tangent" in v for v in report.violations)

    def test_checker_rejects_wrong_size(self):
        e = k5_minus_edge_embedding()
        p = pack(PlanarEmbedding.from_graph(complete_graph(3)))
        assert not check_packing(e, p, TOL).ok

    def test_k5_minus_edge_graph(self):
        assert k5_minus_edge_embedding().graph == k5_minus_edge()
        assert isinstance(k5_minus_edge_embedding().graph, Graph)


def _random_planar_graph(n: int, seed: int) -> Graph:
    """Random spanning tree plus extra edges kept only while the graph stays planar."""
    rng = np.random.default_rng(seed)
    edges = [(int(rng.integers(0, v)), v) for v in range(1, n)]
    for _ in range(int(rng.integers(0, 2 * n))):
        a, b = sorted(int(x) for x in rng.choice(n, size=2, replace=False))
        if (a, b) in edges:
            continue
        candidate = Graph.from_edges(n, edges + [(a, b)])
        if nx.check_planarity(to_networkx(candidate))[0]:
            edges.append((a, b))
    return Graph.from_edges(n, edges)


class TestRandomTangencyGraphs:
    @pytest.mark.parametrize("seed", range(20))
    def test_random_planar_graphs_pass_verification(self, seed):
        e = PlanarEmbedding.from_graph(_random_planar_graph(3 + seed % 7, seed))
        report = check_packing(e, pack(e), TOL)
        assert report.ok, report.violations

    @pytest.mark.parametrize("g", [star_graph(5), star_graph(8), path_graph(7), path_graph(9)])
    def test_stars_and_paths(self, g):
        e = PlanarEmbedding.from_graph(g)
        assert check_packing(e, pack(e), TOL).ok

    def test_pendant_vertices_on_a_triangle(self):
        g = Graph.from_edges(6, [(0, 4), (0, 5), (1, 2), (1, 4), (1, 5), (3, 4), (4, 5)])
        e = PlanarEmbedding.from_graph(g)
        report = check_packing(e, pack(e), TOL)
        assert report.max_tangency_residual < TOL
