import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planardual.bijection import EdgeBijection
from planardual.chains import GeometricDualPair
from planardual.corpus import connected_multigraphs, planar_maps
from planardual.errors import BadPDCode, DisconnectedCheckerboard, DisconnectedPrimal, NotA2Isomorphism, UnknownVertex
from planardual.graphcore import MultiGraph
from planardual.knot import (
    Crossing,
    LinkDiagram,
    checkerboard,
    diagram_chain,
    diagram_from_signed_gdp,
    goeritz,
    shared_checkerboard,
)
from planardual.matroid import is_graph_isomorphism

from _graphs import bouquet, cycle, dipole, emb, leibniz_det, mg, path
from _knots import TREFOIL, diagram_pairs

MAPS5 = [e for e in planar_maps(5) if e.graph.n_edges >= 1]


def trefoil():
    return LinkDiagram.from_pd(TREFOIL)


class TestDiagram:
    def test_arc_count(self):
        with pytest.raises(BadPDCode):
            LinkDiagram.from_pd([(1, 2, 3, 4)])

    def test_bad_sign(self):
        with pytest.raises(BadPDCode):
            Crossing((1, 1, 2, 2), 3)

    def test_non_spherical(self):
        # arcs glued so that the 4-valent map has genus one
        with pytest.raises(BadPDCode):
            checkerboard(LinkDiagram.from_pd([(1, 2, 1, 2)]))


class TestCheckerboard:
    def test_trefoil(self):
        p = checkerboard(trefoil())
        graphs = {g.n_vertices: g for g in p.graphs}
        tri, dip = graphs[3], graphs[2]
        assert is_graph_isomorphism(tri.unsigned(), cycle(3))
        assert is_graph_isomorphism(dip.unsigned(), dipole(3))
        assert len(set(tri.signs.values())) == 1 and len(set(dip.signs.values())) == 1
        assert set(tri.signs.values()) != set(dip.signs.values())

    def test_opposite_signs_and_edge_count(self):
        p = checkerboard(trefoil())
        assert p.shaded.n_edges == p.unshaded.n_edges == 3
        for i, (a, b) in p.crossing_map.items():
            assert p.shaded.signs[a] == -p.unshaded.signs[b]

    def test_kink(self):
        p = checkerboard(LinkDiagram.from_pd([(1, 1, 2, 2)]))
        kinds = sorted((g.n_vertices, g.is_loop(0)) for g in p.graphs)
        assert kinds == [(1, True), (2, False)]
        assert p.shaded.signs[0] == -p.unshaded.signs[0]

    def test_empty(self):
        p = checkerboard(LinkDiagram(()))
        assert all(g.n_vertices == 1 and g.n_edges == 0 for g in p.graphs)

    def test_recolouring_swaps(self):
        d = trefoil()
        a, b = checkerboard(d), checkerboard(d, swap=True)
        assert a.shaded == b.unshaded and a.unshaded == b.shaded

    def test_sign_flip(self):
        d = trefoil()
        a, b = checkerboard(d), checkerboard(d.mirror_signs())
        assert all(b.unshaded.signs[e] == -s for e, s in a.unshaded.signs.items())


class TestMedial:
    def test_triangle(self):
        g = mg([(0, 1), (1, 2), (2, 0)], signs=[-1, -1, -1])
        d = diagram_from_signed_gdp(GeometricDualPair.from_embedding(emb(g)))
        assert d.n_crossings == 3
        p = checkerboard(d)
        dual = mg([(0, 1)] * 3, signs=[1, 1, 1])
        assert any(is_graph_isomorphism(x, g, respect_signs=True) for x in p.graphs)
        assert any(is_graph_isomorphism(x, dual, respect_signs=True) for x in p.graphs)

    def test_loop_and_bridge(self):
        for g in (bouquet(1), path(1)):
            d = diagram_from_signed_gdp(emb(g.with_signs({0: 1})))
            assert d.n_crossings == 1
            p = checkerboard(d)
            assert any(is_graph_isomorphism(x, g.with_signs({0: 1}), respect_signs=True) for x in p.graphs)

    def test_disconnected(self):
        g = MultiGraph(range(4), {0: (0, 1), 1: (2, 3)}, {0: 1, 1: 1})
        from planardual.embed import Embedding

        with pytest.raises(DisconnectedPrimal):
            diagram_from_signed_gdp(Embedding(g, {0: [0], 1: [1], 2: [2], 3: [3]}))

    @settings(max_examples=80, deadline=None)
    @given(st.sampled_from(MAPS5), st.randoms(use_true_random=False))
    def test_round_trip(self, e, rnd):
        g = e.graph.with_signs({x: rnd.choice((1, -1)) for x in e.graph.edges})
        from planardual.embed import Embedding, geometric_dual

        e = Embedding(g, e.rotation)
        d = diagram_from_signed_gdp(e)
        p = checkerboard(d)
        dual = geometric_dual(e).graph
        got = sorted(p.graphs, key=lambda x: x.n_vertices != g.n_vertices)
        ok1 = is_graph_isomorphism(p.shaded, g, True) and is_graph_isomorphism(p.unshaded, dual, True)
        ok2 = is_graph_isomorphism(p.unshaded, g, True) and is_graph_isomorphism(p.shaded, dual, True)
        assert ok1 or ok2, got


class TestGoeritz:
    def test_triangle(self):
        g = mg([(0, 1), (1, 2), (2, 0)], signs=[-1, -1, -1])
        for v in g.vertices:
            m = goeritz(g, v)
            # off-diagonal = -(sum of signs) = +1; rows sum to zero
            assert m.reduced.tolist() == [[-2, 1], [1, -2]]
            assert m.determinant == 3 == leibniz_det(m.reduced)

    def test_trefoil(self):
        for g in checkerboard(trefoil()).graphs:
            m = goeritz(g, g.vertices[0])
            assert abs(leibniz_det(m.reduced)) == 3 == abs(m.determinant)

    def test_loop_and_edgeless(self):
        assert goeritz(bouquet(1).with_signs({0: 1}), 0).unreduced.tolist() == [[0]]
        m = goeritz(MultiGraph([0, 1], {}, {}), 0)
        assert m.unreduced.tolist() == [[0, 0], [0, 0]]

    def test_unknown_vertex(self):
        with pytest.raises(UnknownVertex):
            goeritz(cycle(3).with_signs({0: 1, 1: 1, 2: 1}), 9)

    @settings(max_examples=80, deadline=None)
    @given(st.sampled_from(connected_multigraphs(5)), st.randoms(use_true_random=False))
    def test_invariants_and_relabelling(self, g, rnd):
        g = g.with_signs({e: rnd.choice((1, -1)) for e in g.edges})
        m = goeritz(g, g.vertices[0])
        u = m.unreduced
        assert (u == u.T).all() and (u.sum(axis=1) == 0).all()
        vs = list(g.vertices)
        rnd.shuffle(vs)
        h = g.relabel(dict(zip(g.vertices, vs)))
        r = is_graph_isomorphism(g, h, respect_signs=True)
        drop = r.vertex_map[g.vertices[0]]
        mh = goeritz(h, drop)
        order = [list(h.vertices).index(r.vertex_map[v]) for v in g.vertices]
        assert (mh.unreduced[np.ix_(order, order)] == u).all()
        assert mh.determinant == m.determinant


class TestDiagramChain:
    def test_identity_is_empty(self):
        d = trefoil()
        g = checkerboard(d).unshaded
        assert diagram_chain(d, d, EdgeBijection.identity(g)) == []

    def test_sign_mismatch(self):
        d = trefoil()
        g = checkerboard(d).unshaded
        d2 = d.mirror_signs()
        g2 = checkerboard(d2).unshaded
        with pytest.raises(NotA2Isomorphism):
            diagram_chain(d, d2, EdgeBijection(g, g2, {e: e for e in g.edges}))

    def test_disconnected_checkerboard(self):
        # two split kinks: one checkerboard graph is two disjoint bridges
        d = LinkDiagram.from_pd([(1, 1, 2, 2), (3, 3, 4, 4)])
        p = checkerboard(d)
        assert p.shaded.n_vertices == 4 and p.unshaded.n_vertices == 1
        with pytest.raises(DisconnectedCheckerboard):
            diagram_chain(d, d, EdgeBijection.identity(p.unshaded))

    @pytest.mark.parametrize("case", range(6))
    def test_constructed_pairs(self, case):
        d, d2, f = diagram_pairs(6, seed=1)[case]
        chain = diagram_chain(d, d2, f)
        seq = [d, *chain, d2]
        assert chain
        for a, b in zip(seq, seq[1:]):
            assert shared_checkerboard(a, b)
