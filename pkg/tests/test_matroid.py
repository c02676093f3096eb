from collections import defaultdict
from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planardual.bijection import EdgeBijection, compose
from planardual.corpus import connected_multigraphs
from planardual.errors import TooLarge
from planardual.graphcore import MultiGraph, components, induced_vertex_map, one_point_union
from planardual.matroid import (
    count_maximal_forests,
    find_2_isomorphism,
    find_abstract_duality,
    is_2_isomorphism,
    is_abstract_duality,
    is_graph_isomorphism,
    iter_maximal_forests,
)

from _graphs import bouquet, bowtie, cycle, dipole, k4, mg, path

CORPUS5 = connected_multigraphs(5)


def forests(g):
    """Maximal forests by brute force (independent of the rank kernels)."""
    r = g.n_vertices - len(components(g))
    out = set()
    for c in combinations(g.edges, r):
        h = g.edge_subgraph(c, keep_vertices=True)
        if len(components(h)) == g.n_vertices - r:
            out.add(frozenset(c))
    return out


def oracle_maps(g, h, dual):
    """All 2-isomorphisms (or abstract dualities) g -> h, as image tuples over sorted edges."""
    fg, fh = forests(g), forests(h)
    eg, eh = list(g.edges), list(h.edges)
    if dual:
        fh = {frozenset(eh) - f for f in fh}
    out = []
    for p in permutations(eh):
        m = dict(zip(eg, p))
        if {frozenset(m[e] for e in f) for f in fg} == fh:
            out.append(p)
    return out


class TestChecks:
    def test_spec_examples(self):
        c3, d3 = cycle(3), dipole(3)
        assert is_abstract_duality(EdgeBijection(c3, d3, {0: 0, 1: 1, 2: 2}))
        assert not is_abstract_duality(EdgeBijection.identity(c3))
        assert is_abstract_duality(EdgeBijection(bouquet(1), path(1), {0: 0}))
        assert is_2_isomorphism(EdgeBijection(bowtie(0), bowtie(1), {i: i for i in range(6)}))
        bridge = mg([(0, 1), (1, 2), (2, 2)])
        assert not any(is_2_isomorphism(EdgeBijection(c3, bridge, dict(enumerate(p)))) for p in permutations(range(3)))
        assert not is_2_isomorphism(EdgeBijection(c3, d3, {0: 0, 1: 1, 2: 2}))

    def test_too_large(self):
        g = cycle(30)
        with pytest.raises(TooLarge):
            is_2_isomorphism(EdgeBijection.identity(g))

    def test_forest_iteration_and_count(self):
        for g in CORPUS5:
            fs = set(iter_maximal_forests(g))
            assert fs == forests(g)
            assert count_maximal_forests(g) == len(fs)

    def test_large_path_agrees_with_definition(self):
        # above the exhaustive-table limit: forests plus Kirchhoff counts
        a = cycle(9)
        b = cycle(9).relabel(edge_map={i: i + 9 for i in range(9)})
        g = one_point_union([a, b], [0, 0])
        h = one_point_union([a, b], [0, 4])
        ident = {e: e for e in g.edges}
        assert is_2_isomorphism(EdgeBijection(g, h, ident))
        mixed = dict(ident)
        mixed[0], mixed[9] = 9, 0
        mixed[1], mixed[10] = 10, 1
        f = EdgeBijection(g, g, mixed)
        want = {frozenset(mixed[e] for e in F) for F in iter_maximal_forests(g)} == set(iter_maximal_forests(g))
        assert is_2_isomorphism(f) == want
        # a non-2-isomorphism: swap a cycle edge with nothing equivalent
        c = cycle(17)
        d = MultiGraph(range(2), {i: (0, 1) for i in range(17)})
        assert is_abstract_duality(EdgeBijection(c, d, {i: i for i in range(17)}))
        assert not is_2_isomorphism(EdgeBijection(c, d, {i: i for i in range(17)}))


class TestSearchOracle:
    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
    def test_matches_exhaustive(self, m):
        graphs = [g for g in CORPUS5 if g.n_edges == m]
        for g in graphs:
            for h in graphs:
                for dual, finder in ((False, find_2_isomorphism), (True, find_abstract_duality)):
                    want = oracle_maps(g, h, dual)
                    got = finder(g, h)
                    if not want:
                        assert got is None, (g, h, dual)
                        continue
                    assert got is not None, (g, h, dual)
                    assert tuple(got.mapping[e] for e in g.edges) == min(want)

    def test_examples(self):
        assert find_2_isomorphism(cycle(3), cycle(3)).is_identity()
        assert find_2_isomorphism(cycle(3), dipole(3)) is None
        assert find_abstract_duality(cycle(3), dipole(3)) is not None
        assert find_abstract_duality(cycle(3), cycle(3)) is None
        assert find_abstract_duality(path(2), bouquet(2)) is not None

    def test_whitney_twist(self):
        # two 4-cycles glued on vertices {0, 2}, then reglued with the second one flipped
        g = mg([(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 2), (2, 5), (5, 0)])
        h = mg([(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (4, 0), (0, 5), (5, 2)])
        f = find_2_isomorphism(g, h)
        assert f is not None and is_2_isomorphism(f)
        assert tuple(f.mapping[e] for e in g.edges) == min(oracle_maps(g, h, False))

    def test_signed(self):
        g = mg([(0, 1), (1, 2), (2, 0)], signs=[1, 1, -1])
        h = mg([(0, 1), (1, 2), (2, 0)], signs=[-1, 1, 1])
        f = find_2_isomorphism(g, h, signed=True)
        assert f is not None and all(h.signs[f.mapping[e]] == g.signs[e] for e in g.edges)
        d = mg([(0, 1)] * 3, signs=[1, -1, -1])
        f = find_abstract_duality(g, d, signed=True)
        assert f is not None and all(d.signs[f.mapping[e]] == -g.signs[e] for e in g.edges)
        assert find_2_isomorphism(g, h.with_signs({0: -1, 1: -1, 2: -1}), signed=True) is None

    def test_jobs_is_deterministic(self):
        g = mg([(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 2), (2, 5), (5, 0)])
        h = mg([(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (4, 0), (0, 5), (5, 2)])
        assert find_2_isomorphism(g, h, jobs=2) == find_2_isomorphism(g, h)

    def test_search_limit(self):
        with pytest.raises(TooLarge):
            find_2_isomorphism(cycle(13), cycle(13))


class TestGraphIsomorphism:
    def test_examples(self):
        c = cycle(3)
        r = is_graph_isomorphism(c, c.relabel(vertex_map={0: 7, 1: 8, 2: 9}, edge_map={0: 2, 1: 0, 2: 1}))
        assert r and r.witness is not None
        assert not is_graph_isomorphism(dipole(3), cycle(3))
        plus = mg([(0, 1), (1, 2), (2, 0)], signs=[1, 1, 1])
        mixed = plus.with_signs({0: 1, 1: 1, 2: -1})
        assert is_graph_isomorphism(plus, mixed)
        assert not is_graph_isomorphism(plus, mixed, respect_signs=True)

    @settings(max_examples=100, deadline=None)
    @given(st.sampled_from(CORPUS5), st.randoms(use_true_random=False))
    def test_relabel_and_witness(self, g, rnd):
        vs = list(g.vertices)
        es = list(g.edges)
        rnd.shuffle(vs)
        rnd.shuffle(es)
        h = g.relabel(dict(zip(g.vertices, [v + 10 for v in vs])), dict(zip(g.edges, es)))
        r = is_graph_isomorphism(g, h)
        assert r
        assert induced_vertex_map(g, h, r.witness.mapping) is not None
        assert is_2_isomorphism(r.witness)

    def test_corpus_classes_distinct(self):
        by_m = defaultdict(list)
        for g in CORPUS5:
            by_m[g.n_edges].append(g)
        for gs in by_m.values():
            for a, b in combinations(gs, 2):
                assert not is_graph_isomorphism(a, b)


def test_whitney_uniqueness_for_3_connected():
    # every 2-isomorphism of a 3-connected graph is induced by a graph isomorphism
    for g in (k4(), mg([(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1), (4, 2), (4, 3)])):
        es = list(g.edges)
        count = 0
        for p in permutations(es):
            f = EdgeBijection(g, g, dict(zip(es, p)))
            if is_2_isomorphism(f):
                count += 1
                assert induced_vertex_map(g, g, f.mapping) is not None
        assert count > 1


class TestCompositionLaws:
    @settings(max_examples=60, deadline=None)
    @given(st.sampled_from([g for g in CORPUS5 if g.n_edges >= 2]), st.randoms(use_true_random=False))
    def test_laws(self, g, rnd):
        from planardual.embed import enumerate_spherical_embeddings, geometric_dual

        embs = list(enumerate_spherical_embeddings(g))
        d1 = geometric_dual(rnd.choice(embs))
        d2 = geometric_dual(rnd.choice(embs))
        # two abstract dualities g -> H1 and H2 -> g compose to a 2-isomorphism H2 -> H1
        assert is_2_isomorphism(compose(d2.duality_map.inverse(), d1.duality_map))
        es = list(g.edges)
        twisted = None
        for p in permutations(es):
            t = EdgeBijection(g, g, dict(zip(es, p)))
            if is_2_isomorphism(t) and not t.is_identity():
                twisted = t
                break
        if twisted is not None:
            assert is_abstract_duality(compose(twisted, d1.duality_map))
