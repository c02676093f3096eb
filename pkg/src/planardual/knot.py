"""Link diagrams, signed checkerboard graphs, the medial construction and Goeritz matrices.

Conventions
-----------
A crossing ``X a b c d s`` lists its four arcs counterclockwise, starting at
the incoming under-strand, so ``a, c`` are the under arcs and ``b, d`` the
over arcs. Write ``R_ab`` for the region between arcs ``a`` and ``b``. The
checkerboard edge at the crossing that joins ``R_ab`` and ``R_cd`` has sign
``s``; the edge joining ``R_bc`` and ``R_da`` has sign ``-s``. With
``s = +1`` this is the shading rule for unshaded graphs (an unshaded region
sitting counterclockwise after an under arc gives ``+1``), so an ordinary PD
code can omit ``s``. Each graph receives the signs of its own edges, which
makes the shaded signs the negatives of the unshaded ones.

Crossing ``i`` becomes edge ``i`` of both checkerboard graphs. Regions are
numbered in face order within each colour class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .bijection import EdgeBijection
from .chains import GeometricDualPair, duality_chain_2iso
from .embed import Embedding, geometric_dual
from .errors import (
    BadPDCode,
    DisconnectedCheckerboard,
    DisconnectedPrimal,
    NonPlanar,
    NotA2Isomorphism,
    UnknownVertex,
)
from .graphcore import MultiGraph, components, induced_vertex_map
from .matroid import IsomorphismResult, is_2_isomorphism, is_graph_isomorphism

__all__ = [
    "CheckerboardPair",
    "Crossing",
    "GoeritzMatrix",
    "LinkDiagram",
    "SignedGraph",
    "checkerboard",
    "diagram_chain",
    "diagram_from_signed_gdp",
    "goeritz",
    "shared_checkerboard",
]

# A signed graph is a MultiGraph whose ``signs`` cover every edge.
SignedGraph = MultiGraph


def signed(g: MultiGraph, signs=None) -> SignedGraph:
    """Attach ``signs`` (or check the ones already present)."""
    if signs is not None:
        return g.with_signs(signs)
    if g.signs is None:
        raise ValueError("graph carries no edge signs")
    return g


@dataclass(frozen=True)
class Crossing:
    arcs: tuple[int, int, int, int]
    sign: int = 1

    def __post_init__(self):
        if len(self.arcs) != 4:
            raise BadPDCode("a crossing needs exactly four arcs")
        if self.sign not in (1, -1):
            raise BadPDCode(f"crossing sign must be +1 or -1, got {self.sign}")


@dataclass(frozen=True)
class LinkDiagram:
    """A PD code with explicit crossing signs.

    ``edge_labels[i]``, when set, records which graph edge crossing ``i``
    was built from (see :func:`diagram_from_signed_gdp`).
    """

    crossings: tuple[Crossing, ...]
    edge_labels: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        count: dict[int, int] = {}
        for x in self.crossings:
            for a in x.arcs:
                count[a] = count.get(a, 0) + 1
        bad = sorted(a for a, c in count.items() if c != 2)
        if bad:
            raise BadPDCode(f"arc {bad[0]} occurs {count[bad[0]]} times (must be twice)")
        if self.edge_labels is not None and len(self.edge_labels) != len(self.crossings):
            raise BadPDCode("edge_labels must have one entry per crossing")

    @classmethod
    def from_pd(cls, tuples: Iterable[Sequence[int]]) -> "LinkDiagram":
        """From ``(a, b, c, d)`` or ``(a, b, c, d, s)`` tuples."""
        xs = []
        for t in tuples:
            t = tuple(int(v) for v in t)
            if len(t) == 4:
                xs.append(Crossing(t))
            elif len(t) == 5:
                xs.append(Crossing(t[:4], t[4]))
            else:
                raise BadPDCode(f"crossing {t} must have 4 arcs and an optional sign")
        return cls(tuple(xs))

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    def pd(self) -> list[tuple[int, int, int, int, int]]:
        return [(*x.arcs, x.sign) for x in self.crossings]

    def mirror_signs(self) -> "LinkDiagram":
        return LinkDiagram(tuple(Crossing(x.arcs, -x.sign) for x in self.crossings), self.edge_labels)


# ---------------------------------------------------------------------------
# checkerboard graphs


@dataclass(frozen=True)
class CheckerboardPair:
    shaded: SignedGraph
    unshaded: SignedGraph
    # crossing index -> (shaded edge, unshaded edge); both equal the index
    crossing_map: dict[int, tuple[int, int]]

    @property
    def graphs(self) -> tuple[SignedGraph, SignedGraph]:
        return self.shaded, self.unshaded

    def swapped(self) -> "CheckerboardPair":
        return CheckerboardPair(self.unshaded, self.shaded, {k: (b, a) for k, (a, b) in self.crossing_map.items()})


def _diagram_map(d: LinkDiagram) -> Embedding:
    """The 4-valent map: vertices are crossings, edges are arcs."""
    slots: dict[int, list[tuple[int, int]]] = {}
    for i, x in enumerate(d.crossings):
        for j, a in enumerate(x.arcs):
            slots.setdefault(a, []).append((i, j))
    edges = {}
    dart_at: dict[tuple[int, int], int] = {}
    for a, occ in sorted(slots.items()):
        (i, j), (k, l) = occ
        edges[a] = (i, k)
        dart_at[(i, j)] = 2 * a
        dart_at[(k, l)] = 2 * a + 1
    g = MultiGraph(range(len(d.crossings)), edges)
    rot = {i: tuple(dart_at[(i, j)] for j in range(4)) for i in range(len(d.crossings))}
    try:
        return Embedding(g, rot)
    except NonPlanar as exc:
        raise BadPDCode("PD code does not describe a diagram on the sphere") from exc


def _regions(emb: Embedding) -> list[int]:
    """Region label per face; the outer faces of split components are merged."""
    faces = emb.faces()
    label = list(range(len(faces)))
    comps = components(emb.graph)
    if len(comps) > 1:
        outer = sorted(emb.outer_face(min(c)) for c in comps)
        for f in outer:
            label[f] = outer[0]
    return label


def checkerboard(d: LinkDiagram, swap: bool = False) -> CheckerboardPair:
    """Signed checkerboard graphs of ``d``.

    The region on the slot-A side of the lowest arc (the face containing
    that dart) is unshaded; ``swap=True`` gives the other colouring.
    """
    n = d.n_crossings
    if n == 0:
        one = MultiGraph([0], {}, {})
        return CheckerboardPair(one, one, {})
    emb = _diagram_map(d)
    label = _regions(emb)
    region_of = lambda dart: label[emb.face_of(dart)]  # noqa: E731
    # 2-colour the regions across arcs
    adj: dict[int, set[int]] = {r: set() for r in set(label)}
    for a in emb.graph.edges:
        r1, r2 = region_of(2 * a), region_of(2 * a + 1)
        adj[r1].add(r2)
        adj[r2].add(r1)
    seed = region_of(2 * min(emb.graph.edges))
    colour = {seed: 0}
    queue = [seed]
    while queue:
        r = queue.pop()
        for s in sorted(adj[r]):
            if s not in colour:
                colour[s] = 1 - colour[r]
                queue.append(s)
            elif colour[s] == colour[r]:
                raise BadPDCode("regions are not 2-colourable")
    if swap:
        colour = {r: 1 - c for r, c in colour.items()}
    ids = {0: {}, 1: {}}
    for r in sorted(colour):
        ids[colour[r]][r] = len(ids[colour[r]])
    uns_edges, sh_edges, uns_signs, sh_signs = {}, {}, {}, {}
    for i, x in enumerate(d.crossings):
        darts = emb.rotation[i]
        # R_ab is the face entered after arc a, i.e. the face of dart b
        r_ab, r_bc, r_cd, r_da = (region_of(darts[(j + 1) % 4]) for j in range(4))
        if colour[r_ab] == 0:
            uns_edges[i] = (ids[0][r_ab], ids[0][r_cd])
            uns_signs[i] = x.sign
            sh_edges[i] = (ids[1][r_bc], ids[1][r_da])
            sh_signs[i] = -x.sign
        else:
            uns_edges[i] = (ids[0][r_bc], ids[0][r_da])
            uns_signs[i] = -x.sign
            sh_edges[i] = (ids[1][r_ab], ids[1][r_cd])
            sh_signs[i] = x.sign
    unshaded = MultiGraph(ids[0].values(), uns_edges, uns_signs)
    shaded = MultiGraph(ids[1].values(), sh_edges, sh_signs)
    return CheckerboardPair(shaded, unshaded, {i: (i, i) for i in range(n)})


# ---------------------------------------------------------------------------
# medial construction

_OPP = {"NE": "SW", "SW": "NE", "NW": "SE", "SE": "NW"}
_CCW = ("NE", "NW", "SW", "SE")


def diagram_from_signed_gdp(pair: GeometricDualPair | Embedding, signs=None) -> LinkDiagram:
    """Medial diagram of an embedded signed graph.

    One crossing per edge, in ascending edge-id order. The crossing is
    chosen so that the edge reappears with its own sign in the checkerboard
    graph on the primal's vertices (and the dual edge with the opposite
    sign). Every crossing is written with ``s = +1``.
    """
    emb = pair.embedding if isinstance(pair, GeometricDualPair) else pair
    g = emb.graph
    if len(components(g)) != 1:
        raise DisconnectedPrimal("medial construction needs a connected primal")
    sg = signed(g, signs)
    if g.n_edges == 0:
        return LinkDiagram((), ())
    succ = emb.succ
    # arcs are corners (x, succ x); ends are named arms of the edge crossings
    arms: dict[tuple[int, str], int] = {}
    arc_ends: list[tuple[tuple[int, str], tuple[int, str]]] = []
    for v, ds in emb.rotation.items():
        for x in ds:
            y = succ(x)
            end1 = (x >> 1, "NW" if x % 2 == 0 else "SE")
            end2 = (y >> 1, "SW" if y % 2 == 0 else "NE")
            k = len(arc_ends)
            arc_ends.append((end1, end2))
            arms[end1] = k
            arms[end2] = k
    # follow strands (straight through each crossing) and number arcs
    label = [0] * len(arc_ends)
    incoming: set[tuple[int, str]] = set()
    nxt = 1
    for start in range(len(arc_ends)):
        if label[start]:
            continue
        k = start
        enter = arc_ends[k][1]
        while not label[k]:
            label[k] = nxt
            nxt += 1
            incoming.add(enter)
            out = (enter[0], _OPP[enter[1]])
            k = arms[out]
            a, b = arc_ends[k]
            enter = b if a == out else a
            if a == b:  # cannot happen: arms are distinct
                raise AssertionError
    crossings = []
    labels = []
    for e in g.edges:
        first = "NW" if sg.signs[e] == 1 else "NE"
        i = _CCW.index(first)
        order = [_CCW[(i + j) % 4] for j in range(4)]
        if (e, order[0]) not in incoming:
            order = order[2:] + order[:2]
        crossings.append(Crossing(tuple(label[arms[(e, o)]] for o in order), 1))
        labels.append(e)
    return LinkDiagram(tuple(crossings), tuple(labels))


def primal_edge_map(d: LinkDiagram) -> dict[int, int]:
    """Crossing index -> source edge id, for diagrams built by the medial construction."""
    if d.edge_labels is None:
        raise ValueError("diagram has no edge provenance")
    return {i: e for i, e in enumerate(d.edge_labels)}


# ---------------------------------------------------------------------------
# Goeritz matrices


@dataclass(frozen=True)
class GoeritzMatrix:
    vertices: tuple[int, ...]
    unreduced: np.ndarray
    dropped: int
    reduced: np.ndarray

    @property
    def determinant(self) -> int:
        if self.reduced.size == 0:
            return 1
        return int(round(np.linalg.det(self.reduced.astype(float))))


def goeritz(sg: SignedGraph, drop_vertex: int) -> GoeritzMatrix:
    """Signed Laplacian; loops contribute nothing.

    Entry ``(i, j)`` for ``i != j`` is minus the sum of the signs of the
    edges joining ``v_i`` and ``v_j``; diagonals make every row sum to zero.
    """
    sg = signed(sg)
    if drop_vertex not in sg.vertices:
        raise UnknownVertex(f"vertex {drop_vertex} is not in the graph")
    vs = sg.vertices
    idx = {v: i for i, v in enumerate(vs)}
    m = np.zeros((len(vs), len(vs)), dtype=np.int64)
    for e, (a, b) in sg.edges.items():
        if a == b:
            continue
        s = sg.signs[e]
        i, j = idx[a], idx[b]
        m[i, j] -= s
        m[j, i] -= s
        m[i, i] += s
        m[j, j] += s
    k = idx[drop_vertex]
    keep = [i for i in range(len(vs)) if i != k]
    red = m[np.ix_(keep, keep)]
    return GoeritzMatrix(vs, m, drop_vertex, red)


# ---------------------------------------------------------------------------
# diagram chains


def shared_checkerboard(d1: LinkDiagram, d2: LinkDiagram) -> IsomorphismResult:
    """A sign-preserving isomorphism between some checkerboard graph of each diagram."""
    p1, p2 = checkerboard(d1), checkerboard(d2)
    for a in p1.graphs:
        for b in p2.graphs:
            r = is_graph_isomorphism(a, b, respect_signs=True)
            if r:
                return r
    return IsomorphismResult(False)


def _signed_2iso(f: EdgeBijection) -> bool:
    g, h = f.source, f.target
    if g.signs is None or h.signs is None:
        return False
    if any(g.signs[e] != h.signs[f.mapping[e]] for e in g.edges):
        return False
    return is_2_isomorphism(EdgeBijection(g.unsigned(), h.unsigned(), f.mapping))


def diagram_chain(d: LinkDiagram, d_prime: LinkDiagram, f: EdgeBijection) -> list[LinkDiagram]:
    """Intermediate diagrams ``D_1, ..., D_{2k-2}`` between ``d`` and ``d_prime``.

    ``f`` must go from a checkerboard graph of ``d`` to one of ``d_prime``
    (as returned by :func:`checkerboard`) and preserve signs. Consecutive
    diagrams, and each end with its neighbour, share a signed
    checkerboard graph.
    """
    pd, pd2 = checkerboard(d), checkerboard(d_prime)
    for p in (pd, pd2):
        if any(len(components(x)) != 1 for x in p.graphs):
            raise DisconnectedCheckerboard("both checkerboard graphs must be connected")
    if f.source not in pd.graphs or f.target not in pd2.graphs:
        raise ValueError("map must join checkerboard graphs of the two diagrams")
    if not _signed_2iso(f):
        raise NotA2Isomorphism("map is not a sign-preserving 2-isomorphism")
    g, g2 = f.source, f.target
    chain = duality_chain_2iso(EdgeBijection(g.unsigned(), g2.unsigned(), f.mapping), check=False)
    # propagate signs: each duality map reverses them
    signs = [dict(g.signs)]
    for m in chain.maps:
        signs.append({m.mapping[e]: -s for e, s in signs[-1].items()})
    if signs[-1] != g2.signs:
        raise AssertionError("sign propagation does not close up")
    out = []
    for i, (m, step) in enumerate(zip(chain.maps, chain.steps)):
        own = i if step.forward else i + 1
        graph = chain.graphs[own].with_signs(signs[own])
        out.append(diagram_from_signed_gdp(Embedding(graph, step.embedding.rotation)))
    return out
