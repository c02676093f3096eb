"""Similarity chains of geometric dual pairs and the duality chains built from them.

A geometric dual pair is stored as a primal graph with a sphere embedding;
the dual is always the geometric dual of that embedding, so it carries the
primal edge ids and the duality map is the identity on ids. Chains record
an explicit edge-map witness at every link, so nothing is re-searched when
a chain is verified.

All surgeries act on rotation systems. The basic move takes a piece ``P``
hanging from the rest of the graph at a single vertex ``x``, gathers its
darts into one corner of the face that also meets a neighbour ``y`` of
``x`` (same graph, new embedding: a primal-side link), then slides ``P``
across to ``y`` inside that face. The slide leaves the dual unchanged; this
is checked with an explicit vertex map rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .bijection import EdgeBijection
from .embed import (
    Embedding,
    enumerate_spherical_embeddings,
    find_dual_embedding,
    geometric_dual,
    restrict,
    transport,
)
from .errors import (
    BadAttachment,
    DisconnectedPrimal,
    NonPlanar,
    NotA2Isomorphism,
    NotAnAbstractDuality,
    NothingToReduce,
)
from .graphcore import (
    JoinInfo,
    MultiGraph,
    blocks,
    components,
    induced_vertex_map,
    shortest_path,
    tree_distances,
)
from .matroid import is_2_isomorphism, is_abstract_duality

__all__ = [
    "DualityChain",
    "DualityStep",
    "GeometricDualPair",
    "Link",
    "SimilarityChain",
    "any_embedding",
    "compress_chain",
    "duality_chain_2iso",
    "duality_chain_adual",
    "is_alternating",
    "normalize_to_star",
    "realize_2iso",
    "rebase_join",
    "reduce_cut_vertices",
    "verify_chain",
]

PRIMAL = "primal"
DUAL = "dual"


class ChainError(AssertionError):
    """Internal consistency failure while building a chain."""


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class GeometricDualPair:
    """``(primal, dual)`` with the embedding that certifies the duality."""

    primal: MultiGraph
    dual: MultiGraph
    embedding: Embedding
    duality_map: EdgeBijection
    dual_embedding: Embedding = field(repr=False, compare=False)

    @classmethod
    def from_embedding(cls, emb: Embedding) -> "GeometricDualPair":
        if len(components(emb.graph)) != 1:
            raise DisconnectedPrimal("a geometric dual pair needs a connected primal")
        gd = geometric_dual(emb)
        return cls(emb.graph, gd.graph, emb, gd.duality_map, gd.embedding)

    def side(self, which: str) -> MultiGraph:
        return self.primal if which == PRIMAL else self.dual


@dataclass(frozen=True)
class Link:
    """Pairs ``i`` and ``i+1`` agree on ``side``; ``witness`` is the edge map of the isomorphism."""

    side: str
    witness: EdgeBijection


@dataclass(frozen=True)
class SimilarityChain:
    pairs: tuple[GeometricDualPair, ...]
    links: tuple[Link, ...]

    def __post_init__(self):
        if len(self.links) != len(self.pairs) - 1:
            raise ValueError("need exactly one link between consecutive pairs")

    def __len__(self):
        return len(self.pairs)

    @property
    def first(self) -> GeometricDualPair:
        return self.pairs[0]

    @property
    def last(self) -> GeometricDualPair:
        return self.pairs[-1]

    def _step_maps(self) -> list[dict[int, int]]:
        # primal-side edge map contributed by each link
        out = []
        for i, link in enumerate(self.links):
            w = link.witness.mapping
            if link.side == PRIMAL:
                out.append(dict(w))
            else:
                d0 = self.pairs[i].duality_map.mapping
                d1inv = {v: k for k, v in self.pairs[i + 1].duality_map.mapping.items()}
                out.append({e: d1inv[w[d0[e]]] for e in d0})
        return out

    @property
    def associated_2iso_primal(self) -> EdgeBijection:
        m = {e: e for e in self.first.primal.edges}
        for step in self._step_maps():
            m = {e: step[x] for e, x in m.items()}
        return EdgeBijection(self.first.primal, self.last.primal, m)

    @property
    def associated_2iso_dual(self) -> EdgeBijection:
        p = self.associated_2iso_primal.mapping
        d0inv = {v: k for k, v in self.first.duality_map.mapping.items()}
        d1 = self.last.duality_map.mapping
        return EdgeBijection(self.first.dual, self.last.dual, {h: d1[p[d0inv[h]]] for h in d0inv})

    def then(self, other: "SimilarityChain") -> "SimilarityChain":
        """Concatenate; ``other`` must start at an isomorphic-by-identity copy of our last pair."""
        if other.first is self.last or other.first == self.last:
            return SimilarityChain(self.pairs + other.pairs[1:], self.links + other.links)
        raise ValueError("chains do not meet")

    def reversed(self) -> "SimilarityChain":
        links = tuple(Link(l.side, l.witness.inverse()) for l in reversed(self.links))
        return SimilarityChain(tuple(reversed(self.pairs)), links)

    def check_links(self) -> bool:
        """Every link witness is an isomorphism on its declared side."""
        for i, link in enumerate(self.links):
            a = self.pairs[i].side(link.side)
            b = self.pairs[i + 1].side(link.side)
            w = link.witness
            if w.source != a or w.target != b:
                return False
            if induced_vertex_map(a, b, w.mapping) is None:
                return False
        return True


def _single(pair: GeometricDualPair) -> SimilarityChain:
    return SimilarityChain((pair,), ())


def _iso_link(a: GeometricDualPair, b: GeometricDualPair, side: str, edge_map) -> Link:
    ga, gb = a.side(side), b.side(side)
    if induced_vertex_map(ga, gb, edge_map) is None:
        raise ChainError(f"{side} sides are not isomorphic under the given edge map")
    return Link(side, EdgeBijection(ga, gb, edge_map))


class _Builder:
    """Accumulates pairs and links, skipping no-op re-embeddings."""

    def __init__(self, start: GeometricDualPair):
        self.pairs = [start]
        self.links: list[Link] = []

    @property
    def last(self) -> GeometricDualPair:
        return self.pairs[-1]

    def add(self, pair: GeometricDualPair, side: str, edge_map=None) -> None:
        last = self.pairs[-1]
        if edge_map is None:
            edge_map = {e: e for e in last.side(side).edges}
        if pair.primal == last.primal and pair.embedding == last.embedding and all(
            k == v for k, v in edge_map.items()
        ):
            return
        self.links.append(_iso_link(last, pair, side, edge_map))
        self.pairs.append(pair)

    def extend(self, chain: SimilarityChain) -> None:
        if chain.first.primal != self.last.primal or chain.first.embedding != self.last.embedding:
            raise ChainError("chain does not start at the current pair")
        self.pairs.extend(chain.pairs[1:])
        self.links.extend(chain.links)

    def build(self) -> SimilarityChain:
        return SimilarityChain(tuple(self.pairs), tuple(self.links))


# ---------------------------------------------------------------------------
# embeddings


def any_embedding(g: MultiGraph) -> Embedding:
    """First spherical embedding found; components are embedded independently."""
    rot: dict[int, tuple[int, ...]] = {}
    for comp in components(g):
        sub = g.edge_subgraph([e for e in g.edges if g.edges[e][0] in comp], keep_vertices=False)
        if sub.n_edges == 0:
            continue
        emb = next(enumerate_spherical_embeddings(sub), None)
        if emb is None:
            raise NonPlanar("graph has no sphere embedding")
        rot.update(emb.rotation)
    return Embedding(g, rot)


def _dart_at(g: MultiGraph, e: int, v: int) -> int:
    a, b = g.edges[e]
    if a == v:
        return 2 * e
    if b == v:
        return 2 * e + 1
    raise ValueError(f"edge {e} does not meet vertex {v}")


def _insert_before(seq: tuple[int, ...], anchor: int, piece: Sequence[int]) -> tuple[int, ...]:
    i = seq.index(anchor)
    return seq[:i] + tuple(piece) + seq[i:]


def _insert_after(seq: tuple[int, ...], anchor: int, piece: Sequence[int]) -> tuple[int, ...]:
    i = seq.index(anchor) + 1
    return seq[:i] + tuple(piece) + seq[i:]


def _hanging_at(g: MultiGraph, piece: frozenset[int]) -> int:
    """The single vertex shared by ``piece`` and the rest of ``g``."""
    pv = {x for e in piece for x in g.edges[e]}
    rv = {x for e in g.edges if e not in piece for x in g.edges[e]}
    shared = pv & rv
    if len(shared) != 1:
        raise ChainError("piece does not hang from a single vertex")
    return next(iter(shared))


def _slide(
    pair: GeometricDualPair, piece: frozenset[int], via: int
) -> tuple[GeometricDualPair, GeometricDualPair]:
    """Move ``piece`` across edge ``via`` (an edge of the rest at the hanging vertex).

    Returns the re-embedded pair (same primal) and the pair after the slide
    (same dual up to an identity-on-edges isomorphism).
    """
    emb = pair.embedding
    g = emb.graph
    x = _hanging_at(g, piece)
    rest = frozenset(g.edges) - piece
    y = g.other(via, x)
    if via not in rest or y == x:
        raise ChainError("slide needs a non-loop edge of the rest at the hanging vertex")
    rot = dict(emb.rotation)
    p_at_x = tuple(d for d in rot[x] if (d >> 1) in piece)
    r_at_x = tuple(d for d in rot[x] if (d >> 1) in rest)
    # the piece's own cyclic order at x, as seen in the current embedding
    emb_p = restrict(emb, piece)
    p_cyc = emb_p.rotation[x]
    assert sorted(p_cyc) == sorted(p_at_x)
    d_via = _dart_at(g, via, x)
    before = dict(rot)
    before[x] = _insert_before(r_at_x, d_via, p_cyc)
    emb1 = Embedding(g, before)
    # slide: the corner after the twin of d_via at y lies on the same face
    edges = dict(g.edges)
    for e in piece:
        a, b = edges[e]
        edges[e] = (y if a == x else a, y if b == x else b)
    g2 = MultiGraph(g.vertices, edges, g.signs)
    after = dict(rot)
    after[x] = r_at_x
    after[y] = _insert_after(rot[y], d_via ^ 1, p_cyc)
    emb2 = Embedding(g2, after)
    p1 = pair if emb1 == emb else GeometricDualPair.from_embedding(emb1)
    p2 = GeometricDualPair.from_embedding(emb2)
    if induced_vertex_map(p1.dual, p2.dual, {e: e for e in g.edges}) is None:
        raise ChainError("slide changed the dual")
    return p1, p2


def _walk_piece(builder: _Builder, piece: frozenset[int], path: Sequence[int]) -> None:
    """Slide ``piece`` from ``path[0]`` to ``path[-1]`` one edge at a time."""
    for k in range(len(path) - 1):
        g = builder.last.primal
        u, w = path[k], path[k + 1]
        via = min(e for e in g.incident(u) if e not in piece and g.other(e, u) == w and not g.is_loop(e))
        p1, p2 = _slide(builder.last, piece, via)
        builder.add(p1, PRIMAL)
        builder.add(p2, DUAL)


def _with_join(pair: GeometricDualPair, hub: int, parts: Sequence[frozenset[int]]) -> GeometricDualPair:
    g = pair.primal
    maps = tuple({x: x for e in p for x in g.edges[e]} for p in parts)
    g2 = MultiGraph(g.vertices, g.edges, g.signs, JoinInfo(hub, tuple(parts), maps))
    emb = Embedding(g2, pair.embedding.rotation, check=False)
    return GeometricDualPair(g2, pair.dual, emb, EdgeBijection(g2, pair.dual, pair.duality_map.mapping), pair.dual_embedding)


# ---------------------------------------------------------------------------
# cut-vertex reduction, rebasing, stars


def _choose_cut_pair(g: MultiGraph) -> tuple[int, int]:
    bd = blocks(g)
    cuts = sorted(bd.cut_vertices)
    best = None
    for c in cuts:
        dist = tree_distances(bd, ("C", c))
        for c2 in cuts:
            if c2 == c:
                continue
            key = (-dist[("C", c2)], c, c2)
            if best is None or key < best:
                best = key
    return best[1], best[2]


def _split_at(g: MultiGraph, c_prime: int, c: int) -> frozenset[int]:
    """Edges of every loop at ``c_prime`` and every component of ``g - c_prime`` missing ``c``."""
    # flood from c avoiding c_prime; those edges stay
    keep: set[int] = set()
    seen = {c}
    stack = [c]
    while stack:
        v = stack.pop()
        for e in g.incident(v):
            if g.is_loop(e) and v == c_prime:
                continue
            w = g.other(e, v)
            keep.add(e)
            if w != c_prime and w not in seen:
                seen.add(w)
                stack.append(w)
    # edges between c_prime and c's side are also kept (collected above)
    return frozenset(e for e in g.edges if e not in keep)


def reduce_cut_vertices(pair: GeometricDualPair) -> SimilarityChain:
    """One cut-vertex fewer, via a chain of similar pairs.

    Picks the two cut-vertices ``c, c'`` farthest apart in the block-cut
    tree, detaches ``G3`` (loops at ``c'`` and every component of
    ``G - c'`` avoiding ``c``) and slides it to ``c`` along a shortest path
    in the rest of the graph.
    """
    g = pair.primal
    cuts = blocks(g).cut_vertices
    if len(cuts) < 2:
        raise NothingToReduce(f"primal has {len(cuts)} cut-vertices")
    c, c_prime = _choose_cut_pair(g)
    g3 = _split_at(g, c_prime, c)
    rest = g.edge_subgraph(frozenset(g.edges) - g3)
    path = shortest_path(rest, c_prime, c)
    builder = _Builder(pair)
    _walk_piece(builder, g3, path)
    out = builder.build()
    if len(blocks(out.last.primal).cut_vertices) != len(cuts) - 1:
        raise ChainError("cut-vertex count did not drop by one")
    return out


def _lobes(g: MultiGraph, c: int) -> list[frozenset[int]]:
    """Edge sets of the loops at ``c`` and of the components of ``g - c`` with their edges to ``c``."""
    lobes = []
    done: set[int] = set()
    for e in g.incident(c):
        if e in done:
            continue
        if g.is_loop(e):
            lobes.append(frozenset([e]))
            done.add(e)
            continue
        part: set[int] = set()
        seen = set()
        stack = [g.other(e, c)]
        seen.add(stack[0])
        while stack:
            v = stack.pop()
            for f in g.incident(v):
                part.add(f)
                w = g.other(f, v)
                if w != c and w not in seen:
                    seen.add(w)
                    stack.append(w)
        done |= part
        lobes.append(frozenset(part))
    return sorted(lobes, key=min)


def _join_parts(g: MultiGraph) -> tuple[int, list[frozenset[int]]]:
    if g.join is not None and len(g.join.parts) >= 2:
        return g.join.vertex, list(g.join.parts)
    cuts = blocks(g).cut_vertices
    if len(cuts) != 1:
        raise BadAttachment("primal is not recognisably a one-point union")
    c = next(iter(cuts))
    return c, _lobes(g, c)


def rebase_join(pair: GeometricDualPair, part_index: int, new_vertex: int) -> SimilarityChain:
    """Move the attachment point inside part ``part_index`` to ``new_vertex``.

    The other parts travel together along a shortest path inside the part,
    one shared-dual step per path edge.
    """
    g = pair.primal
    hub, parts = _join_parts(g)
    if not 0 <= part_index < len(parts):
        raise BadAttachment(f"no part {part_index}")
    part = parts[part_index]
    part_vertices = {x for e in part for x in g.edges[e]}
    if new_vertex not in part_vertices:
        raise BadAttachment(f"vertex {new_vertex} is not in part {part_index}")
    if new_vertex == hub:
        return _single(pair)
    others = frozenset(g.edges) - part
    path = shortest_path(g.edge_subgraph(part), hub, new_vertex)
    builder = _Builder(pair)
    _walk_piece(builder, others, path)
    last = _with_join(builder.pairs[-1], new_vertex, parts)
    builder.pairs[-1] = last
    if builder.links:
        prev = builder.links[-1]
        builder.links[-1] = Link(prev.side, EdgeBijection(prev.witness.source, last.side(prev.side), prev.witness.mapping))
    return builder.build()


def _tracked_vertex(orig: MultiGraph, cur: MultiGraph, block_edges: frozenset[int], v: int) -> int:
    # a dart of the block at v keeps pointing at v's image through every slide
    for e in sorted(block_edges):
        a, b = orig.edges[e]
        if a == v:
            return cur.edges[e][0]
        if b == v:
            return cur.edges[e][1]
    raise BadAttachment(f"vertex {v} is not in the block")


def normalize_to_star(pair: GeometricDualPair, attach: Sequence[int] | None = None) -> SimilarityChain:
    """Chain to a pair whose primal is a one-point union of its blocks.

    ``attach[i]`` is a vertex of the ``i``-th block of ``blocks(pair.primal)``
    (original vertex labels). With ``attach=None`` the blocks end up at
    whatever single vertex the reductions leave. The associated
    2-isomorphism is the identity on edge ids.
    """
    g0 = pair.primal
    bd0 = blocks(g0)
    block_sets = [b.edges for b in bd0.blocks if b.edges]
    if attach is not None:
        if len(attach) != len(block_sets):
            raise BadAttachment("need one attachment vertex per block")
        for b, v in zip(block_sets, attach):
            if v not in {x for e in b for x in g0.edges[e]}:
                raise BadAttachment(f"vertex {v} is not in its block")
    builder = _Builder(pair)
    while len(blocks(builder.last.primal).cut_vertices) >= 2:
        builder.extend(reduce_cut_vertices(builder.last))
    if attach is not None and len(block_sets) >= 2:
        for b, v in zip(block_sets, attach):
            cur = builder.last.primal
            (hub,) = blocks(cur).cut_vertices
            target = _tracked_vertex(g0, cur, b, v)
            if target == hub:
                continue
            path = shortest_path(cur.edge_subgraph(b), hub, target)
            _walk_piece(builder, frozenset(cur.edges) - b, path)
    out = builder.build()
    if not out.associated_2iso_primal.is_identity():
        raise ChainError("normalisation must be the identity on edges")
    return out


# ---------------------------------------------------------------------------
# realising a 2-isomorphism


def _star_form(pair: GeometricDualPair) -> tuple[GeometricDualPair, int | None, list[frozenset[int]]]:
    """Re-embed a star so all blocks share one face at the hub; return that face too."""
    g = pair.primal
    bd = blocks(g)
    sets = [b.edges for b in bd.blocks if b.edges]
    if len(sets) < 2:
        return pair, None, sets
    (hub,) = bd.cut_vertices
    rot = dict(pair.embedding.rotation)
    intervals = []
    for s in sets:
        sub = restrict(pair.embedding, s)
        intervals.append(sub.rotation[hub])
        for v, ds in sub.rotation.items():
            if v != hub:
                rot[v] = ds
    rot[hub] = tuple(d for iv in intervals for d in iv)
    emb = Embedding(g, rot)
    p = pair if emb == pair.embedding else GeometricDualPair.from_embedding(emb)
    outer = emb.face_of(intervals[1][0])
    return p, outer, sets


def realize_2iso(f: EdgeBijection, check: bool = True) -> SimilarityChain:
    """A similarity chain ``(G, H) ~ ... ~ (G', H')`` whose associated primal map is ``f``."""
    g, g2 = f.source, f.target
    if check and not is_2_isomorphism(f):
        raise NotA2Isomorphism("map does not preserve maximal forests")
    if len(components(g)) != 1 or len(components(g2)) != 1:
        raise DisconnectedPrimal("realize_2iso needs connected graphs")
    emb = any_embedding(g)
    start = GeometricDualPair.from_embedding(emb)
    if g == g2 and f.is_identity():
        return _single(start)
    vmap = induced_vertex_map(g, g2, f.mapping)
    if vmap is not None:
        emb2 = transport(emb, g2, f.inverse().mapping, {b: a for a, b in vmap.items()})
        end = GeometricDualPair.from_embedding(Embedding(g2, emb2.rotation))
        return SimilarityChain((start, end), (_iso_link(start, end, PRIMAL, f.mapping),))

    builder = _Builder(start)
    builder.extend(normalize_to_star(start))
    star, hub_face, sets = _star_form(builder.last)
    builder.add(star, PRIMAL)

    # re-embed each block of the dual so that it is dual to the matching block of G'
    h = star.dual
    h_emb = star.dual_embedding
    rot: dict[int, tuple[int, ...]] = {}
    hub_parts = []
    for s in sets:
        hi = h.edge_subgraph(s)
        bi = g2.edge_subgraph({f.mapping[e] for e in s})
        fi = EdgeBijection(hi, bi, f.restrict(s))
        ei = find_dual_embedding(hi, fi, bi)
        if ei is None:
            raise NonPlanar("no re-embedding of a dual block matches the target block")
        for v, ds in ei.rotation.items():
            if v == hub_face:
                hub_parts.append(ds)
            else:
                rot[v] = ds
    if hub_face is not None:
        rot[hub_face] = tuple(d for part in hub_parts for d in part)
    h_new = Embedding(h, rot)
    tilde = GeometricDualPair.from_embedding(geometric_dual(h_new).embedding)
    builder.add(tilde, DUAL)

    # attachment vertices of the matching star on the G' side
    gt = tilde.primal
    tcuts = blocks(gt).cut_vertices
    bd2 = blocks(g2)
    attach = None
    if len(sets) >= 2:
        (thub,) = tcuts
        image_of: dict[frozenset[int], int] = {}
        for s in sets:
            phi = induced_vertex_map(gt.edge_subgraph(s), g2.edge_subgraph({f.mapping[e] for e in s}), f.restrict(s))
            if phi is None:
                raise ChainError("re-embedded block does not match its target")
            image_of[frozenset(f.mapping[e] for e in s)] = phi[thub]
        attach = [image_of[b.edges] for b in bd2.blocks if b.edges]
    back = normalize_to_star(GeometricDualPair.from_embedding(any_embedding(g2)), attach)
    star2 = back.last
    builder.add(star2, PRIMAL, f.mapping)
    rev = back.reversed()
    builder.pairs.extend(rev.pairs[1:])
    builder.links.extend(rev.links)
    out = builder.build()
    if out.associated_2iso_primal.mapping != f.mapping:
        raise ChainError("associated map differs from the input 2-isomorphism")
    return out


# ---------------------------------------------------------------------------
# compression


def _transport_pair(pair: GeometricDualPair, onto: MultiGraph, edge_map: dict[int, int]) -> GeometricDualPair:
    """Move ``pair``'s embedding onto ``onto`` along an isomorphism ``onto -> pair.primal``."""
    vmap = induced_vertex_map(onto, pair.primal, edge_map)
    if vmap is None:
        raise ChainError("transport needs an isomorphism")
    emb = transport(pair.embedding, onto, edge_map, vmap)
    return GeometricDualPair.from_embedding(Embedding(onto, emb.rotation))


def _compose(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    return {e: b[x] for e, x in a.items()}


def _inv(a: dict[int, int]) -> dict[int, int]:
    return {v: k for k, v in a.items()}


def compress_chain(chain: SimilarityChain) -> SimilarityChain:
    """Apply the removal rules until none applies.

    Rules (on declared link sides): merge two consecutive links on the same
    side; drop the first pair if the first link is primal, and the last pair
    if the last link is primal. Endpoint removals transport the neighbouring
    embedding so the chain still starts and ends at the same graphs. A
    two-pair chain with a primal link becomes a single dual link the same
    way, and one whose link is the identity between equal graphs collapses
    to one pair. The associated primal map is unchanged.
    """
    pairs = list(chain.pairs)
    links = [(l.side, dict(l.witness.mapping)) for l in chain.links]
    changed = True
    while changed:
        changed = False
        for i in range(len(links) - 1):
            if links[i][0] == links[i + 1][0]:
                side = links[i][0]
                links[i : i + 2] = [(side, _compose(links[i][1], links[i + 1][1]))]
                del pairs[i + 1]
                changed = True
                break
        if changed:
            continue
        n = len(pairs)
        if n >= 3 and links[0][0] == PRIMAL:
            phi = links[0][1]
            new = _transport_pair(pairs[1], pairs[0].primal, phi)
            # dual of ``new`` maps to the old dual of pairs[1] by phi on ids
            side, w = links[1]
            pairs[0:2] = [new]
            links[0:2] = [(side, _compose(phi, w))]
            changed = True
            continue
        if n >= 3 and links[-1][0] == PRIMAL:
            phi = links[-1][1]
            new = _transport_pair(pairs[-2], pairs[-1].primal, _inv(phi))
            side, w = links[-2]
            pairs[-2:] = [new]
            links[-2:] = [(side, _compose(w, phi))]
            changed = True
            continue
        if n == 2 and links[0][0] == PRIMAL:
            phi = links[0][1]
            if pairs[0].primal == pairs[1].primal and all(k == v for k, v in phi.items()):
                pairs = [pairs[0]]
                links = []
            else:
                pairs[1] = _transport_pair(pairs[0], pairs[1].primal, _inv(phi))
                links[0] = (DUAL, phi)
            changed = True
    built_links = tuple(
        _iso_link(pairs[i], pairs[i + 1], side, w) for i, (side, w) in enumerate(links)
    )
    out = SimilarityChain(tuple(pairs), built_links)
    if not is_alternating(out):
        raise ChainError("compressed chain does not alternate")
    return out


def removal_rule_applies(chain: SimilarityChain) -> bool:
    sides = [l.side for l in chain.links]
    if any(a == b for a, b in zip(sides, sides[1:])):
        return True
    if len(sides) >= 2 and (sides[0] == PRIMAL or sides[-1] == PRIMAL):
        return True
    return len(sides) == 1 and sides[0] == PRIMAL


def is_alternating(chain: SimilarityChain) -> bool:
    """Links alternate dual, primal, ..., dual (so the pair count is even), or there is one pair."""
    n = len(chain.pairs)
    if n == 1:
        return True
    if n % 2:
        return False
    return all(l.side == (DUAL if i % 2 == 0 else PRIMAL) for i, l in enumerate(chain.links))


# ---------------------------------------------------------------------------
# duality chains


@dataclass(frozen=True)
class DualityStep:
    """One geometric duality.

    ``forward``: ``embedding`` embeds the step's source graph and its
    geometric dual is the target under ``map``. Otherwise the embedding is
    of the target and its dual is the source under ``map``.
    """

    embedding: Embedding
    forward: bool = True


@dataclass(frozen=True)
class DualityChain:
    graphs: tuple[MultiGraph, ...]
    maps: tuple[EdgeBijection, ...]
    steps: tuple[DualityStep, ...]

    def __post_init__(self):
        if len(self.maps) != len(self.graphs) - 1 or len(self.steps) != len(self.maps):
            raise ValueError("a chain of k graphs needs k-1 maps and steps")

    def __len__(self):
        return len(self.graphs)

    def composition(self) -> EdgeBijection:
        m = {e: e for e in self.graphs[0].edges}
        for f in self.maps:
            m = {e: f.mapping[x] for e, x in m.items()}
        return EdgeBijection(self.graphs[0], self.graphs[-1], m)


class _ChainAcc:
    def __init__(self, g: MultiGraph):
        self.graphs = [g]
        self.maps: list[EdgeBijection] = []
        self.steps: list[DualityStep] = []

    def push(self, nxt: MultiGraph, edge_map: dict[int, int], emb: Embedding, forward: bool = True):
        self.maps.append(EdgeBijection(self.graphs[-1], nxt, edge_map))
        self.steps.append(DualityStep(emb, forward))
        self.graphs.append(nxt)

    def build(self) -> DualityChain:
        return DualityChain(tuple(self.graphs), tuple(self.maps), tuple(self.steps))


def _chain_from_similarity(sim: SimilarityChain, acc: _ChainAcc) -> None:
    """Append ``G_1, H_2, G_2, H_4, ..., H_n, G_n`` for an alternating chain."""
    if len(sim.pairs) == 1:
        return
    # cur: the graph at the end of acc, with an edge map onto the current pair's primal
    to_pair = {e: e for e in acc.graphs[-1].edges}
    for i, link in enumerate(sim.links):
        pair = sim.pairs[i]
        nxt = sim.pairs[i + 1]
        if link.side == PRIMAL:
            to_pair = _compose(to_pair, link.witness.mapping)
            continue
        cur = acc.graphs[-1]
        emb = pair.embedding
        if cur != pair.primal or any(k != v for k, v in to_pair.items()):
            vmap = induced_vertex_map(cur, pair.primal, to_pair)
            emb = Embedding(cur, transport(pair.embedding, cur, to_pair, vmap).rotation)
        d = pair.duality_map.mapping
        acc.push(nxt.dual, _compose(_compose(to_pair, d), link.witness.mapping), emb)
        dinv = _inv(nxt.duality_map.mapping)
        acc.push(nxt.primal, dinv, nxt.dual_embedding)
        to_pair = {e: e for e in nxt.primal.edges}
    if acc.graphs[-1] != sim.last.primal:
        raise ChainError("duality chain ends at the wrong graph")


def _double_dual(emb: Embedding) -> tuple[Embedding, Embedding]:
    """Dual embedding and dual-of-dual embedding of a possibly disconnected primal."""
    d1 = geometric_dual(emb, allow_disconnected=True)
    d2 = geometric_dual(d1.embedding)
    return d1.embedding, d2.embedding


def duality_chain_2iso(f: EdgeBijection, check: bool = True) -> DualityChain:
    """Even-length chain of geometric duality maps composing to the 2-isomorphism ``f``.

    Disconnected ends are first replaced by a dual of a dual; the extra
    steps are kept so the chain starts and ends at the given graphs.
    """
    g, g2 = f.source, f.target
    if check and not is_2_isomorphism(f):
        raise NotA2Isomorphism("map does not preserve maximal forests")
    acc = _ChainAcc(g)
    if g == g2 and f.is_identity():
        return acc.build()

    def ident(x):
        return {e: e for e in x.edges}

    src = g
    if len(components(g)) != 1:
        e1 = any_embedding(g)
        d1, d2 = _double_dual(e1)
        acc.push(d1.graph, ident(g), e1)
        acc.push(d2.graph, ident(d1.graph), d1)
        src = d2.graph
    dst = g2
    tail = None
    if len(components(g2)) != 1:
        e2 = any_embedding(g2)
        d1, d2 = _double_dual(e2)
        dst = d2.graph
        tail = (e2, d1, d2)
    mid = EdgeBijection(src, dst, f.mapping)
    if not (src == dst and mid.is_identity()):
        sim = compress_chain(realize_2iso(mid, check=False))
        _chain_from_similarity(sim, acc)
    if tail is not None:
        e2, d1, d2 = tail
        acc.push(d1.graph, ident(d2.graph), d2)
        acc.push(g2, ident(d1.graph), e2, forward=False)
    out = acc.build()
    if out.composition().mapping != f.mapping:
        raise ChainError("chain does not compose to the input map")
    return out


def duality_chain_adual(f: EdgeBijection, check: bool = True) -> DualityChain:
    """Odd-length chain of geometric duality maps composing to the abstract duality ``f``."""
    g, g2 = f.source, f.target
    if check and not is_abstract_duality(f):
        raise NotAnAbstractDuality("map does not send forests to complements of forests")
    if len(components(g)) == 1 and len(components(g2)) == 1:
        emb = find_dual_embedding(g, f, g2)
        if emb is not None:
            acc = _ChainAcc(g)
            acc.push(g2, dict(f.mapping), emb)
            return acc.build()
    emb = any_embedding(g)
    d = geometric_dual(emb, allow_disconnected=True)
    acc = _ChainAcc(g)
    acc.push(d.graph, dict(d.duality_map.mapping), emb)
    rest = EdgeBijection(d.graph, g2, {d.duality_map.mapping[e]: f.mapping[e] for e in g.edges})
    tail = duality_chain_2iso(rest, check=False)
    for m, s, nxt in zip(tail.maps, tail.steps, tail.graphs[1:]):
        acc.push(nxt, dict(m.mapping), s.embedding, s.forward)
    out = acc.build()
    if out.composition().mapping != f.mapping:
        raise ChainError("chain does not compose to the input map")
    return out


def verify_chain(chain: DualityChain, expected: EdgeBijection, kind: str) -> bool:
    """Re-derive every step from its embedding, then check composition and parity.

    ``kind`` is ``"two_iso"`` (even number of maps) or ``"abstract_dual"`` (odd).
    """
    if kind not in ("two_iso", "abstract_dual"):
        raise ValueError(f"unknown chain kind {kind!r}")
    k = len(chain.maps)
    if (k % 2) != (0 if kind == "two_iso" else 1):
        return False
    if chain.graphs[0] != expected.source or chain.graphs[-1] != expected.target:
        return False
    try:
        for i, (m, step) in enumerate(zip(chain.maps, chain.steps)):
            a, b = chain.graphs[i], chain.graphs[i + 1]
            if m.source != a or m.target != b:
                return False
            emb = step.embedding
            own, other = (a, b) if step.forward else (b, a)
            emap = m.mapping if step.forward else _inv(m.mapping)
            if emb.graph != own:
                return False
            emb = Embedding(own, emb.rotation)  # re-checks sphericity
            dual = geometric_dual(emb, allow_disconnected=True)
            if induced_vertex_map(dual.graph, other, emap) is None:
                return False
    except (ValueError, KeyError):
        return False
    return chain.composition().mapping == expected.mapping
