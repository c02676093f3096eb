"""Multigraphs with loops and parallel edges.

Edge ids are stable small integers and every higher-level object (edge
bijections, rotation systems, chains) is expressed in terms of them.
Vertex ids are integers too but carry no meaning beyond identity; they are
freely renumbered by joins and surgeries.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import BadAttachment, UnknownEdge, UnknownVertex

__all__ = [
    "MultiGraph",
    "Block",
    "BlockDecomposition",
    "JoinInfo",
    "SpanningForest",
    "blocks",
    "components",
    "cut_vertices",
    "is_connected",
    "maximal_forest",
    "one_point_union",
    "rank",
]


@dataclass(frozen=True)
class JoinInfo:
    """Provenance of a one-point union.

    ``vertex`` is the identified vertex, ``parts`` the edge set of each
    part, and ``vertex_maps[i]`` sends the vertex ids of part ``i`` to the
    ids used in the union.
    """

    vertex: int
    parts: tuple[frozenset[int], ...]
    vertex_maps: tuple[Mapping[int, int], ...]


class MultiGraph:
    """Finite undirected multigraph.

    ``edges`` maps an edge id to its ordered endpoint pair ``(a, b)``; the
    order fixes which end is slot ``A`` and which is slot ``B`` (darts are
    built from those slots). Loops have ``a == b``. ``signs`` is optional
    and, when present, must assign ``+1`` or ``-1`` to every edge.
    """

    __slots__ = ("vertices", "edges", "signs", "join", "_inc", "_hash")

    def __init__(
        self,
        vertices: Iterable[int],
        edges: Mapping[int, tuple[int, int]] | Iterable[tuple[int, int, int]],
        signs: Mapping[int, int] | None = None,
        join: JoinInfo | None = None,
    ):
        vs = tuple(sorted(set(int(v) for v in vertices)))
        if isinstance(edges, Mapping):
            items = [(int(e), (int(ab[0]), int(ab[1]))) for e, ab in edges.items()]
        else:
            items = [(int(e), (int(a), int(b))) for e, a, b in edges]
        items.sort()
        emap = dict(items)
        if len(emap) != len(items):
            raise ValueError("duplicate edge id")
        vset = set(vs)
        for e, (a, b) in emap.items():
            if a not in vset or b not in vset:
                raise UnknownVertex(f"edge {e} has an endpoint outside the vertex set")
        if signs is not None:
            signs = {int(e): int(s) for e, s in signs.items()}
            if set(signs) != set(emap):
                raise ValueError("signs must cover exactly the edge set")
            if any(s not in (1, -1) for s in signs.values()):
                raise ValueError("edge signs must be +1 or -1")
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", emap)
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "join", join)
        object.__setattr__(self, "_inc", None)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("MultiGraph is immutable")

    def __reduce__(self):
        return (MultiGraph, (self.vertices, self.edges, self.signs, self.join))

    # -- basic accessors -------------------------------------------------

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(self.edges)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def endpoints(self, e: int) -> tuple[int, int]:
        try:
            return self.edges[e]
        except KeyError:
            raise UnknownEdge(e) from None

    def is_loop(self, e: int) -> bool:
        a, b = self.endpoints(e)
        return a == b

    def other(self, e: int, v: int) -> int:
        a, b = self.endpoints(e)
        return b if v == a else a

    def incident(self, v: int) -> tuple[int, ...]:
        """Edge ids incident on ``v`` (a loop appears once)."""
        inc = self._incidence()
        try:
            return inc[v]
        except KeyError:
            raise UnknownVertex(v) from None

    def degree(self, v: int) -> int:
        return sum(2 if self.is_loop(e) else 1 for e in self.incident(v))

    def _incidence(self) -> dict[int, tuple[int, ...]]:
        if self._inc is None:
            inc: dict[int, list[int]] = {v: [] for v in self.vertices}
            for e, (a, b) in self.edges.items():
                inc[a].append(e)
                if b != a:
                    inc[b].append(e)
            object.__setattr__(self, "_inc", {v: tuple(es) for v, es in inc.items()})
        return self._inc

    def sign(self, e: int) -> int:
        if self.signs is None:
            raise ValueError("graph is unsigned")
        return self.signs[e]

    # -- derived graphs --------------------------------------------------

    def with_signs(self, signs: Mapping[int, int] | None) -> "MultiGraph":
        return MultiGraph(self.vertices, self.edges, signs, self.join)

    def unsigned(self) -> "MultiGraph":
        return MultiGraph(self.vertices, self.edges, None, self.join)

    def edge_subgraph(self, edge_ids: Iterable[int], keep_vertices: bool = False) -> "MultiGraph":
        es = sorted(set(edge_ids))
        for e in es:
            self.endpoints(e)
        sub = {e: self.edges[e] for e in es}
        if keep_vertices:
            vs: Iterable[int] = self.vertices
        else:
            vs = {x for ab in sub.values() for x in ab}
        signs = None if self.signs is None else {e: self.signs[e] for e in es}
        return MultiGraph(vs, sub, signs)

    def relabel(
        self,
        vertex_map: Mapping[int, int] | None = None,
        edge_map: Mapping[int, int] | None = None,
    ) -> "MultiGraph":
        """Rename vertices and/or edges (both maps must be injective)."""
        vm = (lambda v: vertex_map[v]) if vertex_map is not None else (lambda v: v)
        em = (lambda e: edge_map[e]) if edge_map is not None else (lambda e: e)
        edges = {em(e): (vm(a), vm(b)) for e, (a, b) in self.edges.items()}
        signs = None if self.signs is None else {em(e): s for e, s in self.signs.items()}
        return MultiGraph([vm(v) for v in self.vertices], edges, signs)

    # -- identity ---------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, MultiGraph):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self.edges == other.edges
            and self.signs == other.signs
        )

    def __hash__(self):
        if self._hash is None:
            h = hash(
                (
                    self.vertices,
                    tuple(self.edges.items()),
                    None if self.signs is None else tuple(sorted(self.signs.items())),
                )
            )
            object.__setattr__(self, "_hash", h)
        return self._hash

    def __repr__(self):
        es = ", ".join(f"{e}:{a}-{b}" for e, (a, b) in self.edges.items())
        return f"MultiGraph(V={list(self.vertices)}, E=[{es}])"


# ---------------------------------------------------------------------------
# connectivity


class _DSU:
    __slots__ = ("parent",)

    def __init__(self, items: Iterable[int]):
        self.parent = {x: x for x in items}

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if rx > ry:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True


def components(g: MultiGraph) -> list[frozenset[int]]:
    """Vertex sets of the connected components, ordered by least vertex."""
    dsu = _DSU(g.vertices)
    for a, b in g.edges.values():
        dsu.union(a, b)
    groups: dict[int, list[int]] = {}
    for v in g.vertices:
        groups.setdefault(dsu.find(v), []).append(v)
    return sorted((frozenset(vs) for vs in groups.values()), key=min)


def is_connected(g: MultiGraph) -> bool:
    return len(components(g)) == 1


@dataclass(frozen=True)
class SpanningForest:
    edge_set: frozenset[int]
    host: MultiGraph = field(repr=False)


def maximal_forest(g: MultiGraph) -> SpanningForest:
    """Greedy maximal forest over ascending edge ids."""
    dsu = _DSU(g.vertices)
    chosen = [e for e, (a, b) in g.edges.items() if dsu.union(a, b)]
    return SpanningForest(frozenset(chosen), g)


def rank(g: MultiGraph, subset: Iterable[int]) -> int:
    """Cycle-matroid rank: size of a maximal forest inside ``subset``."""
    dsu = _DSU(g.vertices)
    r = 0
    for e in subset:
        if e not in g.edges:
            raise UnknownEdge(e)
        a, b = g.edges[e]
        r += dsu.union(a, b)
    return r


# ---------------------------------------------------------------------------
# blocks


@dataclass(frozen=True)
class Block:
    index: int
    edges: frozenset[int]
    vertices: frozenset[int]


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: tuple[Block, ...]
    cut_vertices: frozenset[int]
    # nodes are ("B", block index) and ("C", vertex)
    block_cut_tree: Mapping[tuple[str, int], tuple[tuple[str, int], ...]]

    def block_of_edge(self, e: int) -> Block:
        for b in self.blocks:
            if e in b.edges:
                return b
        raise UnknownEdge(e)

    def blocks_at(self, v: int) -> list[Block]:
        return [b for b in self.blocks if v in b.vertices]


def _block_edge_sets(g: MultiGraph) -> list[list[int]]:
    # iterative Hopcroft-Tarjan on edge ids so that parallel edges are back edges
    nonloop = {v: [e for e in g.incident(v) if not g.is_loop(e)] for v in g.vertices}
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    out: list[list[int]] = [[e] for e in g.edges if g.is_loop(e)]
    t = 0
    for root in g.vertices:
        if root in disc:
            continue
        disc[root] = low[root] = t
        t += 1
        stack = [(root, -1, iter(nonloop[root]))]
        estack: list[int] = []
        while stack:
            v, pe, it = stack[-1]
            pushed = False
            for e in it:
                if e == pe:
                    continue
                w = g.other(e, v)
                if w not in disc:
                    disc[w] = low[w] = t
                    t += 1
                    estack.append(e)
                    stack.append((w, e, iter(nonloop[w])))
                    pushed = True
                    break
                if disc[w] < disc[v]:
                    low[v] = min(low[v], disc[w])
                    estack.append(e)
            if pushed:
                continue
            stack.pop()
            if stack:
                u = stack[-1][0]
                low[u] = min(low[u], low[v])
                if low[v] >= disc[u]:
                    comp = []
                    while True:
                        x = estack.pop()
                        comp.append(x)
                        if x == pe:
                            break
                    out.append(comp)
    return out


def blocks(g: MultiGraph) -> BlockDecomposition:
    """Block decomposition, with loops as blocks of their own.

    Blocks are ordered by least edge id; edgeless blocks (isolated
    vertices) come last, ordered by vertex.
    """
    edge_sets = sorted((sorted(c) for c in _block_edge_sets(g)), key=lambda c: c[0])
    covered = set()
    bl = []
    for i, es in enumerate(edge_sets):
        vs = frozenset(x for e in es for x in g.edges[e])
        covered |= vs
        bl.append(Block(i, frozenset(es), vs))
    for v in g.vertices:
        if v not in covered:
            bl.append(Block(len(bl), frozenset(), frozenset([v])))
    count: dict[int, int] = {}
    for b in bl:
        for v in b.vertices:
            count[v] = count.get(v, 0) + 1
    cuts = frozenset(v for v, c in count.items() if c >= 2)
    tree: dict[tuple[str, int], list[tuple[str, int]]] = {}
    for b in bl:
        tree[("B", b.index)] = []
    for c in sorted(cuts):
        tree[("C", c)] = []
    for b in bl:
        for c in sorted(b.vertices & cuts):
            tree[("B", b.index)].append(("C", c))
            tree[("C", c)].append(("B", b.index))
    return BlockDecomposition(
        tuple(bl), cuts, {k: tuple(sorted(v)) for k, v in tree.items()}
    )


def cut_vertices(g: MultiGraph) -> frozenset[int]:
    return blocks(g).cut_vertices


def tree_distances(bd: BlockDecomposition, source: tuple[str, int]) -> dict[tuple[str, int], int]:
    dist = {source: 0}
    q = deque([source])
    while q:
        x = q.popleft()
        for y in bd.block_cut_tree[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                q.append(y)
    return dist


def shortest_path(g: MultiGraph, source: int, target: int) -> list[int] | None:
    """BFS vertex path from ``source`` to ``target``, neighbours by edge id."""
    prev = {source: None}
    q = deque([source])
    while q:
        v = q.popleft()
        if v == target:
            break
        for e in g.incident(v):
            w = g.other(e, v)
            if w not in prev:
                prev[w] = v
                q.append(w)
    if target not in prev:
        return None
    path = [target]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


# ---------------------------------------------------------------------------
# one-point unions


def one_point_union(parts: Sequence[MultiGraph], attach: Sequence[int]) -> MultiGraph:
    """Glue ``parts`` at one vertex each.

    Edge ids are kept (they must be disjoint across parts). Vertex ids of a
    part are kept unless they clash with an earlier part, in which case the
    part is shifted to fresh ids. The identified vertex always receives a
    fresh id, recorded in ``result.join``.
    """
    if len(parts) != len(attach):
        raise BadAttachment("need exactly one attachment vertex per part")
    if not parts:
        raise BadAttachment("nothing to join")
    seen_edges: set[int] = set()
    for p, v in zip(parts, attach):
        if v not in p.vertices:
            raise BadAttachment(f"vertex {v} is not in its part")
        if seen_edges & set(p.edges):
            raise ValueError("parts share edge ids")
        seen_edges |= set(p.edges)

    used: set[int] = set()
    nxt = 1 + max(max(p.vertices) for p in parts)
    maps: list[dict[int, int]] = []
    for p in parts:
        if used.isdisjoint(p.vertices):
            m = {v: v for v in p.vertices}
        else:
            m = {}
            for v in p.vertices:
                m[v] = nxt
                nxt += 1
        used |= set(m.values())
        maps.append(m)
    hub = max(used) + 1
    for m, v in zip(maps, attach):
        m[v] = hub

    vertices: set[int] = set()
    edges: dict[int, tuple[int, int]] = {}
    signed = all(p.signs is not None for p in parts)
    signs: dict[int, int] = {}
    for p, m in zip(parts, maps):
        vertices |= set(m.values())
        for e, (a, b) in p.edges.items():
            edges[e] = (m[a], m[b])
        if signed:
            signs.update(p.signs)
    info = JoinInfo(hub, tuple(frozenset(p.edges) for p in parts), tuple(maps))
    return MultiGraph(vertices, edges, signs if signed else None, info)


# ---------------------------------------------------------------------------
# isomorphisms with a prescribed edge map


def induced_vertex_map(
    g: MultiGraph, h: MultiGraph, edge_map: Mapping[int, int]
) -> dict[int, int] | None:
    """A vertex bijection realising ``edge_map`` as a graph isomorphism.

    Returns ``None`` when no vertex bijection carries every edge of ``g``
    onto its image with matching ends (loops onto loops). Each component is
    settled by the image of its least vertex, so at most two candidates are
    tried per component. Isolated vertices are paired in ascending order.
    """
    if g.n_vertices != h.n_vertices or g.n_edges != h.n_edges:
        return None
    if set(edge_map) != set(g.edges) or set(edge_map.values()) != set(h.edges):
        return None
    phi: dict[int, int] = {}
    isolated_g = []
    for comp in components(g):
        v0 = min(comp)
        inc = g.incident(v0)
        if not inc:
            isolated_g.append(v0)
            continue
        a, b = h.edges[edge_map[inc[0]]]
        for cand in dict.fromkeys((a, b)):
            trial = _propagate(g, h, edge_map, v0, cand)
            if trial is not None:
                phi.update(trial)
                break
        else:
            return None
    used = set(phi.values())
    if len(used) != len(phi):
        return None
    isolated_h = [v for v in h.vertices if not h.incident(v)]
    if len(isolated_h) != len(isolated_g):
        return None
    phi.update(zip(isolated_g, isolated_h))
    if len(set(phi.values())) != len(phi):
        return None
    return phi


def _propagate(g, h, edge_map, v0, w0):
    phi = {v0: w0}
    queue = deque([v0])
    while queue:
        x = queue.popleft()
        y = phi[x]
        for e in g.incident(x):
            a, b = g.edges[e]
            c, d = h.edges[edge_map[e]]
            if (a == b) != (c == d):
                return None
            if y not in (c, d):
                return None
            xo = b if x == a else a
            yo = d if y == c else c
            if xo in phi:
                if phi[xo] != yo:
                    return None
            else:
                phi[xo] = yo
                queue.append(xo)
    return phi
