"""Exhaustive small corpora: connected multigraphs and planar maps.

Graphs are grown one edge at a time (a loop, an edge between existing
vertices, or a pendant edge to a new vertex) and deduplicated up to
isomorphism. Every connected graph with ``m >= 1`` edges arises this way,
since deleting a cycle edge or a leaf leaves a connected graph.

Maps (connected graphs with a sphere embedding) are grown the same way,
except that a new chord must join two corners of one face. They are
deduplicated with a canonical code that is minimal over all root darts, so
``2m / |Aut|`` distinct rootings per map can be counted and compared with
Tutte's formula for rooted planar maps.
"""

from __future__ import annotations

from math import factorial
from typing import Iterator

from .embed import Embedding
from .graphcore import MultiGraph
from .matroid import _pair_table, _vertex_invariants, is_graph_isomorphism

__all__ = [
    "connected_multigraphs",
    "planar_maps",
    "rooted_map_count",
    "map_code",
    "rooted_codes",
]


# ---------------------------------------------------------------------------
# graphs


def _graph_key(g: MultiGraph) -> tuple:
    inv = _vertex_invariants(g, _pair_table(g, False), False)
    return (g.n_vertices, g.n_edges, tuple(sorted(inv.values())))


def _extensions(g: MultiGraph) -> Iterator[MultiGraph]:
    m = g.n_edges
    vs = g.vertices
    for i, a in enumerate(vs):
        for b in vs[i:]:
            yield MultiGraph(vs, {**g.edges, m: (a, b)})
    new = max(vs) + 1
    for a in vs:
        yield MultiGraph(vs + (new,), {**g.edges, m: (a, new)})


def connected_multigraphs(max_edges: int) -> list[MultiGraph]:
    """All connected multigraphs (loops allowed) with at most ``max_edges`` edges, one per class.

    Vertices are ``0..n-1`` and edges ``0..m-1``. Ordered by edge count,
    then by discovery order (deterministic).
    """
    level = [MultiGraph([0], {})]
    out = list(level)
    for _ in range(max_edges):
        buckets: dict[tuple, list[MultiGraph]] = {}
        nxt = []
        for g in level:
            for h in _extensions(g):
                key = _graph_key(h)
                bucket = buckets.setdefault(key, [])
                if any(is_graph_isomorphism(h, x) for x in bucket):
                    continue
                bucket.append(h)
                nxt.append(h)
        level = nxt
        out.extend(level)
    return out


# ---------------------------------------------------------------------------
# maps as permutations: darts 0..2m-1, twin(d) = d ^ 1, succ a permutation


def map_code(succ: list[int], root: int) -> tuple[int, ...]:
    """Code of a rooted map: darts relabelled in BFS order over ``succ`` and twin."""
    label = {root: 0}
    order = [root]
    i = 0
    while i < len(order):
        d = order[i]
        for x in (succ[d], d ^ 1):
            if x not in label:
                label[x] = len(order)
                order.append(x)
        i += 1
    return tuple(v for d in order for v in (label[succ[d]], label[d ^ 1]))


def rooted_codes(succ: list[int]) -> set[tuple[int, ...]]:
    return {map_code(succ, r) for r in range(len(succ))}


def _faces(succ: list[int]) -> list[int]:
    face = [-1] * len(succ)
    k = 0
    for d in range(len(succ)):
        if face[d] >= 0:
            continue
        x = d
        while face[x] < 0:
            face[x] = k
            x = succ[x ^ 1]
        k += 1
    return face


def _map_extensions(succ: list[int]) -> Iterator[list[int]]:
    n = len(succ)
    a, b = n, n + 1  # darts of the new edge
    if n == 0:
        yield [1, 0]  # a loop at the lone vertex
        yield [0, 1]  # a pendant edge to a new vertex
        return
    face = _faces(succ)
    # corners are named by the dart before them in the rotation
    for x in range(n):
        # pendant edge to a new vertex in the corner after x
        s = succ[:] + [0, 0]
        s[x], s[a] = a, succ[x]
        s[b] = b
        yield s
        for y in range(x, n):
            # the corner after y must lie in the same face as the corner after x;
            # swapping the two new darts gives an isomorphic map, so one order suffices
            if face[succ[x]] != face[succ[y]]:
                continue
            s = succ[:] + [0, 0]
            if x == y:
                s[x], s[a], s[b] = a, b, succ[x]
            else:
                s[x], s[a] = a, succ[x]
                s[y], s[b] = b, succ[y]
            yield s


def _is_spherical(succ: list[int]) -> bool:
    n = len(succ)
    if n == 0:
        return True
    seen = [False] * n
    v = 0
    for d in range(n):
        if not seen[d]:
            v += 1
            x = d
            while not seen[x]:
                seen[x] = True
                x = succ[x]
    f = max(_faces(succ)) + 1
    return v - n // 2 + f == 2


def _to_embedding(succ: list[int]) -> Embedding:
    n = len(succ)
    if n == 0:
        return Embedding(MultiGraph([0], {}), {0: ()})
    vert = [-1] * n
    rot: dict[int, tuple[int, ...]] = {}
    for d in range(n):
        if vert[d] >= 0:
            continue
        k = len(rot)
        cyc = []
        x = d
        while vert[x] < 0:
            vert[x] = k
            cyc.append(x)
            x = succ[x]
        rot[k] = tuple(cyc)
    edges = {e: (vert[2 * e], vert[2 * e + 1]) for e in range(n // 2)}
    return Embedding(MultiGraph(range(len(rot)), edges), rot)


def planar_maps(max_edges: int, with_counts: bool = False):
    """One representative of every planar map with at most ``max_edges`` edges.

    Yields embeddings, or ``(embedding, number_of_rootings)`` with
    ``with_counts``.
    """
    level: dict[tuple, list[int]] = {(): []}
    for m in range(max_edges + 1):
        for code, succ in level.items():
            emb = _to_embedding(succ)
            if with_counts:
                yield emb, len(rooted_codes(succ)) if succ else 1
            else:
                yield emb
        if m == max_edges:
            break
        nxt: dict[tuple, list[int]] = {}
        for succ in level.values():
            for s in _map_extensions(succ):
                if not _is_spherical(s):
                    continue
                code = min(rooted_codes(s))
                if code not in nxt:
                    nxt[code] = s
        level = dict(sorted(nxt.items()))


def rooted_map_count(m: int) -> int:
    """Tutte: rooted planar maps with ``m`` edges, ``2 * 3**m * (2m)! / (m! (m+2)!)``."""
    return 2 * 3**m * factorial(2 * m) // (factorial(m) * factorial(m + 2))
