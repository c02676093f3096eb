"""Abstract duality maps, 2-isomorphisms and graph isomorphisms.

Checks run against subset-exhaustive rank tables up to ``EXACT_LIMIT``
edges. Larger inputs (up to the caller's ``limit``) are checked on the
maximal forests of the source plus a matrix-tree count of the target's
forests; since the map is injective, equal counts make that check exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from . import _kernels
from .bijection import EdgeBijection
from .errors import TooLarge
from .graphcore import MultiGraph, _DSU, components

__all__ = [
    "EdgeBijection",
    "IsomorphismResult",
    "find_2_isomorphism",
    "find_abstract_duality",
    "is_2_isomorphism",
    "is_abstract_duality",
    "is_graph_isomorphism",
]

EXACT_LIMIT = 16
CHECK_LIMIT = 24
SEARCH_LIMIT = 12


# ---------------------------------------------------------------------------
# rank tables


@lru_cache(maxsize=4096)
def _rank_table(g: MultiGraph) -> np.ndarray:
    index = {v: i for i, v in enumerate(g.vertices)}
    ends = np.array([[index[a], index[b]] for a, b in g.edges.values()], dtype=np.int64).reshape(-1, 2)
    table = _kernels.rank_table(ends, g.n_vertices)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=4096)
def _dual_rank_table(g: MultiGraph) -> np.ndarray:
    table = _kernels.dual_table(_rank_table(g), g.n_edges)
    table.setflags(write=False)
    return table


def rank_table(g: MultiGraph) -> np.ndarray:
    """Rank of every edge subset; bit ``i`` of the index is the ``i``-th smallest edge id."""
    if g.n_edges > EXACT_LIMIT:
        raise TooLarge(f"{g.n_edges} edges exceeds the exhaustive limit {EXACT_LIMIT}")
    return _rank_table(g)


def _perm(f: EdgeBijection) -> np.ndarray:
    tpos = {e: i for i, e in enumerate(f.target.edges)}
    return np.array([tpos[f.mapping[e]] for e in f.source.edges], dtype=np.int64)


# ---------------------------------------------------------------------------
# forests and bases


def _forest_rank(g: MultiGraph) -> int:
    return g.n_vertices - len(components(g))


def _is_basis(g: MultiGraph, edges, r: int) -> bool:
    edges = list(edges)
    if len(edges) != r:
        return False
    dsu = _DSU(g.vertices)
    return all(dsu.union(*g.edges[e]) for e in edges)


def iter_maximal_forests(g: MultiGraph) -> Iterator[frozenset[int]]:
    """All maximal forests, by include/exclude branching on ascending edge ids."""
    order = list(g.edges)
    r = _forest_rank(g)

    def rec(i, chosen, parent):
        if len(chosen) == r:
            yield frozenset(chosen)
            return
        if len(order) - i < r - len(chosen):
            return
        e = order[i]
        a, b = g.edges[e]

        def find(p, x):
            while p[x] != x:
                x = p[x]
            return x

        ra, rb = find(parent, a), find(parent, b)
        if ra != rb:
            p2 = dict(parent)
            p2[rb] = ra
            chosen.append(e)
            yield from rec(i + 1, chosen, p2)
            chosen.pop()
        # exclusion is only viable if the rest can still span
        yield from rec(i + 1, chosen, parent)

    yield from rec(0, [], {v: v for v in g.vertices})


def count_maximal_forests(g: MultiGraph) -> int:
    """Matrix-tree theorem, one reduced Laplacian per component (loops ignored)."""
    total = 1
    for comp in components(g):
        vs = sorted(comp)
        if len(vs) == 1:
            continue
        idx = {v: i for i, v in enumerate(vs)}
        lap = np.zeros((len(vs), len(vs)))
        for a, b in g.edges.values():
            if a == b or a not in idx:
                continue
            i, j = idx[a], idx[b]
            lap[i, i] += 1
            lap[j, j] += 1
            lap[i, j] -= 1
            lap[j, i] -= 1
        total *= int(round(np.linalg.det(lap[1:, 1:])))
    return total


# ---------------------------------------------------------------------------
# checks


def _check_size(f: EdgeBijection, limit: int) -> None:
    if len(f) > limit:
        raise TooLarge(f"{len(f)} edges exceeds the configured limit {limit}")


def is_2_isomorphism(f: EdgeBijection, limit: int = CHECK_LIMIT) -> bool:
    """True iff ``f`` sends the maximal forests of its source onto those of its target."""
    _check_size(f, limit)
    g, h = f.source, f.target
    if _forest_rank(g) != _forest_rank(h):
        return False
    m = len(f)
    if m == 0:
        return True
    if m <= EXACT_LIMIT:
        return _kernels.rank_identity(_rank_table(g), _rank_table(h), _perm(f), False)
    r = _forest_rank(g)
    for forest in iter_maximal_forests(g):
        if not _is_basis(h, (f.mapping[e] for e in forest), r):
            return False
    return count_maximal_forests(g) == count_maximal_forests(h)


def is_abstract_duality(f: EdgeBijection, limit: int = CHECK_LIMIT) -> bool:
    """True iff ``f`` sends maximal forests of its source to complements of maximal forests."""
    _check_size(f, limit)
    g, h = f.source, f.target
    m = len(f)
    if _forest_rank(h) != m - _forest_rank(g):
        return False
    if m == 0:
        return True
    if m <= EXACT_LIMIT:
        return _kernels.rank_identity(_rank_table(g), _rank_table(h), _perm(f), True)
    rh = _forest_rank(h)
    for forest in iter_maximal_forests(g):
        image = {f.mapping[e] for e in forest}
        if not _is_basis(h, (e for e in h.edges if e not in image), rh):
            return False
    return count_maximal_forests(g) == count_maximal_forests(h)


# ---------------------------------------------------------------------------
# search


def _edge_classes(table: np.ndarray, m: int) -> list[tuple]:
    full = (1 << m) - 1
    rfull = int(table[full])
    prof = _kernels.circuit_profile(table, m)
    dual = _kernels.dual_table(table, m)
    coprof = _kernels.circuit_profile(dual, m)
    out = []
    for i in range(m):
        loop = int(table[1 << i]) == 0
        coloop = int(table[full ^ (1 << i)]) == rfull - 1
        out.append((loop, coloop, tuple(prof[i]), tuple(coprof[i])))
    return out


def _search(
    g: MultiGraph,
    h: MultiGraph,
    src_table: np.ndarray,
    tgt_table: np.ndarray,
    sign_rule: int | None,
    first_choices=None,
) -> dict[int, int] | None:
    m = g.n_edges
    src_edges = list(g.edges)
    tgt_edges = list(h.edges)
    cs = _edge_classes(src_table, m)
    ct = _edge_classes(tgt_table, m)
    if sorted(cs) != sorted(ct):
        return None
    cand = []
    for i in range(m):
        opts = [
            j
            for j in range(m)
            if ct[j] == cs[i]
            and (sign_rule is None or h.signs[tgt_edges[j]] == sign_rule * g.signs[src_edges[i]])
        ]
        if not opts:
            return None
        cand.append(opts)
    if first_choices is not None and m:
        cand[0] = [j for j in cand[0] if j in first_choices]
    src_t = np.asarray(src_table)
    tgt_t = np.asarray(tgt_table)
    used = [False] * m
    assign = [0] * m

    def rec(k, smasks, tmasks):
        if k == m:
            return True
        bit = 1 << k
        for j in cand[k]:
            if used[j]:
                continue
            ns = smasks | bit
            nt = tmasks | (1 << j)
            if not np.array_equal(src_t[ns], tgt_t[nt]):
                continue
            used[j] = True
            assign[k] = j
            if rec(k + 1, np.concatenate([smasks, ns]), np.concatenate([tmasks, nt])):
                return True
            used[j] = False
        return False

    start = np.zeros(1, dtype=np.int64)
    if not rec(0, start, start.copy()):
        return None
    return {src_edges[i]: tgt_edges[assign[i]] for i in range(m)}


def _prepare(g: MultiGraph, h: MultiGraph, signed: bool, limit: int) -> bool:
    if g.n_edges > limit or h.n_edges > limit:
        raise TooLarge(f"search limited to {limit} edges")
    if signed and (g.signs is None or h.signs is None):
        raise ValueError("signed search needs signed graphs")
    return g.n_edges == h.n_edges


def _search_jobs(g, h, src, tgt, sign_rule, jobs):
    if jobs <= 1 or g.n_edges < 2:
        return _search(g, h, src, tgt, sign_rule)
    from concurrent.futures import ProcessPoolExecutor

    m = g.n_edges
    parts = [[j] for j in range(m)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_search_worker, [(g, h, src, tgt, sign_rule, p) for p in parts]))
    for r in results:
        if r is not None:
            return r  # parts are in ascending order of the first image
    return None


def _search_worker(args):
    g, h, src, tgt, sign_rule, part = args
    return _search(g, h, src, tgt, sign_rule, first_choices=set(part))


def find_2_isomorphism(
    g: MultiGraph, h: MultiGraph, signed: bool = False, limit: int = SEARCH_LIMIT, jobs: int = 1
) -> EdgeBijection | None:
    """Lexicographically least 2-isomorphism ``g -> h`` (sign-preserving if ``signed``)."""
    if not _prepare(g, h, signed, limit):
        return None
    if _forest_rank(g) != _forest_rank(h):
        return None
    if g.n_edges == 0:
        return EdgeBijection(g, h, {})
    found = _search_jobs(g, h, _rank_table(g), _rank_table(h), 1 if signed else None, jobs)
    return None if found is None else EdgeBijection(g, h, found)


def find_abstract_duality(
    g: MultiGraph, h: MultiGraph, signed: bool = False, limit: int = SEARCH_LIMIT, jobs: int = 1
) -> EdgeBijection | None:
    """Lexicographically least abstract duality map ``g -> h`` (sign-reversing if ``signed``)."""
    if not _prepare(g, h, signed, limit):
        return None
    if _forest_rank(h) != g.n_edges - _forest_rank(g):
        return None
    if g.n_edges == 0:
        return EdgeBijection(g, h, {})
    found = _search_jobs(g, h, _dual_rank_table(g), _rank_table(h), -1 if signed else None, jobs)
    return None if found is None else EdgeBijection(g, h, found)


# ---------------------------------------------------------------------------
# graph isomorphism


@dataclass(frozen=True)
class IsomorphismResult:
    found: bool
    witness: EdgeBijection | None = None
    vertex_map: dict | None = None

    def __bool__(self):
        return self.found


def _pair_table(g: MultiGraph, respect_signs: bool) -> dict[tuple[int, int], list[int]]:
    table: dict[tuple[int, int], list[int]] = {}
    for e, (a, b) in g.edges.items():
        key = (a, b) if a <= b else (b, a)
        table.setdefault(key, []).append(e)
    return table


def _pair_key(g, edges, respect_signs):
    if not edges:
        return ()
    if respect_signs:
        return tuple(sorted(g.signs[e] for e in edges))
    return (len(edges),)


def _vertex_invariants(g: MultiGraph, pt, respect_signs: bool) -> dict[int, tuple]:
    nbr: dict[int, list] = {v: [] for v in g.vertices}
    for (a, b), es in pt.items():
        k = _pair_key(g, es, respect_signs)
        if a == b:
            nbr[a].append(("loop", k))
        else:
            nbr[a].append(("edge", k))
            nbr[b].append(("edge", k))
    inv = {v: (g.degree(v), tuple(sorted(x))) for v, x in nbr.items()}
    # two rounds of colour refinement
    for _ in range(2):
        new = {}
        for v in g.vertices:
            around = []
            for e in g.incident(v):
                w = g.other(e, v)
                around.append(inv[w])
            new[v] = (inv[v], tuple(sorted(around)))
        inv = new
    return inv


def is_graph_isomorphism(
    g: MultiGraph, h: MultiGraph, respect_signs: bool = False, limit: int = 64
) -> IsomorphismResult:
    """Multigraph isomorphism by vertex backtracking with refinement pruning.

    The witness pairs parallel edges in ascending ``(sign, id)`` order, so
    it is deterministic.
    """
    if g.n_edges > limit or h.n_edges > limit:
        raise TooLarge(f"isomorphism search limited to {limit} edges")
    if g.n_vertices != h.n_vertices or g.n_edges != h.n_edges:
        return IsomorphismResult(False)
    if respect_signs and (g.signs is None or h.signs is None):
        raise ValueError("sign-respecting isomorphism needs signed graphs")
    ptg = _pair_table(g, respect_signs)
    pth = _pair_table(h, respect_signs)
    ig = _vertex_invariants(g, ptg, respect_signs)
    ih = _vertex_invariants(h, pth, respect_signs)
    if sorted(ig.values()) != sorted(ih.values()):
        return IsomorphismResult(False)

    def key(t, graph, u, v):
        k = (u, v) if u <= v else (v, u)
        return _pair_key(graph, t.get(k, ()), respect_signs)

    # BFS order from the rarest invariant keeps the partial map connected
    counts: dict[tuple, int] = {}
    for x in ig.values():
        counts[x] = counts.get(x, 0) + 1
    order: list[int] = []
    seen: set[int] = set()
    for root in sorted(g.vertices, key=lambda v: (counts[ig[v]], v)):
        if root in seen:
            continue
        queue = [root]
        seen.add(root)
        while queue:
            v = queue.pop(0)
            order.append(v)
            for e in g.incident(v):
                w = g.other(e, v)
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    by_inv: dict[tuple, list[int]] = {}
    for x in h.vertices:
        by_inv.setdefault(ih[x], []).append(x)
    phi: dict[int, int] = {}
    used: set[int] = set()

    def rec(k):
        if k == len(order):
            return True
        u = order[k]
        for x in by_inv[ig[u]]:
            if x in used:
                continue
            if key(ptg, g, u, u) != key(pth, h, x, x):
                continue
            if any(key(ptg, g, u, w) != key(pth, h, x, phi[w]) for w in order[:k]):
                continue
            phi[u] = x
            used.add(x)
            if rec(k + 1):
                return True
            del phi[u]
            used.discard(x)
        return False

    if not rec(0):
        return IsomorphismResult(False)
    emap: dict[int, int] = {}
    for (a, b), es in ptg.items():
        x, y = phi[a], phi[b]
        tk = (x, y) if x <= y else (y, x)
        ts = pth[tk]
        sk = (lambda gr: (lambda e: (gr.signs[e] if respect_signs else 0, e)))
        for e, t in zip(sorted(es, key=sk(g)), sorted(ts, key=sk(h))):
            emap[e] = t
    return IsomorphismResult(True, EdgeBijection(g, h, emap), dict(phi))
