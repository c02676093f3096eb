"""Sphere embeddings as rotation systems.

An edge ``e`` has two darts, ``2*e`` (slot A, at ``edges[e][0]``) and
``2*e + 1`` (slot B, at ``edges[e][1]``); a loop puts both darts at the same
vertex. A rotation lists the darts at each vertex in cyclic order. Faces
are the orbits of ``d -> succ(twin(d))``.

For a connected graph the rotation is spherical iff ``V - E + F = 2``.
Disconnected graphs are handled component-wise; where a single sphere
picture is needed (duals of disconnected graphs) the components are placed
side by side, each component's *outer* face being the face that contains
the first listed dart at its least vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, NamedTuple, Sequence

from .bijection import EdgeBijection
from .errors import BadRotation, DisconnectedPrimal, NonPlanar
from .graphcore import MultiGraph, components, induced_vertex_map

__all__ = [
    "Dart",
    "Embedding",
    "Face",
    "GeometricDual",
    "enumerate_spherical_embeddings",
    "find_dual_embedding",
    "geometric_dual",
    "is_spherical",
    "trace_faces",
]


class Dart(NamedTuple):
    edge: int
    end: str  # "A" or "B"

    @property
    def id(self) -> int:
        return 2 * self.edge + (self.end == "B")

    @classmethod
    def from_id(cls, d: int) -> "Dart":
        return cls(d >> 1, "B" if d & 1 else "A")


def dart_vertex(g: MultiGraph, d: int) -> int:
    return g.edges[d >> 1][d & 1]


def _as_dart_id(x) -> int:
    if isinstance(x, Dart):
        return x.id
    if isinstance(x, tuple):
        return Dart(int(x[0]), str(x[1])).id
    return int(x)


def _check_structure(graph: MultiGraph, rot: Mapping[int, tuple[int, ...]]) -> None:
    vs = set(graph.vertices)
    for v in rot:
        if v not in vs:
            raise BadRotation(f"rotation names unknown vertex {v}")
    for v in graph.vertices:
        darts = rot.get(v, ())
        want = set()
        for e in graph.incident(v):
            a, b = graph.edges[e]
            if a == v:
                want.add(2 * e)
            if b == v:
                want.add(2 * e + 1)
        if len(darts) != len(want) or set(darts) != want:
            raise BadRotation(f"darts listed at vertex {v} do not match its incident edge ends")


class Face(NamedTuple):
    boundary: tuple[int, ...]  # dart ids in traversal order, least dart first
    vertex: int | None = None  # set only for the empty face of an isolated vertex

    @property
    def edges(self) -> tuple[int, ...]:
        return tuple(d >> 1 for d in self.boundary)


class Embedding:
    """A rotation system over a :class:`MultiGraph`.

    With ``require_spherical`` (the default) construction fails with
    :class:`NonPlanar` unless every component satisfies Euler's formula.
    """

    __slots__ = ("graph", "rotation", "_succ", "_faces", "_face_of")

    def __init__(
        self,
        graph: MultiGraph,
        rotation: Mapping[int, Sequence],
        *,
        check: bool = True,
        require_spherical: bool = True,
    ):
        rot = {int(v): tuple(_as_dart_id(x) for x in ds) for v, ds in rotation.items()}
        for v in graph.vertices:
            rot.setdefault(v, ())
        self.graph = graph
        self.rotation = dict(sorted(rot.items()))
        self._succ = None
        self._faces = None
        self._face_of = None
        if check:
            _check_structure(graph, self.rotation)
        if require_spherical and not self.spherical:
            raise NonPlanar("rotation system is not spherical")

    # -- combinatorial map --------------------------------------------------

    def succ(self, d: int) -> int:
        if self._succ is None:
            s = {}
            for ds in self.rotation.values():
                k = len(ds)
                for i, x in enumerate(ds):
                    s[x] = ds[(i + 1) % k]
            self._succ = s
        return self._succ[d]

    def faces(self) -> list[Face]:
        if self._faces is None:
            seen: set[int] = set()
            out = []
            succ = self.succ
            for d in sorted(x for ds in self.rotation.values() for x in ds):
                if d in seen:
                    continue
                orbit = []
                x = d
                while x not in seen:
                    seen.add(x)
                    orbit.append(x)
                    x = succ(x ^ 1)
                out.append(Face(tuple(orbit)))
            for v, ds in self.rotation.items():
                if not ds:
                    out.append(Face((), v))
            self._faces = out
            fo = {}
            for i, f in enumerate(out):
                for x in f.boundary:
                    fo[x] = i
            self._face_of = fo
        return self._faces

    def face_of(self, d: int) -> int:
        """Index (into :meth:`faces`) of the face containing dart ``d``."""
        self.faces()
        return self._face_of[d]

    def corner_face(self, v: int, i: int) -> int:
        """Face index of the corner after position ``i`` in the rotation at ``v``."""
        ds = self.rotation[v]
        if not ds:
            return next(k for k, f in enumerate(self.faces()) if f.vertex == v)
        return self.face_of(ds[(i + 1) % len(ds)])

    @property
    def spherical(self) -> bool:
        g = self.graph
        comps = components(g)
        return g.n_vertices - g.n_edges + len(self.faces()) == 2 * len(comps)

    def outer_face(self, comp_min_vertex: int) -> int:
        ds = self.rotation[comp_min_vertex]
        if not ds:
            return next(k for k, f in enumerate(self.faces()) if f.vertex == comp_min_vertex)
        return self.face_of(ds[0])

    def darts_at(self, v: int) -> list[Dart]:
        return [Dart.from_id(d) for d in self.rotation[v]]

    def canonical_rotation(self) -> dict[int, tuple[int, ...]]:
        """Rotation with each cycle started at its least dart (for equality tests)."""
        out = {}
        for v, ds in self.rotation.items():
            if ds:
                i = ds.index(min(ds))
                ds = ds[i:] + ds[:i]
            out[v] = ds
        return out

    def __eq__(self, other):
        if not isinstance(other, Embedding):
            return NotImplemented
        return self.graph == other.graph and self.canonical_rotation() == other.canonical_rotation()

    def __hash__(self):
        return hash((self.graph, tuple(self.canonical_rotation().items())))

    def __repr__(self):
        rot = "; ".join(
            f"{v}: " + " ".join(f"{d >> 1}{'AB'[d & 1]}" for d in ds)
            for v, ds in self.rotation.items()
        )
        return f"Embedding({rot})"


def trace_faces(emb: Embedding) -> list[Face]:
    """Faces of ``emb`` ordered by least dart; empty faces of isolated vertices last."""
    return list(emb.faces())


def is_spherical(graph: MultiGraph, rotation: Mapping[int, Sequence]) -> bool:
    """Structural check (raises :class:`BadRotation`), then Euler per component."""
    emb = Embedding(graph, rotation, check=True, require_spherical=False)
    return emb.spherical


# ---------------------------------------------------------------------------
# duals


class GeometricDual(NamedTuple):
    graph: MultiGraph
    duality_map: EdgeBijection
    embedding: Embedding


def geometric_dual(emb: Embedding, allow_disconnected: bool = False) -> GeometricDual:
    """Geometric dual of a spherical embedding.

    The dual keeps the primal edge ids, so the duality map is the identity
    on ids. Its vertices are numbered by face order. The returned embedding
    lists, at each dual vertex, the boundary darts of the face in
    traversal order; dualising it again returns the primal rotation.
    Edge signs, when present, are negated (the checkerboard convention).
    """
    g = emb.graph
    comps = components(g)
    if len(comps) > 1 and not allow_disconnected:
        raise DisconnectedPrimal("geometric dual requires a connected primal")
    if not emb.spherical:
        raise NonPlanar("embedding is not spherical")
    faces = emb.faces()
    group = list(range(len(faces)))
    if len(comps) > 1:
        outer = sorted(emb.outer_face(min(c)) for c in comps)
        for f in outer:
            group[f] = outer[0]
    ids: dict[int, int] = {}
    for f in range(len(faces)):
        ids.setdefault(group[f], len(ids))
    fo = {}
    for i, f in enumerate(faces):
        for x in f.boundary:
            fo[x] = ids[group[i]]
    edges = {e: (fo[2 * e], fo[2 * e + 1]) for e in g.edges}
    rot: dict[int, list[int]] = {v: [] for v in ids.values()}
    for i, f in enumerate(faces):
        rot[ids[group[i]]].extend(f.boundary)
    h = MultiGraph(ids.values(), edges, None if g.signs is None else {e: -s for e, s in g.signs.items()})
    hemb = Embedding(h, rot, check=False, require_spherical=False)
    return GeometricDual(h, EdgeBijection(g, h, {e: e for e in g.edges}), hemb)


# ---------------------------------------------------------------------------
# rotation-system surgery helpers


def restrict(emb: Embedding, edge_ids) -> Embedding:
    """Delete every edge outside ``edge_ids`` (and vertices left without edges)."""
    keep = set(edge_ids)
    sub = emb.graph.edge_subgraph(keep)
    rot = {v: tuple(d for d in emb.rotation[v] if (d >> 1) in keep) for v in sub.vertices}
    return Embedding(sub, rot, check=False, require_spherical=False)


def transport(
    emb: Embedding, onto: MultiGraph, edge_map: Mapping[int, int], vertex_map: Mapping[int, int]
) -> Embedding:
    """Pull ``emb`` back along an isomorphism ``onto -> emb.graph``.

    ``edge_map`` and ``vertex_map`` send edges/vertices of ``onto`` to those
    of ``emb.graph``. Loop darts keep their slot.
    """
    inv_e = {t: s for s, t in edge_map.items()}
    inv_v = {t: s for s, t in vertex_map.items()}
    rot = {}
    for w, ds in emb.rotation.items():
        v = inv_v[w]
        out = []
        for d in ds:
            e = inv_e[d >> 1]
            a, b = onto.edges[e]
            if a == b:
                out.append(2 * e + (d & 1))
            else:
                out.append(2 * e + (0 if a == v else 1))
        rot[v] = tuple(out)
    return Embedding(onto, rot, check=False, require_spherical=False)


# ---------------------------------------------------------------------------
# enumeration


def _edge_order(g: MultiGraph) -> tuple[int, list[int]]:
    start = min(g.vertices)
    reached = {start}
    order: list[int] = []
    remaining = set(g.edges)
    while remaining:
        best = None
        for e in sorted(remaining):
            a, b = g.edges[e]
            if a in reached or b in reached:
                best = e
                break
        if best is None:
            raise DisconnectedPrimal("embedding enumeration requires a connected graph")
        remaining.discard(best)
        order.append(best)
        reached |= set(g.edges[best])
    return start, order


def _face_labels(rot: dict[int, list[int]]) -> dict[int, int]:
    succ = {}
    for ds in rot.values():
        k = len(ds)
        for i, x in enumerate(ds):
            succ[x] = ds[(i + 1) % k]
    lab: dict[int, int] = {}
    n = 0
    for d in succ:
        if d in lab:
            continue
        x = d
        while x not in lab:
            lab[x] = n
            x = succ[x ^ 1]
        n += 1
    return lab


def enumerate_spherical_embeddings(g: MultiGraph) -> Iterator[Embedding]:
    """Every spherical rotation system of a connected graph, each exactly once.

    Edges are inserted in an order that keeps the partial graph connected; an
    edge between two present vertices must close a face (both chosen corners
    on one face), a pendant edge may go in any corner. Every partial rotation
    is therefore spherical and no branch is wasted.
    """
    if g.n_vertices == 0:
        return
    start, order = _edge_order(g)
    rot: dict[int, list[int]] = {start: []}

    def corners(v):
        ds = rot[v]
        return range(len(ds)) if ds else [None]

    def insert_after(v, i, dart):
        if i is None:
            rot[v].append(dart)
            return len(rot[v]) - 1
        rot[v].insert(i + 1, dart)
        return i + 1

    def rec(k):
        if k == len(order):
            yield Embedding(g, {v: tuple(ds) for v, ds in rot.items()}, check=False, require_spherical=False)
            return
        e = order[k]
        a, b = g.edges[e]
        da, db = 2 * e, 2 * e + 1
        if a == b:
            u = a
            lab = _face_labels(rot) if rot[u] else None
            n = len(rot[u])
            if n == 0:
                rot[u][:] = [da, db]
                yield from rec(k + 1)
                rot[u][:] = []
                return
            base = list(rot[u])
            for i in range(n):
                fi = lab[base[(i + 1) % n]]
                for j in range(n):
                    if lab[base[(j + 1) % n]] != fi:
                        continue
                    if i == j:
                        for first, second in ((da, db), (db, da)):
                            rot[u][:] = base[: i + 1] + [first, second] + base[i + 1 :]
                            yield from rec(k + 1)
                    else:
                        new = []
                        for p, x in enumerate(base):
                            new.append(x)
                            if p == i:
                                new.append(da)
                            if p == j:
                                new.append(db)
                        rot[u][:] = new
                        yield from rec(k + 1)
            rot[u][:] = base
            return
        if a in rot and b in rot:
            lab = _face_labels(rot)
            ra, rb = list(rot[a]), list(rot[b])
            na, nb = len(ra), len(rb)
            for i in range(na):
                fi = lab[ra[(i + 1) % na]]
                for j in range(nb):
                    if lab[rb[(j + 1) % nb]] != fi:
                        continue
                    rot[a][:] = ra[: i + 1] + [da] + ra[i + 1 :]
                    rot[b][:] = rb[: j + 1] + [db] + rb[j + 1 :]
                    yield from rec(k + 1)
            rot[a][:] = ra
            rot[b][:] = rb
            return
        old, new, dold, dnew = (a, b, da, db) if a in rot else (b, a, db, da)
        rot[new] = [dnew]
        base = list(rot[old])
        for i in corners(old):
            rot[old][:] = base
            insert_after(old, i, dold)
            yield from rec(k + 1)
        rot[old][:] = base
        del rot[new]

    yield from rec(0)


def find_dual_embedding(h: MultiGraph, f: EdgeBijection, target: MultiGraph) -> Embedding | None:
    """An embedding of ``h`` whose dual is ``target`` with ``f`` as duality map.

    Exhaustive over :func:`enumerate_spherical_embeddings`; ``None`` if no
    embedding works.
    """
    if set(f.mapping) != set(h.edges) or set(f.mapping.values()) != set(target.edges):
        return None
    if len(components(h)) != 1 or len(components(target)) != 1:
        return None
    # Euler: F = 2 - V + E must equal |V(target)|
    if 2 - h.n_vertices + h.n_edges != target.n_vertices:
        return None
    want_len = sorted(target.degree(v) for v in target.vertices)
    for emb in enumerate_spherical_embeddings(h):
        faces = emb.faces()
        if sorted(len(fc.boundary) for fc in faces) != want_len:
            continue
        dual = geometric_dual(emb)
        if induced_vertex_map(dual.graph, target, f.mapping) is not None:
            return emb
    return None
