"""Edge bijections between two multigraphs."""

from __future__ import annotations

from typing import Mapping

from .errors import BadBijection
from .graphcore import MultiGraph


class EdgeBijection:
    """A bijection ``E(source) -> E(target)`` on edge ids.

    Geometric duality maps, abstract duality maps, 2-isomorphisms and
    isomorphism witnesses are all values of this type; which one a given
    value is depends only on the graphs, and is decided by the checks in
    :mod:`planardual.matroid`.
    """

    __slots__ = ("source", "target", "mapping")

    def __init__(self, source: MultiGraph, target: MultiGraph, mapping: Mapping[int, int]):
        m = {int(k): int(v) for k, v in mapping.items()}
        if set(m) != set(source.edges):
            raise BadBijection("domain differs from the source edge set")
        if set(m.values()) != set(target.edges) or len(set(m.values())) != len(m):
            raise BadBijection("map is not onto the target edge set")
        self.source = source
        self.target = target
        self.mapping = dict(sorted(m.items()))

    @classmethod
    def identity(cls, g: MultiGraph, h: MultiGraph | None = None) -> "EdgeBijection":
        return cls(g, g if h is None else h, {e: e for e in g.edges})

    def __call__(self, e: int) -> int:
        return self.mapping[e]

    def __len__(self):
        return len(self.mapping)

    def inverse(self) -> "EdgeBijection":
        return EdgeBijection(self.target, self.source, {v: k for k, v in self.mapping.items()})

    def then(self, other: "EdgeBijection") -> "EdgeBijection":
        """``other`` after ``self`` (edge-id composition; graphs are not compared)."""
        if set(other.mapping) != set(self.mapping.values()):
            raise BadBijection("maps are not composable")
        return EdgeBijection(
            self.source, other.target, {e: other.mapping[x] for e, x in self.mapping.items()}
        )

    def restrict(self, edges) -> dict[int, int]:
        return {e: self.mapping[e] for e in edges}

    def is_identity(self) -> bool:
        return all(k == v for k, v in self.mapping.items())

    def __eq__(self, other):
        if not isinstance(other, EdgeBijection):
            return NotImplemented
        return (
            self.mapping == other.mapping
            and self.source == other.source
            and self.target == other.target
        )

    def __hash__(self):
        return hash(tuple(self.mapping.items()))

    def __repr__(self):
        body = ", ".join(f"{k}->{v}" for k, v in self.mapping.items())
        return f"EdgeBijection({{{body}}})"


def compose(*maps: EdgeBijection) -> EdgeBijection:
    """Compose left to right: ``compose(f, g)`` applies ``f`` first."""
    out = maps[0]
    for m in maps[1:]:
        out = out.then(m)
    return out
