"""Helpers for building and padding similarity chains in tests."""

from __future__ import annotations

import random

from planardual.bijection import EdgeBijection
from planardual.chains import DUAL, PRIMAL, GeometricDualPair, Link, SimilarityChain
from planardual.embed import Embedding, enumerate_spherical_embeddings, transport
from planardual.graphcore import induced_vertex_map


def relabelled_copy(pair: GeometricDualPair, shift: int) -> GeometricDualPair:
    g = pair.primal
    vmap = {v: v + shift for v in g.vertices}
    h = g.relabel(vertex_map=vmap)
    emb = transport(pair.embedding, h, {e: e for e in g.edges}, {v + shift: v for v in g.vertices})
    return GeometricDualPair.from_embedding(Embedding(h, emb.rotation))


def pad_chain(chain: SimilarityChain, rnd: random.Random, extra: int) -> SimilarityChain:
    """Insert ``extra`` redundant pairs; every inserted link is a genuine isomorphism."""
    pairs = list(chain.pairs)
    links = list(chain.links)
    for _ in range(extra):
        i = rnd.randrange(len(pairs))
        p = pairs[i]
        kind = rnd.choice(("same", "reembed", "relabel"))
        if kind == "same":
            new, side = p, rnd.choice((PRIMAL, DUAL))
        elif kind == "reembed":
            embs = list(enumerate_spherical_embeddings(p.primal))
            new, side = GeometricDualPair.from_embedding(rnd.choice(embs)), PRIMAL
        else:
            new, side = relabelled_copy(p, rnd.choice((10, 20, 30))), PRIMAL
        ident = {e: e for e in p.side(side).edges}
        # insert ``new`` right after pair i; it inherits pair i's outgoing link
        link_in = Link(side, EdgeBijection(p.side(side), new.side(side), ident))
        if i < len(links):
            old = links[i]
            w = old.witness
            # the outgoing link now starts at ``new``: re-express its source side
            src = new.side(old.side)
            if induced_vertex_map(src, w.target, w.mapping) is None:
                continue
            links[i] = Link(old.side, EdgeBijection(src, w.target, w.mapping))
        pairs.insert(i + 1, new)
        links.insert(i, link_in)
    return SimilarityChain(tuple(pairs), tuple(links))
