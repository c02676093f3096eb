"""Command-line front end.

Exit status: 0 on success or a true answer, 1 on a false answer or when a
search finds nothing, 2 on any error (bad input, violated precondition).
Results are JSON on stdout unless ``--output`` is given.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import formats
from .bijection import EdgeBijection
from .chains import duality_chain_2iso, duality_chain_adual, verify_chain
from .corpus import connected_multigraphs, planar_maps
from .embed import geometric_dual
from .errors import FormatError, PlanarDualError
from .graphcore import blocks
from .knot import checkerboard, diagram_chain, diagram_from_signed_gdp, goeritz
from .matroid import (
    CHECK_LIMIT,
    find_2_isomorphism,
    find_abstract_duality,
    is_2_isomorphism,
    is_abstract_duality,
    is_graph_isomorphism,
)

OK, NO, ERROR = 0, 1, 2


class _Failure(Exception):
    """A false answer or an empty search: exit 1 after writing the result."""


def _emit(args, payload) -> None:
    text = payload if isinstance(payload, str) else formats.dumps(payload)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _graph(path):
    return formats.graph_from_json(formats.load_json(path))


def _map(path, g, h):
    return formats.bijection_from_json(formats.load_json(path), g, h)


def _signs_agree(f: EdgeBijection, factor: int) -> bool:
    g, h = f.source, f.target
    if g.signs is None or h.signs is None:
        raise FormatError("--signed needs a sign on every edge of both graphs")
    return all(h.signs[f.mapping[e]] == factor * g.signs[e] for e in g.edges)


# ---------------------------------------------------------------------------
# subcommands


def cmd_dual(args):
    emb = formats.embedding_from_json(formats.load_json(args.embedding))
    gd = geometric_dual(emb, allow_disconnected=args.allow_disconnected)
    if args.dot:
        _emit(args, formats.graph_to_dot(gd.graph, "dual"))
        return
    _emit(
        args,
        {
            "graph": formats.graph_to_json(gd.graph),
            "map": formats.bijection_to_json(gd.duality_map)["map"],
            "embedding": formats.embedding_to_json(gd.embedding),
        },
    )


def cmd_blocks(args):
    g = _graph(args.graph)
    bd = blocks(g)
    tree = sorted(
        [list(a), list(b)] for a, nbrs in bd.block_cut_tree.items() for b in nbrs if a[0] == "B"
    )
    _emit(
        args,
        {
            "blocks": [
                {"id": b.index, "edges": sorted(b.edges), "vertices": sorted(b.vertices)} for b in bd.blocks
            ],
            "cut_vertices": sorted(bd.cut_vertices),
            "block_cut_tree": tree,
        },
    )


def _check(args, test, factor):
    g, h = _graph(args.g), _graph(args.h)
    f = _map(args.map, g, h)
    unsigned = EdgeBijection(g.unsigned(), h.unsigned(), f.mapping)
    ok = test(unsigned, limit=max(CHECK_LIMIT, args.max_edges))
    if ok and args.signed:
        ok = _signs_agree(f, factor)
    _emit(args, {"result": bool(ok)})
    if not ok:
        raise _Failure


def cmd_check_2iso(args):
    _check(args, is_2_isomorphism, 1)


def cmd_check_adual(args):
    _check(args, is_abstract_duality, -1)


def cmd_find_map(args):
    g, h = _graph(args.g), _graph(args.h)
    if args.mode == "2iso":
        f = find_2_isomorphism(g, h, args.signed, args.max_edges, args.jobs)
    elif args.mode == "adual":
        f = find_abstract_duality(g, h, args.signed, args.max_edges, args.jobs)
    else:
        r = is_graph_isomorphism(g, h, args.signed, limit=max(args.max_edges, 64))
        f = r.witness
    if f is None:
        _emit(args, {"map": None})
        raise _Failure
    _emit(args, formats.bijection_to_json(f))


def cmd_chain(args):
    g, h = _graph(args.g), _graph(args.h)
    if args.map:
        f = _map(args.map, g, h)
    else:
        finder = find_2_isomorphism if args.mode == "2iso" else find_abstract_duality
        f = finder(g.unsigned(), h.unsigned(), False, args.max_edges, args.jobs)
        if f is None:
            _emit(args, {"chain": None})
            raise _Failure
        f = EdgeBijection(g, h, f.mapping)
    uf = EdgeBijection(g.unsigned(), h.unsigned(), f.mapping)
    if args.mode == "2iso":
        chain, kind = duality_chain_2iso(uf), "two_iso"
    else:
        chain, kind = duality_chain_adual(uf), "abstract_dual"
    _emit(args, formats.chain_to_json(chain, uf, kind))


def cmd_verify(args):
    chain, expected, kind = formats.chain_from_json(formats.load_json(args.chain))
    kind = args.kind or kind
    if kind is None:
        raise FormatError("kind: missing (pass --kind)")
    if args.map:
        expected = _map(args.map, chain.graphs[0], chain.graphs[-1])
    if expected is None:
        raise FormatError("expected: missing (pass a map file)")
    ok = verify_chain(chain, expected, kind)
    _emit(args, {"result": ok})
    if not ok:
        raise _Failure


def cmd_checkerboard(args):
    d = formats.load_diagram(args.diagram)
    p = checkerboard(d, swap=args.swap)
    if args.dot:
        _emit(args, formats.graph_to_dot(p.shaded, "shaded") + formats.graph_to_dot(p.unshaded, "unshaded"))
        return
    _emit(args, {"shaded": formats.graph_to_json(p.shaded), "unshaded": formats.graph_to_json(p.unshaded)})


def cmd_medial(args):
    emb = formats.embedding_from_json(formats.load_json(args.embedding))
    if emb.graph.signs is None:
        raise FormatError("graph.edges: medial needs a sign on every edge")
    d = diagram_from_signed_gdp(emb)
    _emit(args, formats.pd_to_text(d) if args.text else formats.pd_to_json(d))


def cmd_goeritz(args):
    g = _graph(args.graph)
    drop = args.drop if args.drop is not None else g.vertices[0]
    m = goeritz(g, drop)
    _emit(
        args,
        {
            "vertices": list(m.vertices),
            "dropped": m.dropped,
            "unreduced": m.unreduced.tolist(),
            "reduced": m.reduced.tolist(),
            "determinant": m.determinant,
        },
    )


def cmd_diagram_chain(args):
    d1 = formats.load_diagram(args.d)
    d2 = formats.load_diagram(args.d_prime)
    p1, p2 = checkerboard(d1), checkerboard(d2)
    g = p1.shaded if args.source == "shaded" else p1.unshaded
    h = p2.shaded if args.target == "shaded" else p2.unshaded
    f = _map(args.map, g, h)
    out = diagram_chain(d1, d2, f)
    _emit(args, {"diagrams": [formats.pd_to_json(x) for x in out]})


def cmd_gen_corpus(args):
    if args.maps:
        items = [formats.embedding_to_json(e) for e in planar_maps(args.max_edges)]
    else:
        items = [formats.graph_to_json(g) for g in connected_multigraphs(args.max_edges)]
    _emit(args, items)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="planardual", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--output", "-o", help="write the result here instead of stdout")
        return sp

    def search_flags(sp, signed=True):
        if signed:
            sp.add_argument("--signed", action="store_true", help="respect edge signs")
        sp.add_argument("--max-edges", type=int, default=12, help="search budget in edges (default 12)")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes for searches")

    sp = add("dual", cmd_dual, "geometric dual of an embedding")
    sp.add_argument("--embedding", required=True)
    sp.add_argument("--allow-disconnected", action="store_true")
    sp.add_argument("--dot", action="store_true", help="write the dual as Graphviz text")

    sp = add("blocks", cmd_blocks, "block decomposition and cut-vertices")
    sp.add_argument("graph")

    for name, fn in (("check-2iso", cmd_check_2iso), ("check-adual", cmd_check_adual)):
        sp = add(name, fn, "check an edge bijection")
        sp.add_argument("g")
        sp.add_argument("h")
        sp.add_argument("map")
        search_flags(sp)

    sp = add("find-map", cmd_find_map, "search for a 2-isomorphism, abstract duality or isomorphism")
    sp.add_argument("g")
    sp.add_argument("h")
    sp.add_argument("--mode", choices=("2iso", "adual", "iso"), default="2iso")
    search_flags(sp)

    sp = add("chain", cmd_chain, "chain of geometric duality maps realising a map")
    sp.add_argument("g")
    sp.add_argument("h")
    sp.add_argument("map", nargs="?", help="map file (searched for when omitted)")
    sp.add_argument("--mode", choices=("2iso", "adual"), required=True)
    search_flags(sp)

    sp = add("verify", cmd_verify, "re-derive and check a chain file")
    sp.add_argument("chain")
    sp.add_argument("map", nargs="?", help="expected composition (defaults to the one in the file)")
    sp.add_argument("--kind", choices=("two_iso", "abstract_dual"))

    sp = add("checkerboard", cmd_checkerboard, "signed checkerboard graphs of a PD code")
    sp.add_argument("diagram")
    sp.add_argument("--swap", action="store_true", help="use the other 2-colouring")
    sp.add_argument("--dot", action="store_true", help="write both graphs as Graphviz text")

    sp = add("medial", cmd_medial, "link diagram from an embedded signed graph")
    sp.add_argument("--embedding", required=True)
    sp.add_argument("--text", action="store_true", help="write PD text instead of JSON")

    sp = add("goeritz", cmd_goeritz, "Goeritz matrix of a signed graph")
    sp.add_argument("graph")
    sp.add_argument("--drop", type=int, help="vertex to delete (default: least)")

    sp = add("diagram-chain", cmd_diagram_chain, "diagrams linking two diagrams via shared checkerboard graphs")
    sp.add_argument("d")
    sp.add_argument("d_prime")
    sp.add_argument("map", help="signed 2-isomorphism between the chosen checkerboard graphs")
    sp.add_argument("--source", choices=("shaded", "unshaded"), default="unshaded")
    sp.add_argument("--target", choices=("shaded", "unshaded"), default="unshaded")

    sp = add("gen-corpus", cmd_gen_corpus, "all connected multigraphs (or planar maps) up to a size")
    sp.add_argument("--max-edges", type=int, default=5)
    sp.add_argument("--maps", action="store_true", help="emit one embedding per planar map instead")
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERROR if exc.code else OK
    try:
        args.func(args)
    except _Failure:
        return NO
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    except (PlanarDualError, OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return ERROR
    except Exception as exc:  # never let a traceback stand in for exit 2
        print(f"error: internal: {type(exc).__name__}: {exc}", file=sys.stderr)
        return ERROR
    return OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
