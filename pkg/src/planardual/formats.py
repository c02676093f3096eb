"""JSON and PD-text serialisation.

Every reader raises :class:`FormatError` whose message starts with the
path of the offending field, e.g. ``edges[2].b: expected an integer``.
Writers emit keys in a fixed order so identical inputs give identical bytes.
"""

from __future__ import annotations

import json
from typing import Any

from .bijection import EdgeBijection
from .chains import DualityChain, DualityStep
from .embed import Embedding
from .errors import FormatError, PlanarDualError
from .graphcore import MultiGraph
from .knot import Crossing, LinkDiagram

__all__ = [
    "dumps",
    "graph_from_json",
    "graph_to_json",
    "graph_to_dot",
    "embedding_from_json",
    "embedding_to_json",
    "bijection_from_json",
    "bijection_to_json",
    "chain_from_json",
    "chain_to_json",
    "pd_from_text",
    "pd_to_text",
    "pd_from_json",
    "pd_to_json",
    "load_json",
]


def dumps(obj: Any) -> str:
    return json.dumps(obj, separators=(",", ":")) + "\n"


def load_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc


def _int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise FormatError(f"{where}: expected an integer, got {x!r}")
    return x


def _obj(x, where: str) -> dict:
    if not isinstance(x, dict):
        raise FormatError(f"{where}: expected an object")
    return x


def _list(x, where: str) -> list:
    if not isinstance(x, list):
        raise FormatError(f"{where}: expected a list")
    return x


def _key(d: dict, k: str, where: str):
    if k not in d:
        raise FormatError(f"{where}.{k}: missing" if where else f"{k}: missing")
    return d[k]


def _wrap(where: str, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except FormatError:
        raise
    except PlanarDualError as exc:
        raise FormatError(f"{where}: {exc}") from exc
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{where}: {exc}") from exc


# ---------------------------------------------------------------------------
# graphs


def graph_to_json(g: MultiGraph) -> dict:
    edges = []
    for e, (a, b) in g.edges.items():
        edges.append({"id": e, "a": a, "b": b, "sign": None if g.signs is None else g.signs[e]})
    return {"vertices": list(g.vertices), "edges": edges}


def graph_from_json(data, where: str = "") -> MultiGraph:
    p = f"{where}." if where else ""
    data = _obj(data, where or "graph")
    vs = [_int(v, f"{p}vertices[{i}]") for i, v in enumerate(_list(_key(data, "vertices", where), f"{p}vertices"))]
    edges = {}
    signs = {}
    for i, e in enumerate(_list(_key(data, "edges", where), f"{p}edges")):
        w = f"{p}edges[{i}]"
        e = _obj(e, w)
        eid = _int(_key(e, "id", w), f"{w}.id")
        if eid in edges:
            raise FormatError(f"{w}.id: duplicate edge id {eid}")
        a = _int(_key(e, "a", w), f"{w}.a")
        b = _int(_key(e, "b", w), f"{w}.b")
        if a not in vs:
            raise FormatError(f"{w}.a: vertex {a} is not listed")
        if b not in vs:
            raise FormatError(f"{w}.b: vertex {b} is not listed")
        edges[eid] = (a, b)
        s = e.get("sign")
        if s is not None:
            if _int(s, f"{w}.sign") not in (1, -1):
                raise FormatError(f"{w}.sign: must be 1, -1 or null")
            signs[eid] = s
    if signs and len(signs) != len(edges):
        raise FormatError(f"{p}edges: signs must be given for every edge or none")
    return _wrap(where or "graph", MultiGraph, vs, edges, signs or None)


def graph_to_dot(g: MultiGraph, name: str = "G") -> str:
    """Graphviz text; edges are labelled ``id`` or ``id:sign``."""
    lines = [f"graph {name} {{"]
    lines += [f"  {v};" for v in g.vertices]
    for e, (a, b) in g.edges.items():
        lab = str(e) if g.signs is None else f"{e}:{g.signs[e]:+d}"
        lines.append(f'  {a} -- {b} [label="{lab}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# embeddings


def _dart_to_json(d: int) -> list:
    return [["edge", d >> 1], ["end", "AB"[d & 1]]]


def _dart_from_json(x, where: str) -> int:
    # accepted: [["edge", e], ["end", "A"]], {"edge": e, "end": "A"}, [e, "A"]
    if isinstance(x, list) and len(x) == 2 and all(isinstance(p, list) and len(p) == 2 for p in x):
        x = dict(x)
    if isinstance(x, dict):
        e = _int(_key(x, "edge", where), f"{where}.edge")
        end = _key(x, "end", where)
    elif isinstance(x, list) and len(x) == 2:
        e, end = _int(x[0], f"{where}[0]"), x[1]
    else:
        raise FormatError(f"{where}: expected a dart")
    if end not in ("A", "B"):
        raise FormatError(f"{where}.end: must be 'A' or 'B'")
    return 2 * e + (end == "B")


def rotation_to_json(emb: Embedding) -> dict:
    return {str(v): [_dart_to_json(d) for d in ds] for v, ds in emb.rotation.items()}


def rotation_from_json(data, where: str) -> dict[int, list[int]]:
    data = _obj(data, where)
    rot = {}
    for v, ds in data.items():
        try:
            vv = int(v)
        except ValueError:
            raise FormatError(f"{where}.{v}: vertex keys must be integers") from None
        rot[vv] = [_dart_from_json(x, f"{where}.{v}[{i}]") for i, x in enumerate(_list(ds, f"{where}.{v}"))]
    return rot


def embedding_to_json(emb: Embedding) -> dict:
    return {"graph": graph_to_json(emb.graph), "rotation": rotation_to_json(emb)}


def embedding_from_json(data, where: str = "") -> Embedding:
    p = f"{where}." if where else ""
    data = _obj(data, where or "embedding")
    g = graph_from_json(_key(data, "graph", where), f"{p}graph")
    rot = rotation_from_json(_key(data, "rotation", where), f"{p}rotation")
    return _wrap(f"{p}rotation", Embedding, g, rot)


# ---------------------------------------------------------------------------
# bijections


def bijection_to_json(f: EdgeBijection) -> dict:
    return {"map": {str(k): v for k, v in f.mapping.items()}}


def bijection_from_json(data, source: MultiGraph, target: MultiGraph, where: str = "") -> EdgeBijection:
    p = f"{where}." if where else ""
    data = _obj(data, where or "bijection")
    raw = _obj(_key(data, "map", where), f"{p}map")
    m = {}
    for k, v in raw.items():
        try:
            kk = int(k)
        except ValueError:
            raise FormatError(f"{p}map.{k}: edge keys must be integers") from None
        m[kk] = _int(v, f"{p}map.{k}")
    return _wrap(f"{p}map", EdgeBijection, source, target, m)


# ---------------------------------------------------------------------------
# chains


def chain_to_json(chain: DualityChain, expected: EdgeBijection | None = None, kind: str | None = None) -> dict:
    out: dict[str, Any] = {}
    if kind is not None:
        out["kind"] = kind
    out["graphs"] = [graph_to_json(g) for g in chain.graphs]
    out["maps"] = [bijection_to_json(m) for m in chain.maps]
    out["steps"] = [
        {"forward": s.forward, "rotation": rotation_to_json(s.embedding)} for s in chain.steps
    ]
    if expected is not None:
        out["expected"] = bijection_to_json(expected)
    return out


def chain_from_json(data) -> tuple[DualityChain, EdgeBijection | None, str | None]:
    data = _obj(data, "chain")
    graphs = [graph_from_json(g, f"graphs[{i}]") for i, g in enumerate(_list(_key(data, "graphs", ""), "graphs"))]
    if not graphs:
        raise FormatError("graphs: a chain needs at least one graph")
    raw_maps = _list(_key(data, "maps", ""), "maps")
    raw_steps = _list(_key(data, "steps", ""), "steps")
    if len(raw_maps) != len(graphs) - 1:
        raise FormatError("maps: need one map between consecutive graphs")
    if len(raw_steps) != len(raw_maps):
        raise FormatError("steps: need one step per map")
    maps = [
        bijection_from_json(m, graphs[i], graphs[i + 1], f"maps[{i}]") for i, m in enumerate(raw_maps)
    ]
    steps = []
    for i, s in enumerate(raw_steps):
        w = f"steps[{i}]"
        s = _obj(s, w)
        fwd = _key(s, "forward", w)
        if not isinstance(fwd, bool):
            raise FormatError(f"{w}.forward: expected true or false")
        own = graphs[i] if fwd else graphs[i + 1]
        rot = rotation_from_json(_key(s, "rotation", w), f"{w}.rotation")
        # sphericity is left to verification, which must be able to say "false"
        emb = _wrap(f"{w}.rotation", Embedding, own, rot, check=True, require_spherical=False)
        steps.append(DualityStep(emb, fwd))
    chain = DualityChain(tuple(graphs), tuple(maps), tuple(steps))
    expected = None
    if "expected" in data:
        expected = bijection_from_json(data["expected"], graphs[0], graphs[-1], "expected")
    kind = data.get("kind")
    if kind is not None and kind not in ("two_iso", "abstract_dual"):
        raise FormatError("kind: must be 'two_iso' or 'abstract_dual'")
    return chain, expected, kind


# ---------------------------------------------------------------------------
# PD codes


def pd_to_text(d: LinkDiagram) -> str:
    lines = []
    for x in d.crossings:
        a, b, c, e = x.arcs
        lines.append(f"X {a} {b} {c} {e} {'+1' if x.sign == 1 else '-1'}")
    return "\n".join(lines) + ("\n" if lines else "")


def pd_from_text(text: str) -> LinkDiagram:
    xs = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "X":
            raise FormatError(f"line {n}: expected 'X a b c d s'")
        if len(parts) not in (5, 6):
            raise FormatError(f"line {n}: expected four arcs and an optional sign")
        try:
            nums = [int(p) for p in parts[1:]]
        except ValueError:
            raise FormatError(f"line {n}: arcs and sign must be integers") from None
        sign = nums[4] if len(nums) == 5 else 1
        if sign not in (1, -1):
            raise FormatError(f"line {n}: sign must be +1 or -1")
        xs.append(Crossing(tuple(nums[:4]), sign))
    return _wrap("crossings", LinkDiagram, tuple(xs))


def pd_to_json(d: LinkDiagram) -> dict:
    out: dict[str, Any] = {"crossings": [{"arcs": list(x.arcs), "sign": x.sign} for x in d.crossings]}
    if d.edge_labels is not None:
        out["edge_labels"] = list(d.edge_labels)
    return out


def pd_from_json(data) -> LinkDiagram:
    data = _obj(data, "diagram")
    xs = []
    for i, x in enumerate(_list(_key(data, "crossings", ""), "crossings")):
        w = f"crossings[{i}]"
        x = _obj(x, w)
        arcs = _list(_key(x, "arcs", w), f"{w}.arcs")
        if len(arcs) != 4:
            raise FormatError(f"{w}.arcs: need exactly four arcs")
        arcs = tuple(_int(a, f"{w}.arcs[{j}]") for j, a in enumerate(arcs))
        s = _int(x.get("sign", 1), f"{w}.sign")
        if s not in (1, -1):
            raise FormatError(f"{w}.sign: must be 1 or -1")
        xs.append(Crossing(arcs, s))
    labels = data.get("edge_labels")
    if labels is not None:
        labels = tuple(_int(v, f"edge_labels[{i}]") for i, v in enumerate(_list(labels, "edge_labels")))
    return _wrap("crossings", LinkDiagram, tuple(xs), labels)


def load_diagram(path: str) -> LinkDiagram:
    """PD file: JSON if it parses as an object, otherwise the text format."""
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON ({exc.msg})") from exc
        return pd_from_json(data)
    return pd_from_text(text)
