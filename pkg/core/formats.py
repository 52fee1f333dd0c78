"""
JSON codecs for graphs, matchings and witnesses.

Every encoder emits canonical ordering so that decode(encode(x)) == x and
repeated runs produce identical bytes.
"""
import json
from fractions import Fraction
from typing import Any, Dict, Mapping, Optional

from utils.helpers import format_rational, parse_rational
from .bigraph import FiniteBigraph, HallWitness, Matching, Weight
from .errors import InputError
from .groups import GroupDescriptor
from .symmetry import FactorGraph, SymGraph, SymMatching


def load_json(text: str, what: str = "input") -> Any:
    """json.loads with InputError carrying line and column."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"Malformed JSON in {what} at line {e.lineno}, column {e.colno}: {e.msg}")


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _require(data: Mapping, key: str, kind, what: str):
    if not isinstance(data, dict) or key not in data:
        raise InputError(f"{what} is missing '{key}'")
    value = data[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise InputError(f"{what}: '{key}' must be an integer, got {value!r}")
    if kind is list and not isinstance(value, list):
        raise InputError(f"{what}: '{key}' must be a list")
    return value


def encode_weight(w: Weight):
    if isinstance(w, float):
        return w
    w = Fraction(w)
    return w.numerator if w.denominator == 1 else format_rational(w)


def decode_weight(raw) -> Weight:
    if isinstance(raw, float):
        return raw
    return parse_rational(raw)


# =============================================================================
# FINITE BIGRAPH
# =============================================================================

def bigraph_to_json(g: FiniteBigraph) -> Dict:
    if g.weights is None:
        edges = [[i, j] for i, j in g.edges]
    else:
        edges = [[i, j, encode_weight(w)] for (i, j), w in zip(g.edges, g.weights)]
    return {"left": g.left_count, "right": g.right_count, "edges": edges}


def bigraph_from_json(data: Any) -> FiniteBigraph:
    left = _require(data, "left", int, "Graph")
    right = _require(data, "right", int, "Graph")
    raw_edges = _require(data, "edges", list, "Graph")
    edges, weights = [], []
    for k, item in enumerate(raw_edges):
        if not isinstance(item, list) or len(item) not in (2, 3):
            raise InputError(f"Edge #{k} must be [i, j] or [i, j, w], got {item!r}")
        i, j = item[0], item[1]
        if any(isinstance(v, bool) or not isinstance(v, int) for v in (i, j)):
            raise InputError(f"Edge #{k} endpoints must be integers, got {item!r}")
        edges.append((i, j))
        if len(item) == 3:
            weights.append(decode_weight(item[2]))
    if weights and len(weights) != len(edges):
        raise InputError("Either every edge carries a weight or none does")
    return FiniteBigraph.build(left, right, edges, weights or None)


def parse_bigraph(text: str) -> FiniteBigraph:
    return bigraph_from_json(load_json(text, "graph file"))


# =============================================================================
# SYMMETRIC GRAPHS
# =============================================================================

def symgraph_to_json(sg: SymGraph, weights: Optional[Mapping] = None) -> Dict:
    data = {
        "group": sg.group.to_json(),
        "a_orbits": sg.a_orbits,
        "b_orbits": sg.b_orbits,
        "triples": [[i, g.serialize(), j] for i, g, j in sg.triples],
    }
    if weights is not None:
        data["weights"] = [encode_weight(weights[t]) for t in sg.triples]
    return data


def symgraph_from_json(data: Any) -> SymGraph:
    group = GroupDescriptor.from_json(_require(data, "group", dict, "SymGraph"))
    a_orbits = _require(data, "a_orbits", int, "SymGraph")
    b_orbits = _require(data, "b_orbits", int, "SymGraph")
    raw = _require(data, "triples", list, "SymGraph")
    triples = []
    for k, item in enumerate(raw):
        if not isinstance(item, list) or len(item) != 3:
            raise InputError(f"Triple #{k} must be [i, g, j], got {item!r}")
        i, g, j = item
        if any(isinstance(v, bool) or not isinstance(v, int) for v in (i, j)):
            raise InputError(f"Triple #{k} orbit indices must be integers, got {item!r}")
        triples.append((i, group.parse(g), j))
    return SymGraph(group, a_orbits, b_orbits, tuple(triples))


def parse_symgraph(text: str) -> SymGraph:
    return symgraph_from_json(load_json(text, "SymGraph file"))


def factor_to_json(fg: FactorGraph) -> Dict:
    return {
        "a_orbits": fg.underlying.left_count,
        "b_orbits": fg.underlying.right_count,
        "edges": [[i, j, [g.serialize() for g in gs]] for (i, j), gs in fg.multiplicity.items()],
    }



# =============================================================================
# MATCHINGS AND WITNESSES
# =============================================================================

def matching_to_json(m: Matching) -> list:
    return [[i, j] for i, j in m.pairs]


def symmatching_to_json(sm: SymMatching) -> list:
    return [[i, g.serialize(), j] for (i, j), g in sm.chosen]


def witness_to_json(w: Optional[HallWitness]) -> Optional[Dict]:
    if w is None:
        return None
    return {"side": w.side.value, "subset": list(w.subset),
            "neighborhood_size": w.neighborhood_size, "deficiency": w.deficiency}
