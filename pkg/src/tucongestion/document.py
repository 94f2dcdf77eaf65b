"""JSON instance and state documents.

Instance::

    {"players": N, "resources": n, "delays": [[d_1(1), ..., d_1(L)], ...],
     "strategy": <descriptor> | [<descriptor>, ...]}

A descriptor is ``{"kind": "tu", "matrix", "row_lo", "row_hi"}`` (``null``
bounds are infinite), ``{"kind": "polymatroid", "table", "base"}`` with the
rank table indexed by subset bitmask, or a graph descriptor
``{"kind": "matching" | ..., "nodes", "edges", "directed", "players"}``.
Graph descriptors are compiled on load and rendered back as TU systems.
"""

from __future__ import annotations

import json
from typing import Any

from tucongestion.errors import PreconditionError
from tucongestion.frontends import GRAPH_KINDS, GraphSpec, Subgraph, graph_game
from tucongestion.model import DelayTable, GameInstance, GameState, PolymatroidStrategy, TUSystem
from tucongestion.polymatroid import PolymatroidOracle


def _need(obj: dict, key: str) -> Any:
    if key not in obj:
        raise PreconditionError(f"instance document is missing {key!r}")
    return obj[key]


def _ints(value, what: str) -> list:
    if not isinstance(value, list):
        raise PreconditionError(f"{what} must be a list")
    for v in value:
        if v is not None and (isinstance(v, bool) or not isinstance(v, int)):
            raise PreconditionError(f"{what} must hold integers, got {v!r}")
    return value


def _descriptor(desc: dict, n: int):
    kind = _need(desc, "kind")
    if kind == "tu":
        matrix = _need(desc, "matrix")
        rows = [_ints(r, "matrix row") for r in matrix]
        lo = _ints(desc.get("row_lo", [None] * len(rows)), "row_lo")
        hi = _ints(desc.get("row_hi", [None] * len(rows)), "row_hi")
        return TUSystem.build(rows, lo, hi, n)
    if kind == "polymatroid":
        table = _ints(_need(desc, "table"), "table")
        if len(table) != 1 << n:
            raise PreconditionError(f"polymatroid table needs 2^{n} entries, got {len(table)}")
        return PolymatroidStrategy(PolymatroidOracle(n, table), bool(desc.get("base", False)))
    raise PreconditionError(f"unknown strategy kind {kind!r}")


def _graph_players(desc: dict) -> list:
    players = _need(desc, "players")
    if desc["kind"] == "network":
        return [(_need(p, "source"), _need(p, "sink")) for p in players]
    out = []
    for p in players:
        nodes = p.get("subgraph_nodes")
        edges = p.get("subgraph_edges")
        out.append(Subgraph(None if nodes is None else tuple(nodes),
                            None if edges is None else tuple(edges)))
    return out


def instance_from_dict(doc: dict) -> GameInstance:
    if not isinstance(doc, dict):
        raise PreconditionError("instance document must be an object")
    n = _need(doc, "resources")
    delays = DelayTable.build([_ints(r, "delay row") for r in _need(doc, "delays")])
    if delays.num_resources != n:
        raise PreconditionError(f"'delays' has {delays.num_resources} rows for {n} resources")
    strategy = _need(doc, "strategy")
    players = doc.get("players")
    if isinstance(strategy, dict) and strategy.get("kind") in GRAPH_KINDS:
        g = GraphSpec(tuple(_need(strategy, "nodes")), tuple(tuple(e) for e in _need(strategy, "edges")),
                      bool(strategy.get("directed", strategy["kind"] == "network")))
        inst = graph_game(strategy["kind"], g, _graph_players(strategy), delays)
    elif isinstance(strategy, list):
        inst = GameInstance(tuple(_descriptor(d, n) for d in strategy), delays)
    elif isinstance(strategy, dict):
        if players is None:
            raise PreconditionError("a shared strategy descriptor needs 'players'")
        inst = GameInstance.symmetric_game(_descriptor(strategy, n), players, delays)
    else:
        raise PreconditionError("'strategy' must be an object or a list")
    if players is not None and players != inst.num_players:
        raise PreconditionError(f"'players' is {players} but {inst.num_players} strategy sets were given")
    return inst


def _render_descriptor(desc) -> dict:
    if isinstance(desc, TUSystem):
        return {"kind": "tu", "matrix": [list(r) for r in desc.matrix],
                "row_lo": list(desc.row_lower), "row_hi": list(desc.row_upper)}
    return {"kind": "polymatroid", "table": list(desc.oracle.table), "base": desc.base}


def instance_to_dict(inst: GameInstance) -> dict:
    if inst.num_players and inst.symmetric:
        strategy: Any = _render_descriptor(inst.strategies[0])
    else:
        strategy = [_render_descriptor(d) for d in inst.strategies]
    return {"players": inst.num_players, "resources": inst.num_resources,
            "delays": [list(r) for r in inst.delays.values], "strategy": strategy}


def state_from_dict(doc) -> GameState:
    rows = doc.get("strategies") if isinstance(doc, dict) else doc
    if not isinstance(rows, list):
        raise PreconditionError("state document must be a list of strategies or {'strategies': [...]}")
    return GameState.of([_ints(r, "strategy") for r in rows])


def state_to_dict(state: GameState) -> dict:
    return {"strategies": [list(x) for x in state.strategies], "loads": list(state.loads)}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def loads_json(text: str, what: str = "document"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise PreconditionError(f"{what} is not valid JSON: {e}") from None


def read_instance(path: str) -> GameInstance:
    with open(path) as f:
        return instance_from_dict(loads_json(f.read(), "instance"))


def read_state(path: str) -> GameState:
    with open(path) as f:
        return state_from_dict(loads_json(f.read(), "state"))


def render_instance(inst: GameInstance) -> str:
    return dumps(instance_to_dict(inst))


def parse_instance(text: str) -> GameInstance:
    return instance_from_dict(loads_json(text, "instance"))
