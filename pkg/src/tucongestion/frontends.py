"""Compile graph games into TU strategy systems.

Resources are the edges (network, matching, edge cover) or the nodes (stable
set, vertex cover) of one host graph. Each player owns a subgraph; resources
outside it are pinned to zero with a unit row, which keeps the system TU.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Hashable, Optional, Sequence

import networkx as nx

from tucongestion.errors import PreconditionError
from tucongestion.model import DelayTable, GameInstance, TUSystem, shift_delays

Label = Hashable

NODE_KINDS = ("stable_set", "vertex_cover", "perfect_vertex_cover")
EDGE_KINDS = ("matching", "edge_cover", "perfect_matching", "network")
GRAPH_KINDS = EDGE_KINDS + NODE_KINDS

# which extreme cardinality each game's cardinality variant keeps
CARDINALITY_SENSE = {"matching": "max", "stable_set": "max",
                     "edge_cover": "min", "vertex_cover": "min"}


class NegativeDelayWarning(UserWarning):
    """Network game with negative delays: {Ax = b} admits path-plus-circuit
    strategies that may beat every simple path."""


@dataclass(frozen=True)
class Subgraph:
    nodes: Optional[tuple] = None   # node labels; None means all nodes
    edges: Optional[tuple] = None   # edge indices; None means all edges among ``nodes``


@dataclass(frozen=True)
class GraphSpec:
    """A (multi)graph with labelled nodes; edges are ordered label pairs."""

    nodes: tuple
    edges: tuple
    directed: bool = False
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        index = {}
        for k, v in enumerate(self.nodes):
            if v in index:
                raise PreconditionError(f"duplicate node label {v!r}")
            index[v] = k
        for e in self.edges:
            if len(e) != 2:
                raise PreconditionError(f"edge {e!r} must have two endpoints")
            for v in e:
                if v not in index:
                    raise PreconditionError(f"edge {e!r} references unknown node {v!r}")
            if e[0] == e[1]:
                raise PreconditionError(f"self-loop at {e[0]!r} is not allowed")
        object.__setattr__(self, "_index", index)

    def node_index(self, label: Label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise PreconditionError(f"unknown node {label!r}") from None

    def is_bipartite(self) -> bool:
        g = nx.MultiGraph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.edges)
        return nx.is_bipartite(g)

    def resolve(self, sub: Optional[Subgraph]) -> tuple[set[int], list[int]]:
        """Node and edge index sets of a player's subgraph, validated."""
        sub = sub or Subgraph()
        nodes = (set(range(len(self.nodes))) if sub.nodes is None
                 else {self.node_index(v) for v in sub.nodes})
        if sub.edges is None:
            edges = [k for k, (a, b) in enumerate(self.edges)
                     if self.node_index(a) in nodes and self.node_index(b) in nodes]
        else:
            edges = sorted(set(int(k) for k in sub.edges))
            for k in edges:
                if not 0 <= k < len(self.edges):
                    raise PreconditionError(f"subgraph edge index {k} out of range")
                a, b = self.edges[k]
                if self.node_index(a) not in nodes or self.node_index(b) not in nodes:
                    raise PreconditionError(f"subgraph edge {k} leaves the subgraph's nodes")
        return nodes, edges

    def induced(self, labels) -> Subgraph:
        return Subgraph(tuple(labels), None)


def _unit_row(n: int, j: int) -> list[int]:
    row = [0] * n
    row[j] = 1
    return row


def _pin_outside(rows, lo, hi, n: int, inside) -> None:
    for j in range(n):
        if j not in inside:
            rows.append(_unit_row(n, j))
            lo.append(0)
            hi.append(0)


def _require_bipartite(g: GraphSpec) -> None:
    if g.directed:
        raise PreconditionError("matching, cover and stable set games need an undirected graph")
    if not g.is_bipartite():
        raise PreconditionError("graph is not bipartite; the strategy system would not be TU")


def _players(subgraphs) -> list:
    subs = list(subgraphs)
    if not subs:
        raise PreconditionError("at least one player is required")
    return subs


def _check_delays(delays: DelayTable, n: int, what: str) -> None:
    if delays.num_resources != n:
        raise PreconditionError(f"need one delay row per {what} ({n}), got {delays.num_resources}")


def edge_system(g: GraphSpec, sub: Optional[Subgraph], lo: Optional[int], hi: Optional[int]) -> TUSystem:
    """Node-edge incidence rows over the player's subgraph with bounds [lo, hi]."""
    nodes, edges = g.resolve(sub)
    m = len(g.edges)
    rows, row_lo, row_hi = [], [], []
    for v in sorted(nodes):
        row = [0] * m
        for k in edges:
            a, b = g.edges[k]
            if g.node_index(a) == v or g.node_index(b) == v:
                row[k] = 1
        rows.append(row)
        row_lo.append(lo)
        row_hi.append(hi)
    _pin_outside(rows, row_lo, row_hi, m, set(edges))
    return TUSystem.build(rows, row_lo, row_hi, m)


def node_system(g: GraphSpec, sub: Optional[Subgraph], lo: Optional[int], hi: Optional[int]) -> TUSystem:
    """Edge-node incidence rows over the player's subgraph with bounds [lo, hi]."""
    nodes, edges = g.resolve(sub)
    n = len(g.nodes)
    rows, row_lo, row_hi = [], [], []
    for k in edges:
        a, b = g.edges[k]
        row = [0] * n
        row[g.node_index(a)] = 1
        row[g.node_index(b)] = 1
        rows.append(row)
        row_lo.append(lo)
        row_hi.append(hi)
    _pin_outside(rows, row_lo, row_hi, n, nodes)
    return TUSystem.build(rows, row_lo, row_hi, n)


def _edge_game(g, subgraphs, delays, lo, hi) -> GameInstance:
    _require_bipartite(g)
    _check_delays(delays, len(g.edges), "edge")
    return GameInstance(tuple(edge_system(g, s, lo, hi) for s in _players(subgraphs)), delays)


def _node_game(g, subgraphs, delays, lo, hi) -> GameInstance:
    _require_bipartite(g)
    _check_delays(delays, len(g.nodes), "node")
    return GameInstance(tuple(node_system(g, s, lo, hi) for s in _players(subgraphs)), delays)


def matching_game(g: GraphSpec, subgraphs: Sequence[Optional[Subgraph]], delays: DelayTable) -> GameInstance:
    return _edge_game(g, subgraphs, delays, None, 1)


def edge_cover_game(g: GraphSpec, subgraphs: Sequence[Optional[Subgraph]], delays: DelayTable) -> GameInstance:
    return _edge_game(g, subgraphs, delays, 1, None)


def perfect_matching_game(g: GraphSpec, subgraphs: Sequence[Optional[Subgraph]],
                          delays: DelayTable) -> GameInstance:
    return _edge_game(g, subgraphs, delays, 1, 1)


def stable_set_game(g: GraphSpec, subgraphs: Sequence[Optional[Subgraph]], delays: DelayTable) -> GameInstance:
    return _node_game(g, subgraphs, delays, None, 1)


def vertex_cover_game(g: GraphSpec, subgraphs: Sequence[Optional[Subgraph]], delays: DelayTable) -> GameInstance:
    return _node_game(g, subgraphs, delays, 1, None)


def perfect_vertex_cover_game(g: GraphSpec, subgraphs: Sequence[Optional[Subgraph]],
                              delays: DelayTable) -> GameInstance:
    """Every edge of the player's subgraph has exactly one endpoint chosen."""
    return _node_game(g, subgraphs, delays, 1, 1)


def network_system(g: GraphSpec, source: Label, sink: Label) -> TUSystem:
    """Flow conservation ``Ax = b``: arcs leave with -1, enter with +1,
    ``b`` is -1 at the source and +1 at the sink."""
    r, s = g.node_index(source), g.node_index(sink)
    m = len(g.edges)
    rows, b = [], []
    for v in range(len(g.nodes)):
        row = [0] * m
        for k, (tail, head) in enumerate(g.edges):
            if g.node_index(tail) == v:
                row[k] -= 1
            if g.node_index(head) == v:
                row[k] += 1
        rows.append(row)
        b.append((-1 if v == r else 0) + (1 if v == s else 0))
    return TUSystem.build(rows, b, b, m)


def network_game(g: GraphSpec, pairs: Sequence[tuple[Label, Label]], delays: DelayTable) -> GameInstance:
    if not g.directed:
        raise PreconditionError("network games need a directed graph")
    _check_delays(delays, len(g.edges), "arc")
    pairs = _players(pairs)
    if any(v < 0 for row in delays.values for v in row):
        warnings.warn("negative delays: strategies are all 0/1 solutions of Ax = b, which "
                      "include a path plus disjoint circuits", NegativeDelayWarning, stacklevel=2)
    return GameInstance(tuple(network_system(g, r, s) for r, s in pairs), delays)


def graph_game(kind: str, g: GraphSpec, players: Sequence, delays: DelayTable) -> GameInstance:
    """Dispatch on the descriptor kind; ``players`` holds Subgraphs, or
    (source, sink) pairs for networks."""
    builders = {
        "matching": matching_game, "edge_cover": edge_cover_game,
        "perfect_matching": perfect_matching_game, "stable_set": stable_set_game,
        "vertex_cover": vertex_cover_game, "perfect_vertex_cover": perfect_vertex_cover_game,
        "network": network_game,
    }
    if kind not in builders:
        raise PreconditionError(f"unknown graph game kind {kind!r}")
    return builders[kind](g, players, delays)


def cardinality_variant(inst: GameInstance, mode: str = "nash", sense: str = "max") -> GameInstance:
    """Shift delays so that only extreme-cardinality strategies survive in
    equilibrium (``mode="nash"``) or in a social optimum (``mode="social"``).

    Equilibria and optima of the shifted game are those of the game restricted
    to maximum (``sense="max"``) or minimum (``sense="min"``) cardinality
    strategies.
    """
    shifted = shift_delays(inst.delays, mode, inst.num_resources,
                           players=inst.num_players, sense=sense)
    return inst.with_delays(shifted)
