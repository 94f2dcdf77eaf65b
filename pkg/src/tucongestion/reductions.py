"""Gadget generators turning positive NAE-SAT formulas into graph games.

Clause ``c_j`` becomes a cycle through ``u_j`` and ``z_j``, and consecutive
gadgets are glued by identifying ``z_j`` with ``u_{j+1}`` (cyclically).
Player ``i`` (variable ``x_i``) owns the subgraph induced by the ``u``/``z``
spine plus the ``v`` side of clauses containing ``x_i`` and the ``v-bar``
side of the others. That subgraph is a single even cycle, so the player has
exactly two strategies, labelled 0 and 1 by the assignment map.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

from tucongestion.errors import PreconditionError
from tucongestion.frontends import GraphSpec, Subgraph, perfect_matching_game, perfect_vertex_cover_game
from tucongestion.model import DelayTable, GameInstance, GameState


@dataclass(frozen=True)
class Clause:
    variables: tuple[int, ...]          # 0-based, distinct
    constants: tuple[int, ...] = ()     # each 0 or 1
    weight: int = 1

    def values(self, assignment: Sequence[int]) -> list[int]:
        return [assignment[v] for v in self.variables] + list(self.constants)


@dataclass(frozen=True)
class SatInstance:
    num_vars: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        if self.num_vars < 1:
            raise PreconditionError("a formula needs at least one variable")
        for j, c in enumerate(self.clauses):
            if not c.variables:
                raise PreconditionError(f"clause {j + 1} has no variables")
            if len(set(c.variables)) != len(c.variables):
                raise PreconditionError(f"clause {j + 1} repeats a variable")
            if any(not 0 <= v < self.num_vars for v in c.variables):
                raise PreconditionError(f"clause {j + 1} references a variable out of range")
            if any(k not in (0, 1) for k in c.constants):
                raise PreconditionError(f"clause {j + 1}: constants must be 0 or 1")
            if not isinstance(c.weight, int) or isinstance(c.weight, bool) or c.weight < 1:
                raise PreconditionError(f"clause {j + 1}: weight must be a positive integer")
        if not self.clauses:
            raise PreconditionError("a formula needs at least one clause")

    def contains(self, j: int, var: int) -> bool:
        return var in self.clauses[j].variables

    def render(self) -> str:
        lines = [f"vars {self.num_vars}"]
        for c in self.clauses:
            lits = [str(v + 1) for v in c.variables] + ["T" if k else "F" for k in c.constants]
            lines.append(f"{c.weight} : {' '.join(lits)}")
        return "\n".join(lines) + "\n"


_LINE = re.compile(r"^\s*(\d+)\s*:\s*(.*)$")


def parse_sat(text: str) -> SatInstance:
    """``w : lit lit [lit]`` per line; literals are 1-based variable indices
    or the constants ``T``/``F``. ``vars N`` fixes the variable count and
    ``#`` starts a comment."""
    declared: Optional[int] = None
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("vars"):
            parts = line.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise PreconditionError(f"line {lineno}: expected 'vars N'")
            declared = int(parts[1])
            continue
        m = _LINE.match(line)
        if not m:
            raise PreconditionError(f"line {lineno}: expected 'weight : literals'")
        lits = m.group(2).split()
        if not 1 <= len(lits) <= 3:
            raise PreconditionError(f"line {lineno}: a clause has one to three literals")
        variables, constants = [], []
        for lit in lits:
            if lit in ("T", "F"):
                constants.append(1 if lit == "T" else 0)
            elif lit.isdigit() and int(lit) >= 1:
                variables.append(int(lit) - 1)
            else:
                raise PreconditionError(f"line {lineno}: bad literal {lit!r}")
        clauses.append(Clause(tuple(variables), tuple(constants), int(m.group(1))))
    used = max((v + 1 for c in clauses for v in c.variables), default=0)
    n = declared if declared is not None else used
    if used > n:
        raise PreconditionError(f"clause uses variable {used} but only {n} are declared")
    return SatInstance(n, tuple(clauses))


def nae_satisfied(clause: Clause, assignment: Sequence[int]) -> bool:
    return len(set(clause.values(assignment))) > 1


def sat_value(sat: SatInstance, assignment: Sequence[int]) -> int:
    """Total weight of the NAE-satisfied clauses."""
    if len(assignment) != sat.num_vars:
        raise PreconditionError(f"assignment has {len(assignment)} values, formula has {sat.num_vars} variables")
    return sum(c.weight for c in sat.clauses if nae_satisfied(c, assignment))


@dataclass(frozen=True)
class ReductionArtifact:
    kind: str
    sat: SatInstance
    instance: GameInstance
    graph: GraphSpec
    labels: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]   # per player (strategy 0, strategy 1)

    def strategy(self, player: int, bit: int) -> tuple[int, ...]:
        return self.labels[player][bit]


def map_state_assignment(art: ReductionArtifact, state: GameState) -> tuple[int, ...]:
    bits = []
    for i, x in enumerate(state.strategies):
        zero, one = art.labels[i]
        if tuple(x) == zero:
            bits.append(0)
        elif tuple(x) == one:
            bits.append(1)
        else:
            raise PreconditionError(f"player {i} plays an unlabelled strategy")
    return tuple(bits)


def map_assignment_state(art: ReductionArtifact, assignment: Sequence[int]) -> GameState:
    if len(assignment) != art.sat.num_vars:
        raise PreconditionError("assignment length does not match the player count")
    if any(b not in (0, 1) for b in assignment):
        raise PreconditionError("assignment entries must be 0 or 1")
    return GameState(tuple(art.labels[i][b] for i, b in enumerate(assignment)))


def _weighted(clause: Clause, players: int) -> list[int]:
    if len(clause.variables) == 1:
        return [clause.weight] * players
    return [clause.weight * (k - 1) for k in range(1, players + 1)]


def _clause_delays(clause: Clause, players: int) -> tuple[list[int], list[int]]:
    """Delays of the '0 side' and '1 side' resources of a clause gadget.

    Players whose variable is 0 load the first, those at 1 the second. A
    constant 1 in the clause satisfies it whenever some variable is 0, so
    the 0 side becomes free; symmetrically for a constant 0.
    """
    if len(clause.variables) > 2:
        raise PreconditionError("local-search gadgets take clauses with at most two variables")
    zero = [0] * players if 1 in clause.constants else _weighted(clause, players)
    one = [0] * players if 0 in clause.constants else _weighted(clause, players)
    return zero, one


def _spine(n: int, j: int, name: str) -> str:
    # z_j is identified with u_{j+1}
    if name == "z":
        return f"u{(j + 1) % n + 1}"
    return f"u{j + 1}"


def _matching_graph(sat: SatInstance) -> tuple[GraphSpec, list[dict]]:
    n = len(sat.clauses)
    nodes = [f"u{j + 1}" for j in range(n)]
    for j in range(n):
        nodes += [f"v{j + 1}", f"vbar{j + 1}"]
    edges, slots = [], []
    for j in range(n):
        u, z = _spine(n, j, "u"), _spine(n, j, "z")
        v, vb = f"v{j + 1}", f"vbar{j + 1}"
        base = len(edges)
        edges += [(v, u), (v, z), (vb, u), (vb, z)]
        slots.append({"vu": base, "vz": base + 1, "vbu": base + 2, "vbz": base + 3})
    return GraphSpec(tuple(nodes), tuple(edges)), slots


def _pm_artifact(sat: SatInstance, kind: str, delays_for) -> ReductionArtifact:
    graph, slots = _matching_graph(sat)
    n_players = sat.num_vars
    rows = [[0] * n_players for _ in graph.edges]
    for j, c in enumerate(sat.clauses):
        zero, one = delays_for(c, n_players)
        rows[slots[j]["vu"]] = zero
        rows[slots[j]["vz"]] = one
    subgraphs, labels = [], []
    m = len(graph.edges)
    for i in range(n_players):
        nodes = {f"u{j + 1}" for j in range(len(sat.clauses))}
        zero, one = [0] * m, [0] * m
        for j in range(len(sat.clauses)):
            inside = sat.contains(j, i)
            nodes.add(f"v{j + 1}" if inside else f"vbar{j + 1}")
            zero[slots[j]["vu" if inside else "vbu"]] = 1
            one[slots[j]["vz" if inside else "vbz"]] = 1
        subgraphs.append(Subgraph(tuple(sorted(nodes, key=graph.node_index)), None))
        labels.append((tuple(zero), tuple(one)))
    inst = perfect_matching_game(graph, subgraphs, DelayTable.build(rows))
    return ReductionArtifact(kind, sat, inst, graph, tuple(labels))


def nae2sat_to_pm(sat: SatInstance) -> ReductionArtifact:
    """Local-search reduction to an asymmetric perfect-matching game."""
    return _pm_artifact(sat, "pm-nae2sat", _clause_delays)


def nae2sat_to_pvc(sat: SatInstance) -> ReductionArtifact:
    """Local-search reduction to an asymmetric perfect-vertex-cover game on
    8-cycle gadgets ``u s v t z t-bar v-bar s-bar``."""
    n = len(sat.clauses)
    nodes = [f"u{j + 1}" for j in range(n)]
    for j in range(n):
        nodes += [f"{p}{j + 1}" for p in ("s", "v", "t", "sbar", "vbar", "tbar")]
    edges = []
    for j in range(n):
        k = j + 1
        u, z = _spine(n, j, "u"), _spine(n, j, "z")
        edges += [(u, f"s{k}"), (f"s{k}", f"v{k}"), (f"v{k}", f"t{k}"), (f"t{k}", z),
                  (z, f"tbar{k}"), (f"tbar{k}", f"vbar{k}"), (f"vbar{k}", f"sbar{k}"), (f"sbar{k}", u)]
    graph = GraphSpec(tuple(nodes), tuple(edges))
    n_players = sat.num_vars
    rows = [[0] * n_players for _ in graph.nodes]
    for j, c in enumerate(sat.clauses):
        zero, one = _clause_delays(c, n_players)
        rows[graph.node_index(f"s{j + 1}")] = zero
        rows[graph.node_index(f"v{j + 1}")] = one
    subgraphs, labels = [], []
    size = len(graph.nodes)
    for i in range(n_players):
        own = {f"u{j + 1}" for j in range(n)}
        zero, one = [0] * size, [0] * size
        for j in range(n):
            k = j + 1
            side = "" if sat.contains(j, i) else "bar"
            own |= {f"s{side}{k}", f"v{side}{k}", f"t{side}{k}"}
            zero[graph.node_index(f"s{side}{k}")] = 1
            zero[graph.node_index(f"t{side}{k}")] = 1
            one[graph.node_index(f"u{k}")] = 1
            one[graph.node_index(f"v{side}{k}")] = 1
        subgraphs.append(Subgraph(tuple(sorted(own, key=graph.node_index)), None))
        labels.append((tuple(zero), tuple(one)))
    inst = perfect_vertex_cover_game(graph, subgraphs, DelayTable.build(rows))
    return ReductionArtifact("pvc-nae2sat", sat, inst, graph, tuple(labels))


def _social_delays(clause: Clause, players: int) -> tuple[list[int], list[int]]:
    row = [0 if k == 1 else k - 2 for k in range(1, players + 1)]
    return row, list(row)


def nae3sat_to_pm_social(sat: SatInstance) -> ReductionArtifact:
    """Reduction to a perfect-matching game with weakly convex delays whose
    minimum social delay is 0 exactly when the formula is NAE-satisfiable."""
    for j, c in enumerate(sat.clauses):
        if len(c.variables) != 3 or c.constants:
            raise PreconditionError(f"clause {j + 1}: expected exactly three distinct variables")
    if any(c.weight != 1 for c in sat.clauses):
        warnings.warn("clause weights are ignored by the social-delay reduction", stacklevel=2)
    return _pm_artifact(sat, "pm-nae3sat", _social_delays)


REDUCTIONS = {
    "pm-nae2sat": nae2sat_to_pm,
    "pvc-nae2sat": nae2sat_to_pvc,
    "pm-nae3sat": nae3sat_to_pm_social,
}
