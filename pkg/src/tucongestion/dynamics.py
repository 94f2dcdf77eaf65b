"""Exact best-response dynamics and Nash verification.

A deviating player faces the linear cost ``c_j = d_j(t_j(x^-i) + 1)``, so on
a TU strategy set the best response is an LP over the player's polytope whose
optimal vertex is a strategy. Matroid players use the greedy algorithm on the
same linear costs; general polymatroid players (whose cost is not linear in
their own multiplicities) are handled by enumerating their integer points.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from tucongestion.errors import InfeasibleError, InvariantViolation, PreconditionError
from tucongestion.lp import find_vertex, solve_lp
from tucongestion.model import (
    GameInstance,
    GameState,
    PolymatroidStrategy,
    TUSystem,
    player_cost,
    potential,
    validate_state,
)
from tucongestion.numeric import is_integral, to_int_vector


def _deviation_costs(inst: GameInstance, others: Sequence[int], player: int) -> list[int]:
    desc = inst.strategies[player]
    # resources the player can never take get cost 0; their load may exceed the table
    usable = [isinstance(desc, TUSystem) or desc.max_multiplicity(j) > 0 for j in range(len(others))]
    return [inst.delays(j, t + 1) if usable[j] else 0 for j, t in enumerate(others)]


def _matroid_best(g, costs: Sequence[int], base: bool) -> tuple[int, ...]:
    """Greedy optimum of a linear cost over a matroid's independent sets or bases."""
    order = sorted(range(g.size), key=lambda j: (costs[j], j))
    chosen = 0
    x = [0] * g.size
    for j in order:
        if not base and costs[j] >= 0:
            break
        if g(chosen | (1 << j)) > g(chosen):
            chosen |= 1 << j
            x[j] = 1
    return tuple(x)


def _deviation_cost(inst: GameInstance, others: Sequence[int], x: Sequence[int]) -> int:
    return sum(v * inst.delays(j, others[j] + v) for j, v in enumerate(x) if v)


def _optimal_strategy(inst: GameInstance, player: int, others: Sequence[int],
                      current: Optional[Sequence[int]] = None) -> tuple[int, ...]:
    desc = inst.strategies[player]
    if isinstance(desc, TUSystem):
        # the current strategy is a feasible 0/1 point: a warm start with no phase one
        outcome = solve_lp(desc.relaxation(_deviation_costs(inst, others, player)), start=current)
        if not outcome.optimal:
            raise InfeasibleError(f"player {player} has an empty strategy set")
        if not is_integral(outcome.solution):
            raise InvariantViolation(f"player {player}: best-response LP vertex is fractional")
        return to_int_vector(outcome.solution)
    assert isinstance(desc, PolymatroidStrategy)
    if desc.oracle.is_matroid:
        return _matroid_best(desc.oracle, _deviation_costs(inst, others, player), desc.base)
    from tucongestion.oracle import player_strategies

    return min(player_strategies(inst, player), key=lambda x: _deviation_cost(inst, others, x))


def best_response(inst: GameInstance, state: GameState, player: int,
                  check: bool = True) -> Optional[tuple[int, ...]]:
    """An exact cost-minimizing strategy for ``player``, or None when the
    current strategy already attains the minimum."""
    if not 0 <= player < inst.num_players:
        raise PreconditionError(f"player index {player} out of range")
    if check:
        validate_state(inst, state)
    others = state.loads_without(player)
    best = _optimal_strategy(inst, player, others, state.strategies[player])
    current = player_cost(inst, state, player, check=False)
    if _deviation_cost(inst, others, best) < current:
        return best
    return None


class Termination(enum.Enum):
    NASH_REACHED = "nash-reached"
    ITERATION_CAP = "iteration-cap"


@dataclass(frozen=True)
class Step:
    player: int
    old_cost: int
    new_cost: int
    potential: int

    def render(self) -> str:
        return (f"player {self.player}: cost {self.old_cost} -> {self.new_cost}, "
                f"potential {self.potential}")


@dataclass
class DynamicsTrace:
    initial_potential: int
    steps: list[Step] = field(default_factory=list)
    termination: Termination = Termination.NASH_REACHED

    def render(self) -> list[str]:
        return [s.render() for s in self.steps]


def initial_state(inst: GameInstance) -> GameState:
    """Some feasible state: a vertex of each player's own polytope."""
    xs = []
    for i, desc in enumerate(inst.strategies):
        if isinstance(desc, TUSystem):
            outcome = find_vertex(desc.relaxation())
            if not outcome.optimal:
                raise InfeasibleError(f"player {i} has an empty strategy set")
            if not is_integral(outcome.solution):
                raise InvariantViolation(f"player {i}: initial vertex is fractional")
            xs.append(to_int_vector(outcome.solution))
        else:
            zero = [0] * inst.num_resources
            xs.append(_matroid_best(desc.oracle, zero, True) if desc.base and desc.oracle.is_matroid
                      else _optimal_strategy(inst, i, zero) if desc.base else tuple(zero))
    return GameState(tuple(xs))


def run_dynamics(inst: GameInstance, initial: Union[GameState, str] = "auto",
                 max_iters: Optional[int] = None) -> tuple[GameState, DynamicsTrace]:
    """Round-robin best-response dynamics.

    Players are scanned cyclically in descending index order, starting just
    below the last mover (initially at the highest index); the first player
    with a strictly improving best response moves. Stops at a Nash
    equilibrium or after ``max_iters`` moves.
    """
    if max_iters is not None and max_iters < 0:
        raise PreconditionError("iteration cap must be nonnegative")
    state = initial_state(inst) if isinstance(initial, str) and initial == "auto" else initial
    if not isinstance(state, GameState):
        raise PreconditionError("initial must be a GameState or 'auto'")
    validate_state(inst, state)
    phi = potential(inst, state, check=False)
    trace = DynamicsTrace(phi)
    n_players = inst.num_players
    start = n_players - 1
    while True:
        mover = None
        for offset in range(n_players):
            i = (start - offset) % n_players
            br = best_response(inst, state, i, check=False)
            if br is not None:
                mover = (i, br)
                break
        if mover is None:
            trace.termination = Termination.NASH_REACHED
            return state, trace
        if max_iters is not None and len(trace.steps) >= max_iters:
            trace.termination = Termination.ITERATION_CAP
            return state, trace
        i, br = mover
        old = player_cost(inst, state, i, check=False)
        state = state.replace(i, br)
        new = player_cost(inst, state, i, check=False)
        new_phi = potential(inst, state, check=False)
        if not new < old:
            raise InvariantViolation("best response did not improve the deviator's cost")
        if inst.is_tu or all(isinstance(s, TUSystem) or s.oracle.is_matroid for s in inst.strategies):
            if phi - new_phi != old - new:
                raise InvariantViolation("potential drop differs from the deviator's improvement")
        trace.steps.append(Step(i, old, new, new_phi))
        phi = new_phi
        start = (i - 1) % n_players


@dataclass(frozen=True)
class NashCheck:
    is_nash: bool
    player: Optional[int] = None
    better_strategy: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.is_nash


def verify_nash(inst: GameInstance, state: GameState) -> NashCheck:
    """Exact Nash test; on failure returns the highest-indexed improvable
    player and a strictly better strategy for that player."""
    validate_state(inst, state)
    for i in reversed(range(inst.num_players)):
        br = best_response(inst, state, i, check=False)
        if br is not None:
            return NashCheck(False, i, br)
    return NashCheck(True)
