"""Aggregate-then-decompose solver for symmetric TU congestion games.

Phase one solves one LP over stacked copies ``y^1..y^N`` of the strategy
polytope, with ``y^k_j`` meaning "at least k players use resource j"; the
constraint matrix ``(A A ... A)`` is TU, so the optimal vertex is integral and
``z = sum_k y^k`` is an optimal load vector. Phase two peels one strategy off
``z`` at a time: each step finds a vertex of

    { s : 0 <= s <= 1,  z - (N-1) <= s <= z,
          b_lo <= A s <= b_hi,  (N-1) b_lo <= A (z - s) <= (N-1) b_hi }

and recurses on ``(z - s, N - 1)``.
"""

from __future__ import annotations

from fractions import Fraction

from tucongestion.errors import InfeasibleError, InvariantViolation, PreconditionError
from tucongestion.lp import LinearProgram, find_vertex, solve_lp
from tucongestion.model import (
    DelayTable,
    GameInstance,
    GameState,
    TUSystem,
    is_weakly_convex,
    transform_social,
)
from tucongestion.numeric import is_integral, to_int_vector


def _scaled(bound, factor: int):
    return None if bound is None else factor * bound


def build_aggregated_lp(system: TUSystem, delays: DelayTable, players: int) -> LinearProgram:
    """LP over ``N * n`` variables; variable ``k * n + j`` is ``y^{k+1}_j``."""
    n = system.num_vars
    if delays.num_resources != n:
        raise PreconditionError("delay table and strategy system disagree on the resource count")
    if n and players > delays.max_load:
        raise PreconditionError(f"delays cover loads up to {delays.max_load}, need {players}")
    objective = [delays.values[j][k] for k in range(players) for j in range(n)]
    matrix = [list(row) * players for row in system.matrix]
    return LinearProgram.build(
        objective, matrix,
        [_scaled(b, players) for b in system.row_lower],
        [_scaled(b, players) for b in system.row_upper],
        [0] * (n * players), [1] * (n * players))


def _check_nonempty(system: TUSystem) -> None:
    if not find_vertex(system.relaxation()).optimal:
        raise InfeasibleError("the strategy set is empty: no 0/1 point satisfies the system")


def solve_aggregated(system: TUSystem, delays: DelayTable, players: int) -> tuple[int, ...]:
    """Optimal aggregated load vector ``z`` (integral, in ``[0, N]^n``)."""
    n = system.num_vars
    if players == 0:
        return (0,) * n
    outcome = solve_lp(build_aggregated_lp(system, delays, players))
    if not outcome.optimal:
        raise InfeasibleError(f"aggregated problem is {outcome.status.value}: no feasible state")
    if not is_integral(outcome.solution):
        raise InvariantViolation(
            "aggregated LP returned a fractional vertex; the constraint matrix is not TU")
    y = to_int_vector(outcome.solution)
    return tuple(sum(y[k * n + j] for k in range(players)) for j in range(n))


def aggregated_value(delays: DelayTable, z) -> int:
    return sum(delays.cumulative(j, t) for j, t in enumerate(z))


def peel_polytope(system: TUSystem, players: int, z) -> LinearProgram:
    """The polytope whose vertices are strategies ``s`` leaving ``z - s``
    decomposable among ``players - 1`` players."""
    n = system.num_vars
    rest = players - 1
    var_lower = [max(0, zj - rest) for zj in z]
    var_upper = [min(1, zj) for zj in z]
    az = system.row_values(z)
    row_lower, row_upper = [], []
    for v, lo, hi in zip(az, system.row_lower, system.row_upper):
        lows = [b for b in (lo, None if hi is None else v - rest * hi) if b is not None]
        highs = [b for b in (hi, None if lo is None else v - rest * lo) if b is not None]
        row_lower.append(max(lows) if lows else None)
        row_upper.append(min(highs) if highs else None)
    for j in range(n):
        if var_lower[j] > var_upper[j]:
            raise InvariantViolation(f"residual load {z[j]} cannot be split among {players} players")
    for r, (lo, hi) in enumerate(zip(row_lower, row_upper)):
        if lo is not None and hi is not None and lo > hi:
            raise InvariantViolation(f"row {r}: residual loads violate the aggregated constraints")
    return LinearProgram.build([0] * n, system.matrix, row_lower, row_upper, var_lower, var_upper)


def decompose(system: TUSystem, players: int, z) -> list[tuple[int, ...]]:
    """Split an integral point of ``N * P`` into ``N`` strategies summing to it."""
    z = tuple(int(v) for v in z)
    if len(z) != system.num_vars:
        raise PreconditionError("load vector length does not match the system")
    parts = []
    residual = list(z)
    for remaining in range(players, 0, -1):
        outcome = find_vertex(peel_polytope(system, remaining, residual))
        if not outcome.optimal:
            raise InvariantViolation(
                "decomposition step infeasible; the load vector is not in N * P")
        if not is_integral(outcome.solution):
            raise InvariantViolation("decomposition step returned a fractional vertex")
        s = to_int_vector(outcome.solution)
        parts.append(s)
        residual = [r - v for r, v in zip(residual, s)]
    if any(residual):
        raise InvariantViolation("decomposition left a nonzero residual")
    for s in parts:
        if not system.contains(s):
            raise InvariantViolation(f"decomposed strategy {list(s)} is infeasible")
    return parts


def _require_symmetric_tu(inst: GameInstance) -> TUSystem:
    if not inst.is_tu:
        raise PreconditionError("symmetric TU solver needs TU strategy systems for every player")
    if not inst.symmetric:
        raise PreconditionError(
            "asymmetric TU instance: the aggregate-then-decompose method does not apply; "
            "use best-response dynamics or brute force")
    return inst.strategies[0]


def _solve(inst: GameInstance, delays: DelayTable) -> GameState:
    n = inst.num_resources
    if inst.num_players == 0:
        return GameState(())
    system = _require_symmetric_tu(inst)
    _check_nonempty(system)
    z = solve_aggregated(system, delays, inst.num_players)
    parts = decompose(system, inst.num_players, z)
    state = GameState(tuple(parts))
    if state.loads != z or len(z) != n:
        raise InvariantViolation("decomposed strategies do not sum to the aggregated load")
    return state


def solve_symmetric_nash(inst: GameInstance) -> GameState:
    """A global minimizer of the potential, hence a pure Nash equilibrium."""
    return _solve(inst, inst.delays)


def solve_symmetric_social(inst: GameInstance) -> GameState:
    """A state of minimum social delay; delays must be weakly convex."""
    if not is_weakly_convex(inst.delays):
        raise PreconditionError(
            "social optimum needs weakly convex delays; the general case is NP-hard")
    return _solve(inst, transform_social(inst.delays))


def lp_objective(lp: LinearProgram, y) -> Fraction:
    return sum((c * v for c, v in zip(lp.objective, y)), Fraction(0))
