"""Game data model: strategy systems, delay tables, instances, states and the
quantities defined on them (potential, social delay, player cost).
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional, Sequence, Union

from tucongestion.errors import PreconditionError
from tucongestion.lp import LinearProgram
from tucongestion.numeric import check_matrix

if TYPE_CHECKING:
    from tucongestion.polymatroid import PolymatroidOracle


def _int(value) -> int:
    """Strict integer conversion: rejects floats, Fractions and strings."""
    if isinstance(value, bool):
        return int(value)
    try:
        return operator.index(value)
    except TypeError:
        raise PreconditionError(f"expected an integer, got {value!r}") from None


def _opt_int(value) -> Optional[int]:
    return None if value is None else _int(value)


@dataclass(frozen=True)
class TUSystem:
    """The 0/1 points of ``{x : row_lower <= A x <= row_upper, 0 <= x <= 1}``.

    ``None`` in a row bound means that side is absent. Equality rows use
    ``row_lower == row_upper``.
    """

    matrix: tuple
    row_lower: tuple
    row_upper: tuple
    num_vars: int

    def __post_init__(self):
        m, n = check_matrix(self.matrix, self.num_vars if self.matrix else None)
        if m and n != self.num_vars:
            raise PreconditionError("matrix width does not match num_vars")
        if len(self.row_lower) != m or len(self.row_upper) != m:
            raise PreconditionError("row bounds must have one entry per row")
        for row in self.matrix:
            for a in row:
                if a not in (-1, 0, 1):
                    raise PreconditionError(f"matrix entry {a} outside {{-1, 0, 1}}")
        for r, (lo, hi) in enumerate(zip(self.row_lower, self.row_upper)):
            if lo is not None and hi is not None and lo > hi:
                raise PreconditionError(f"row {r}: lower bound {lo} exceeds upper bound {hi}")

    @classmethod
    def build(cls, matrix: Sequence[Sequence[int]], row_lower: Sequence, row_upper: Sequence,
              num_vars: Optional[int] = None) -> "TUSystem":
        rows = tuple(tuple(_int(a) for a in row) for row in matrix)
        if num_vars is None:
            if not rows:
                raise PreconditionError("num_vars is required for a system without rows")
            num_vars = len(rows[0])
        return cls(rows, tuple(_opt_int(b) for b in row_lower),
                   tuple(_opt_int(b) for b in row_upper), _int(num_vars))

    @classmethod
    def free(cls, num_vars: int) -> "TUSystem":
        """All of ``{0,1}^n``."""
        return cls((), (), (), num_vars)

    @property
    def num_rows(self) -> int:
        return len(self.matrix)

    def row_values(self, x: Sequence) -> list:
        return [sum(a * v for a, v in zip(row, x)) for row in self.matrix]

    def contains(self, x: Sequence[int]) -> bool:
        if len(x) != self.num_vars or any(v not in (0, 1) for v in x):
            return False
        for v, lo, hi in zip(self.row_values(x), self.row_lower, self.row_upper):
            if (lo is not None and v < lo) or (hi is not None and v > hi):
                return False
        return True

    def relaxation(self, objective: Optional[Sequence] = None) -> LinearProgram:
        n = self.num_vars
        return LinearProgram.build(
            objective if objective is not None else [0] * n,
            self.matrix, self.row_lower, self.row_upper, [0] * n, [1] * n)


@dataclass(frozen=True)
class DelayTable:
    """``values[j][k - 1]`` is the delay of resource ``j`` at load ``k``.

    Loads run from 1 to ``max_load``; ``d_j(0)`` is taken to be 0.
    """

    values: tuple

    def __post_init__(self):
        lengths = {len(row) for row in self.values}
        if len(lengths) > 1:
            raise PreconditionError("every resource needs delays for the same load range")
        for j, row in enumerate(self.values):
            for k in range(len(row) - 1):
                if row[k] > row[k + 1]:
                    raise PreconditionError(
                        f"delay of resource {j} decreases from load {k + 1} to {k + 2}")

    @classmethod
    def build(cls, values: Sequence[Sequence[int]]) -> "DelayTable":
        return cls(tuple(tuple(_int(v) for v in row) for row in values))

    @classmethod
    def uniform(cls, num_resources: int, row: Sequence[int]) -> "DelayTable":
        return cls.build([list(row)] * num_resources)

    @property
    def num_resources(self) -> int:
        return len(self.values)

    @property
    def max_load(self) -> int:
        return len(self.values[0]) if self.values else 0

    def __call__(self, j: int, load: int) -> int:
        if load == 0:
            return 0
        if not 1 <= load <= self.max_load:
            raise PreconditionError(f"load {load} outside the delay table range 1..{self.max_load}")
        return self.values[j][load - 1]

    def cumulative(self, j: int, load: int) -> int:
        """Rosenthal term ``sum_{k=1}^{load} d_j(k)``."""
        if load > self.max_load:
            raise PreconditionError(f"load {load} outside the delay table range 1..{self.max_load}")
        return sum(self.values[j][:load])

    def max_abs(self) -> int:
        return max((abs(v) for row in self.values for v in row), default=0)


@dataclass(frozen=True)
class PolymatroidStrategy:
    """Integer points of a polymatroid; with ``base`` only those with x(R) = g(R)."""

    oracle: "PolymatroidOracle"
    base: bool = False

    @property
    def num_vars(self) -> int:
        return self.oracle.size

    def contains(self, x: Sequence[int]) -> bool:
        if len(x) != self.oracle.size or not self.oracle.contains(x):
            return False
        return not self.base or sum(x) == self.oracle.rank_total

    def max_multiplicity(self, j: int) -> int:
        return self.oracle(1 << j)


Descriptor = Union[TUSystem, PolymatroidStrategy]


@dataclass(frozen=True)
class GameInstance:
    strategies: tuple
    delays: DelayTable

    def __post_init__(self):
        n = self.delays.num_resources
        for i, desc in enumerate(self.strategies):
            if not isinstance(desc, (TUSystem, PolymatroidStrategy)):
                raise PreconditionError(f"player {i}: unsupported strategy descriptor {type(desc).__name__}")
            if desc.num_vars != n:
                raise PreconditionError(
                    f"player {i}: strategy descriptor has {desc.num_vars} resources, delays have {n}")
        if self.strategies and self.delays.max_load < self.max_possible_load():
            raise PreconditionError(
                f"delay table covers loads up to {self.delays.max_load}, "
                f"but loads up to {self.max_possible_load()} can occur")

    @classmethod
    def symmetric_game(cls, descriptor: Descriptor, players: int, delays: DelayTable) -> "GameInstance":
        return cls(tuple([descriptor] * players), delays)

    @property
    def num_players(self) -> int:
        return len(self.strategies)

    @property
    def num_resources(self) -> int:
        return self.delays.num_resources

    @property
    def symmetric(self) -> bool:
        return all(s == self.strategies[0] for s in self.strategies[1:])

    @property
    def is_tu(self) -> bool:
        return all(isinstance(s, TUSystem) for s in self.strategies)

    @property
    def is_polymatroid(self) -> bool:
        return bool(self.strategies) and all(isinstance(s, PolymatroidStrategy) for s in self.strategies)

    def max_possible_load(self) -> int:
        best = 0
        for j in range(self.num_resources):
            load = 0
            for desc in self.strategies:
                load += desc.max_multiplicity(j) if isinstance(desc, PolymatroidStrategy) else 1
            best = max(best, load)
        return best

    def with_delays(self, delays: DelayTable) -> "GameInstance":
        return GameInstance(self.strategies, delays)

    def summary(self) -> dict:
        kinds = sorted({"tu" if isinstance(s, TUSystem) else
                        ("polymatroid-base" if s.base else "polymatroid") for s in self.strategies})
        return {"players": self.num_players, "resources": self.num_resources,
                "symmetric": self.symmetric, "descriptor_kinds": kinds}


@dataclass(frozen=True)
class GameState:
    """One integer vector per player plus the load vector ``t``."""

    strategies: tuple
    loads: tuple = field(init=False, compare=False)

    def __post_init__(self):
        strategies = tuple(tuple(_int(v) for v in x) for x in self.strategies)
        object.__setattr__(self, "strategies", strategies)
        widths = {len(x) for x in strategies}
        if len(widths) > 1:
            raise PreconditionError("all strategy vectors must have the same length")
        n = widths.pop() if widths else 0
        object.__setattr__(self, "loads", tuple(sum(x[j] for x in strategies) for j in range(n)))

    @classmethod
    def of(cls, strategies: Sequence[Sequence[int]]) -> "GameState":
        return cls(tuple(tuple(x) for x in strategies))

    @property
    def num_players(self) -> int:
        return len(self.strategies)

    def replace(self, player: int, strategy: Sequence[int]) -> "GameState":
        xs = list(self.strategies)
        xs[player] = tuple(strategy)
        return GameState(tuple(xs))

    def loads_without(self, player: int) -> tuple:
        return tuple(t - v for t, v in zip(self.loads, self.strategies[player]))


def validate_state(inst: GameInstance, state: GameState) -> None:
    if state.num_players != inst.num_players:
        raise PreconditionError(
            f"state has {state.num_players} players, instance has {inst.num_players}")
    for i, (desc, x) in enumerate(zip(inst.strategies, state.strategies)):
        if len(x) != inst.num_resources or not desc.contains(x):
            raise PreconditionError(f"player {i}: strategy {list(x)} is not feasible")


def potential(inst: GameInstance, state: GameState, check: bool = True) -> int:
    """Rosenthal potential ``sum_j sum_{k <= t_j} d_j(k)``."""
    if check:
        validate_state(inst, state)
    return sum(inst.delays.cumulative(j, t) for j, t in enumerate(state.loads))


def social_delay(inst: GameInstance, state: GameState, check: bool = True) -> int:
    """``sum_j t_j * d_j(t_j)``, the total cost paid by all players."""
    if check:
        validate_state(inst, state)
    return sum(t * inst.delays(j, t) for j, t in enumerate(state.loads))


def player_cost(inst: GameInstance, state: GameState, player: int, check: bool = True) -> int:
    if not 0 <= player < inst.num_players:
        raise PreconditionError(f"player index {player} out of range")
    if check:
        validate_state(inst, state)
    x = state.strategies[player]
    return sum(x[j] * inst.delays(j, t) for j, t in enumerate(state.loads) if x[j])


def is_weakly_convex(delays: DelayTable) -> bool:
    """True iff ``k*d(k)`` has nondecreasing increments for 1 < k < max_load."""
    for row in delays.values:
        total = [0] + [k * v for k, v in enumerate(row, start=1)]
        for k in range(2, len(row)):
            if total[k] - total[k - 1] > total[k + 1] - total[k]:
                return False
    return True


def transform_social(delays: DelayTable) -> DelayTable:
    """Delays ``d'(k) = k d(k) - (k-1) d(k-1)`` whose potential equals the social delay."""
    if not is_weakly_convex(delays):
        raise PreconditionError("social transform requires weakly convex delays")
    out = []
    for row in delays.values:
        prev = 0
        new = []
        for k, v in enumerate(row, start=1):
            new.append(k * v - (k - 1) * prev)
            prev = v
        out.append(tuple(new))
    return DelayTable(tuple(out))


def shift_constant(delays: DelayTable, mode: str, resource_count: int,
                   players: Optional[int] = None) -> int:
    delta = delays.max_abs()
    if mode == "nash":
        return 2 * resource_count * delta + 1
    if mode == "social":
        n_players = delays.max_load if players is None else players
        return 2 * n_players * resource_count * delta + 1
    raise PreconditionError(f"unknown shift mode {mode!r}; expected 'nash' or 'social'")


def shift_delays(delays: DelayTable, mode: str, resource_count: int,
                 players: Optional[int] = None, sense: str = "max") -> DelayTable:
    """Shift every delay by the cardinality-forcing constant.

    ``sense="max"`` subtracts the constant, making maximum-cardinality
    strategies strictly preferred; ``sense="min"`` adds it, preferring
    minimum-cardinality ones. ``resource_count`` bounds the size of any
    strategy (|R| for 0/1 games).
    """
    c = shift_constant(delays, mode, resource_count, players)
    if sense == "max":
        c = -c
    elif sense != "min":
        raise PreconditionError(f"unknown cardinality sense {sense!r}")
    return DelayTable(tuple(tuple(v + c for v in row) for row in delays.values))
