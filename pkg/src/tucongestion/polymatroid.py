"""Polymatroid strategy sets: oracles, greedy aggregated optimization and
integer decomposition across distinct polymatroids.

Set functions are stored as value tables indexed by subset bitmask, so every
routine here is exhaustive in ``2^|R|`` and capped at ``|R| <= 20``.
"""

from __future__ import annotations

import warnings
from typing import Callable, Iterable, Sequence

from tucongestion.errors import InvariantViolation, PreconditionError, SizeCapError
from tucongestion.model import (
    DelayTable,
    GameInstance,
    GameState,
    PolymatroidStrategy,
    is_weakly_convex,
    shift_delays,
)

MAX_GROUND_SET = 20


class OutsideGuaranteeWarning(UserWarning):
    """The requested computation lies outside the proven correctness guarantees."""


def _check_size(size: int) -> None:
    if size > MAX_GROUND_SET:
        raise SizeCapError(f"polymatroid routines are capped at |R| <= {MAX_GROUND_SET}, got {size}")


def subset_sums(x: Sequence[int]) -> list[int]:
    """``out[mask] = sum of x[j] for j in mask``."""
    out = [0] * (1 << len(x))
    for mask in range(1, len(out)):
        low = mask & -mask
        out[mask] = out[mask ^ low] + x[low.bit_length() - 1]
    return out


class PolymatroidOracle:
    """Integer set function on ``{0..size-1}`` given by its value table."""

    __slots__ = ("size", "table")

    def __init__(self, size: int, table: Sequence[int], check: bool = True):
        _check_size(size)
        if len(table) != 1 << size:
            raise PreconditionError(f"value table must have 2^{size} = {1 << size} entries")
        for v in table:
            if isinstance(v, bool) or not isinstance(v, int):
                raise PreconditionError(f"polymatroid values must be integers, got {v!r}")
        self.size = size
        self.table = tuple(table)
        if check and not validate_oracle(self):
            raise PreconditionError(
                "set function is not a polymatroid rank function "
                "(normalized, nondecreasing, submodular)")

    @classmethod
    def from_function(cls, size: int, func: Callable[[frozenset], int], check: bool = True):
        """Tabulate ``func`` once; it is never called again."""
        _check_size(size)
        table = [func(frozenset(j for j in range(size) if mask >> j & 1)) for mask in range(1 << size)]
        return cls(size, table, check)

    @classmethod
    def uniform_matroid(cls, size: int, rank: int) -> "PolymatroidOracle":
        return cls(size, [min(bin(mask).count("1"), rank) for mask in range(1 << size)])

    @classmethod
    def free_matroid(cls, size: int) -> "PolymatroidOracle":
        return cls.uniform_matroid(size, size)

    def __call__(self, mask: int) -> int:
        return self.table[mask]

    def value(self, subset: Iterable[int]) -> int:
        mask = 0
        for j in subset:
            mask |= 1 << j
        return self.table[mask]

    @property
    def rank_total(self) -> int:
        return self.table[-1]

    @property
    def is_matroid(self) -> bool:
        """Unit increments: the table is a matroid rank function."""
        return all(self.table[1 << j] <= 1 for j in range(self.size))

    def contains(self, x: Sequence[int]) -> bool:
        if len(x) != self.size or any(v < 0 for v in x):
            return False
        return all(s <= g for s, g in zip(subset_sums(x), self.table))

    def __eq__(self, other):
        return isinstance(other, PolymatroidOracle) and (self.size, self.table) == (other.size, other.table)

    def __hash__(self):
        return hash((self.size, self.table))

    def __repr__(self):
        return f"PolymatroidOracle(size={self.size}, table={list(self.table)})"


def validate_oracle(g: PolymatroidOracle) -> bool:
    """Normalized, nonnegative, nondecreasing and submodular."""
    t = g.table
    if t[0] != 0:
        return False
    full = len(t)
    for mask in range(full):
        for a in range(g.size):
            abit = 1 << a
            if mask & abit:
                continue
            if t[mask | abit] < t[mask]:
                return False
            for b in range(a + 1, g.size):
                bbit = 1 << b
                if mask & bbit:
                    continue
                if t[mask | abit] + t[mask | bbit] < t[mask | abit | bbit] + t[mask]:
                    return False
    return True


def _sum_table(oracles: Sequence[PolymatroidOracle], size: int) -> list[int]:
    total = [0] * (1 << size)
    for g in oracles:
        if g.size != size:
            raise PreconditionError("all oracles must share the ground set")
        total = [a + b for a, b in zip(total, g.table)]
    return total


def _ground_size(oracles: Sequence[PolymatroidOracle]) -> int:
    if not oracles:
        raise PreconditionError("at least one oracle is required")
    size = oracles[0].size
    _check_size(size)
    return size


def membership(oracles: Sequence[PolymatroidOracle], v: Sequence[int]) -> bool:
    """Is ``v`` an integer point of ``P_{g_1} + ... + P_{g_N}``?"""
    size = _ground_size(oracles)
    if len(v) != size or any(x < 0 for x in v):
        return False
    total = _sum_table(oracles, size)
    return all(s <= g for s, g in zip(subset_sums(v), total))


def _check_convex(values: Sequence[int], j: int) -> None:
    steps = [values[k + 1] - values[k] for k in range(len(values) - 1)]
    if any(a > b for a, b in zip(steps, steps[1:])):
        raise PreconditionError(f"objective for resource {j} is not weakly convex")


def greedy_min_separable(oracles: Sequence[PolymatroidOracle],
                         functions: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Minimize ``sum_j f_j(z_j)`` over integer points of the sum polymatroid.

    ``functions[j][k]`` is ``f_j(k)`` for ``k = 0..cap_j``; every ``f_j`` must
    have nondecreasing increments. Starting from 0, repeatedly take the unit
    step with the most negative marginal that keeps ``z`` feasible.
    """
    size = _ground_size(oracles)
    if len(functions) != size:
        raise PreconditionError("need one objective function per resource")
    for j, f in enumerate(functions):
        _check_convex(f, j)
    total = _sum_table(oracles, size)
    slack = list(total)
    z = [0] * size
    while True:
        best, best_gain = None, 0
        for j in range(size):
            f = functions[j]
            if z[j] + 1 >= len(f):
                continue
            gain = f[z[j] + 1] - f[z[j]]
            if gain >= best_gain:
                continue
            bit = 1 << j
            if all(slack[mask] >= 1 for mask in range(bit, len(slack)) if mask & bit):
                best, best_gain = j, gain
        if best is None:
            return tuple(z)
        z[best] += 1
        bit = 1 << best
        for mask in range(bit, len(slack)):
            if mask & bit:
                slack[mask] -= 1


def _extendable(g: Sequence[int], h: Sequence[int], z: Sequence[int], prefix: Sequence[int]) -> bool:
    """Can ``prefix`` (values of x on the first coordinates) be completed to
    ``x`` with ``x`` in ``P_g`` and ``z - x`` in ``P_h``?

    Fixing coordinates contracts each polymatroid to the one with rank
    ``U -> min_T (f(T | U) - fixed(T))``; the completion exists iff the free
    part of ``z`` lies in the sum of the two contractions.
    """
    size = len(z)
    k = len(prefix)
    pre = (1 << k) - 1
    fixed_x = list(prefix)
    fixed_y = [z[j] - prefix[j] for j in range(k)]
    if any(v < 0 for v in fixed_y):
        return False
    sx = subset_sums(fixed_x)
    sy = subset_sums(fixed_y)
    suffix_z = list(z[k:])
    sz = subset_sums(suffix_z)
    pre_masks = range(pre + 1)
    for u in range(1 << (size - k)):
        umask = u << k
        gx = min(g[t | umask] - sx[t] for t in pre_masks)
        hy = min(h[t | umask] - sy[t] for t in pre_masks)
        if u == 0:
            if gx < 0 or hy < 0:
                return False
        elif sz[u] > gx + hy:
            return False
    return True


def decompose_polymatroid(oracles: Sequence[PolymatroidOracle], z: Sequence[int]) -> list[tuple[int, ...]]:
    """Split ``z`` into ``x^1 + ... + x^N`` with ``x^i`` an integer point of ``P_{g_i}``.

    Player ``i`` takes, coordinate by coordinate, the largest value that
    still leaves a completion whose residual fits the remaining players.
    """
    size = _ground_size(oracles)
    z = [int(v) for v in z]
    if not membership(oracles, z):
        raise PreconditionError("load vector is not in the sum polymatroid")
    parts = []
    residual = list(z)
    for i, g in enumerate(oracles):
        if i == len(oracles) - 1:
            x = list(residual)
        else:
            rest = _sum_table(oracles[i + 1:], size)
            x = []
            for r in range(size):
                top = min(residual[r], g(1 << r))
                for v in range(top, -1, -1):
                    if _extendable(g.table, rest, residual, x + [v]):
                        x.append(v)
                        break
                else:
                    raise InvariantViolation(f"no feasible value for player {i} on resource {r}")
        if not g.contains(x):
            raise InvariantViolation(f"player {i} received {x}, outside its polymatroid")
        parts.append(tuple(x))
        residual = [a - b for a, b in zip(residual, x)]
    if any(residual) or [sum(c) for c in zip(*parts)] != z:
        raise InvariantViolation("decomposition does not sum to the load vector")
    return parts


def polymatroid_game(oracles: Sequence[PolymatroidOracle], delays: DelayTable,
                     base: bool = False) -> GameInstance:
    return GameInstance(tuple(PolymatroidStrategy(g, base) for g in oracles), delays)


def potential_functions(delays: DelayTable, caps: Sequence[int]) -> list[list[int]]:
    """``phi_j(k) = sum_{l <= k} d_j(l)`` for ``k = 0..cap_j``."""
    return [[delays.cumulative(j, k) for k in range(cap + 1)] for j, cap in enumerate(caps)]


def social_functions(delays: DelayTable, caps: Sequence[int]) -> list[list[int]]:
    """``gamma_j(k) = k * d_j(k)`` for ``k = 0..cap_j``."""
    return [[k * delays(j, k) for k in range(cap + 1)] for j, cap in enumerate(caps)]


def _split_game(inst: GameInstance) -> tuple[list[PolymatroidOracle], bool]:
    if not inst.is_polymatroid:
        raise PreconditionError("polymatroid solver needs polymatroid descriptors for every player")
    modes = {s.base for s in inst.strategies}
    if len(modes) > 1:
        raise PreconditionError("mixing base and independent-set players is not supported")
    return [s.oracle for s in inst.strategies], modes.pop()


def nash_guaranteed(inst: GameInstance) -> bool:
    """True when every oracle is a matroid rank function (0/1 strategies)."""
    return inst.is_polymatroid and all(s.oracle.is_matroid for s in inst.strategies)


def cardinality_bound(oracles: Sequence[PolymatroidOracle]) -> int:
    """Upper bound on the size of any strategy: |R| for matroids, else max g(R)."""
    if all(g.is_matroid for g in oracles):
        return oracles[0].size
    return max(max(g.rank_total for g in oracles), 1)


def _assemble(oracles, delays: DelayTable, functions_for) -> GameState:
    size = oracles[0].size
    caps = [sum(g(1 << j) for g in oracles) for j in range(size)]
    z = greedy_min_separable(oracles, functions_for(delays, caps))
    return GameState(tuple(decompose_polymatroid(oracles, z)))


def _check_bases(inst: GameInstance, state: GameState) -> None:
    for i, (s, x) in enumerate(zip(inst.strategies, state.strategies)):
        if not s.contains(x):
            raise InvariantViolation(f"player {i}: shifted optimum is not a base")


def solve_matroid_nash(inst: GameInstance) -> GameState:
    """Global potential minimizer of an independent-set or base matroid game.

    Base games are solved on the independent-set game with delays shifted
    down so that only maximum-size strategies survive. Non-matroid
    polymatroids run through the same pipeline with an
    :class:`OutsideGuaranteeWarning`: their costs are not an exact potential.
    """
    if inst.num_players == 0:
        return GameState(())
    oracles, base = _split_game(inst)
    if not nash_guaranteed(inst):
        warnings.warn("polymatroid Nash computation is outside the proven guarantees; "
                      "the result minimizes the Rosenthal potential only",
                      OutsideGuaranteeWarning, stacklevel=2)
    delays = inst.delays
    if base:
        delays = shift_delays(delays, "nash", cardinality_bound(oracles))
    state = _assemble(oracles, delays, potential_functions)
    if base:
        _check_bases(inst, state)
    return state


def solve_polymatroid_social(inst: GameInstance) -> GameState:
    """Socially optimal state of a (base) polymatroid game with weakly convex delays."""
    if inst.num_players == 0:
        return GameState(())
    oracles, base = _split_game(inst)
    if not is_weakly_convex(inst.delays):
        raise PreconditionError("social optimum needs weakly convex delays")
    delays = inst.delays
    if base:
        delays = shift_delays(delays, "social", cardinality_bound(oracles), players=inst.num_players)
    state = _assemble(oracles, delays, social_functions)
    if base:
        _check_bases(inst, state)
    return state
