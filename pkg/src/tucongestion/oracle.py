"""Brute-force ground truth.

Everything here enumerates explicitly: strategy sets point by point, joint
states as a full Cartesian product. Loads and costs over the product are
evaluated with numpy, but no state is ever skipped. Caps raise instead of
truncating.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from typing import Optional, Sequence

import numpy as np

from tucongestion.errors import InfeasibleError, PreconditionError, SizeCapError
from tucongestion.lp import LinearProgram, is_feasible_point
from tucongestion.model import GameInstance, GameState, PolymatroidStrategy, TUSystem, player_cost
from tucongestion.numeric import solve_square
from tucongestion.polymatroid import PolymatroidOracle

MAX_ENUM_VARS = 20
MAX_STATES = 10**6
MAX_POLY_GROUND = 5
MAX_POLY_TOTAL = 6
_CHUNK = 1 << 15


def enumerate_strategies(system: TUSystem) -> list[tuple[int, ...]]:
    """All 0/1 points of the system in lexicographic order.

    Depth-first over variables, 0 before 1. A branch is cut only when some
    row can no longer reach its bounds whatever the unassigned variables do,
    so no feasible point is ever skipped; leaves are re-checked in full.
    """
    n = system.num_vars
    if n > MAX_ENUM_VARS:
        raise SizeCapError(f"strategy enumeration is capped at {MAX_ENUM_VARS} variables")
    rows = system.matrix
    m = len(rows)
    # lo_rest[r][k] / hi_rest[r][k]: extreme contributions of variables k..n-1 to row r
    lo_rest = [[0] * (n + 1) for _ in range(m)]
    hi_rest = [[0] * (n + 1) for _ in range(m)]
    for r in range(m):
        for k in range(n - 1, -1, -1):
            a = rows[r][k]
            lo_rest[r][k] = lo_rest[r][k + 1] + min(0, a)
            hi_rest[r][k] = hi_rest[r][k + 1] + max(0, a)
    lower, upper = system.row_lower, system.row_upper
    partial = [0] * m
    x = [0] * n
    out = []

    def viable(k: int) -> bool:
        for r in range(m):
            if lower[r] is not None and partial[r] + hi_rest[r][k] < lower[r]:
                return False
            if upper[r] is not None and partial[r] + lo_rest[r][k] > upper[r]:
                return False
        return True

    def walk(k: int) -> None:
        if not viable(k):
            return
        if k == n:
            if system.contains(x):
                out.append(tuple(x))
            return
        walk(k + 1)
        x[k] = 1
        for r in range(m):
            partial[r] += rows[r][k]
        walk(k + 1)
        for r in range(m):
            partial[r] -= rows[r][k]
        x[k] = 0

    walk(0)
    return out


def _polymatroid_points(g: PolymatroidOracle, base: bool = False) -> list[tuple[int, ...]]:
    if g.size > MAX_ENUM_VARS:
        raise SizeCapError(f"strategy enumeration is capped at {MAX_ENUM_VARS} resources")
    ranges = [range(g(1 << j) + 1) for j in range(g.size)]
    return [x for x in product(*ranges)
            if g.contains(x) and (not base or sum(x) == g.rank_total)]


def enumerate_polymatroid_points(oracles: Sequence[PolymatroidOracle]) -> list[tuple[int, ...]]:
    """All integer points of the sum polymatroid (|R| <= 5, sum g_i(R) <= 6)."""
    if not oracles:
        return [()]
    size = oracles[0].size
    total = [sum(vals) for vals in zip(*(g.table for g in oracles))]
    if size > MAX_POLY_GROUND or total[-1] > MAX_POLY_TOTAL:
        raise SizeCapError(
            f"sum polymatroid enumeration is capped at |R| <= {MAX_POLY_GROUND}, "
            f"sum g_i(R) <= {MAX_POLY_TOTAL}")
    ranges = [range(total[1 << j] + 1) for j in range(size)]
    points = []
    for v in product(*ranges):
        ok = True
        for mask in range(1, 1 << size):
            if sum(v[j] for j in range(size) if mask >> j & 1) > total[mask]:
                ok = False
                break
        if ok:
            points.append(v)
    return points


def player_strategies(inst: GameInstance, player: int) -> list[tuple[int, ...]]:
    desc = inst.strategies[player]
    if isinstance(desc, TUSystem):
        return enumerate_strategies(desc)
    assert isinstance(desc, PolymatroidStrategy)
    return _polymatroid_points(desc.oracle, desc.base)


class _Product:
    """The joint strategy space with vectorized load and cost tables."""

    def __init__(self, inst: GameInstance):
        self.inst = inst
        self.sets = [player_strategies(inst, i) for i in range(inst.num_players)]
        sizes = [len(s) for s in self.sets]
        self.total = int(np.prod(sizes, dtype=object)) if sizes else 1
        if self.total > MAX_STATES:
            raise SizeCapError(f"joint state space has {self.total} states, cap is {MAX_STATES}")
        n = inst.num_resources
        self.arrays = [np.array(s, dtype=np.int64).reshape(len(s), n) for s in self.sets]
        d = inst.delays
        big = d.max_abs() * max(d.max_load, 1) ** 2 > 2**40
        dtype = object if big else np.int64
        # delay[j, t] = d_j(t), t = 0..max_load
        self.delay = np.array([[0] + list(row) for row in d.values], dtype=dtype).reshape(n, d.max_load + 1)
        self.rosenthal = np.cumsum(self.delay, axis=1) if n else self.delay
        self.sizes = sizes

    def chunks(self):
        """Yield (index array of shape (B, N), loads of shape (B, n))."""
        n = self.inst.num_resources
        if self.total == 0:
            return
        flat = np.arange(self.total, dtype=np.int64)
        for start in range(0, self.total, _CHUNK):
            ids = flat[start:start + _CHUNK]
            cols = []
            rem = ids.copy()
            for size in reversed(self.sizes):
                cols.append(rem % size)
                rem //= size
            idx = np.stack(cols[::-1], axis=1) if cols else np.zeros((len(ids), 0), dtype=np.int64)
            loads = np.zeros((len(ids), n), dtype=np.int64)
            for i, arr in enumerate(self.arrays):
                loads += arr[idx[:, i]]
            yield idx, loads

    def state(self, row) -> GameState:
        return GameState(tuple(self.sets[i][int(k)] for i, k in enumerate(row)))

    def lookup(self, table, loads):
        n = self.inst.num_resources
        return table[np.arange(n)[None, :], loads]

    def potentials(self, loads):
        return self.lookup(self.rosenthal, loads).sum(axis=1)

    def socials(self, loads):
        return (loads * self.lookup(self.delay, loads)).sum(axis=1)


def _argmin(inst: GameInstance, value_fn) -> tuple[GameState, int]:
    space = _Product(inst)
    if space.total == 0:
        raise InfeasibleError("some player has an empty strategy set")
    best_val, best_row = None, None
    for idx, loads in space.chunks():
        vals = value_fn(space, loads)
        k = int(np.argmin(vals))
        if best_val is None or vals[k] < best_val:
            best_val, best_row = vals[k], idx[k]
    return space.state(best_row), int(best_val)


def brute_force_min_potential(inst: GameInstance) -> tuple[GameState, int]:
    """First state (in lexicographic index order) of minimum potential."""
    return _argmin(inst, _Product.potentials)


def brute_force_min_social(inst: GameInstance) -> tuple[GameState, int]:
    return _argmin(inst, _Product.socials)


def brute_force_all_nash(inst: GameInstance) -> list[GameState]:
    """Every pure Nash equilibrium, by checking every unilateral deviation."""
    space = _Product(inst)
    found = []
    for idx, loads in space.chunks():
        stable = np.ones(len(idx), dtype=bool)
        for i, arr in enumerate(space.arrays):
            own = arr[idx[:, i]]
            others = loads - own
            current = (own * space.lookup(space.delay, loads)).sum(axis=1)
            # cost of every alternative strategy against the frozen others
            for alt in arr:
                new_loads = others + alt[None, :]
                cost = (alt[None, :] * space.lookup(space.delay, new_loads)).sum(axis=1)
                stable &= ~(cost < current)
        for row in idx[stable]:
            found.append(space.state(row))
    return found


def is_nash_by_definition(inst: GameInstance, state: GameState) -> bool:
    """Definition-level check of a single state against every deviation."""
    for i in range(inst.num_players):
        current = player_cost(inst, state, i)
        for alt in player_strategies(inst, i):
            if player_cost(inst, state.replace(i, alt), i) < current:
                return False
    return True


def lp_vertex_optimum(lp: LinearProgram) -> Optional[Fraction]:
    """Optimal value by enumerating every basic solution; None if infeasible.

    Needs finite bounds on every variable so the feasible region is a
    polytope and its minimum sits at a vertex.
    """
    n = lp.num_vars
    if any(lo is None or hi is None for lo, hi in zip(lp.var_lower, lp.var_upper)):
        raise PreconditionError("vertex enumeration needs finite variable bounds")
    # candidate tight constraints as (row, rhs)
    planes = []
    for k in range(n):
        unit = [0] * n
        unit[k] = 1
        planes.append((unit, lp.var_lower[k]))
        planes.append((unit, lp.var_upper[k]))
    for row, lo, hi in zip(lp.matrix, lp.row_lower, lp.row_upper):
        for b in {lo, hi} - {None}:
            planes.append((list(row), b))
    if not planes or n == 0:
        return Fraction(0) if is_feasible_point(lp, [Fraction(0)] * n) else None
    subsets = np.array(list(combinations(range(len(planes)), n)), dtype=np.int64)
    normals = np.array([p[0] for p in planes], dtype=np.float64)
    rhs = np.array([float(p[1]) for p in planes], dtype=np.float64)
    systems = normals[subsets]
    # integer matrices with tiny entries: the rounded float determinant is exact
    regular = np.abs(np.round(np.linalg.det(systems))) >= 1
    subsets, systems = subsets[regular], systems[regular]
    points = np.linalg.solve(systems, rhs[subsets][..., None])[..., 0] if len(subsets) else np.zeros((0, n))
    # loose float screen; survivors are re-solved and re-checked exactly
    ok = np.ones(len(points), dtype=bool)
    tol = 1e-6
    lo = np.array([float(v) for v in lp.var_lower])
    hi = np.array([float(v) for v in lp.var_upper])
    ok &= np.all(points >= lo - tol, axis=1) & np.all(points <= hi + tol, axis=1)
    if lp.num_rows:
        a = np.array(lp.matrix, dtype=np.float64)
        vals = points @ a.T
        for r in range(lp.num_rows):
            if lp.row_lower[r] is not None:
                ok &= vals[:, r] >= float(lp.row_lower[r]) - tol
            if lp.row_upper[r] is not None:
                ok &= vals[:, r] <= float(lp.row_upper[r]) + tol
    best = None
    for subset in subsets[ok]:
        x = solve_square([planes[p][0] for p in subset], [planes[p][1] for p in subset])
        if x is None or not is_feasible_point(lp, x):
            continue
        value = sum((c * v for c, v in zip(lp.objective, x)), Fraction(0))
        if best is None or value < best:
            best = value
    return best


def tu_by_determinants(mats: np.ndarray) -> np.ndarray:
    """TU verdict for a batch ``(B, m, n)`` by evaluating every square minor.

    Minors of order k are expanded along their first row from the memoized
    minors of order k - 1. For k <= 4 every minor of a {-1,0,1} matrix is at
    most 16 in absolute value (Hadamard), so int8 is exact; larger orders
    use int64.
    """
    mats = np.asarray(mats)
    b, m, n = mats.shape
    ok = np.all((mats >= -1) & (mats <= 1), axis=(1, 2))
    mats = mats.astype(np.int8 if min(m, n) <= 4 else np.int64)
    minors: dict = {}
    for r in range(m):
        for c in range(n):
            minors[(r,), (c,)] = mats[:, r, c]
    for k in range(2, min(m, n) + 1):
        nxt: dict = {}
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                det = np.zeros(b, dtype=mats.dtype)
                for t, c in enumerate(cols):
                    rest = cols[:t] + cols[t + 1:]
                    term = mats[:, rows[0], c] * minors[rows[1:], rest]
                    det = det + term if t % 2 == 0 else det - term
                ok &= np.abs(det) <= 1
                nxt[rows, cols] = det
        minors = nxt
    return ok


def all_sign_matrices(m: int, n: int, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
    """Matrices ``start..stop-1`` of the base-3 enumeration of {-1,0,1}^(m x n)."""
    total = 3 ** (m * n)
    stop = total if stop is None else min(stop, total)
    ids = np.arange(start, stop, dtype=np.int64)
    digits = np.empty((len(ids), m * n), dtype=np.int8)
    for k in range(m * n):
        digits[:, k] = ids % 3 - 1
        ids //= 3
    return digits.reshape(-1, m, n)
