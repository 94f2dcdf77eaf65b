"""Seeded random instances: TU systems, delay tables, (poly)matroids, LPs."""

from __future__ import annotations

import random
from typing import Optional

from tucongestion.lp import LinearProgram
from tucongestion.model import DelayTable, GameInstance, PolymatroidStrategy, TUSystem, is_weakly_convex
from tucongestion.polymatroid import PolymatroidOracle

TU_FAMILIES = ("digraph", "bipartite", "interval")


def digraph_incidence(rng: random.Random, m: int, n: int) -> list[list[int]]:
    """Node-arc incidence of a random digraph on m nodes with n arcs (m >= 2)."""
    rows = [[0] * n for _ in range(m)]
    for k in range(n):
        tail, head = rng.sample(range(m), 2)
        rows[tail][k] = -1
        rows[head][k] = 1
    return rows


def bipartite_incidence(rng: random.Random, m: int, n: int) -> list[list[int]]:
    """Node-edge incidence of a random bipartite multigraph; m >= 2 nodes."""
    left = rng.randint(1, m - 1)
    rows = [[0] * n for _ in range(m)]
    for k in range(n):
        rows[rng.randrange(left)][k] = 1
        rows[rng.randrange(left, m)][k] = 1
    return rows


def interval_matrix(rng: random.Random, m: int, n: int) -> list[list[int]]:
    """Each row is a run of consecutive ones."""
    rows = []
    for _ in range(m):
        a = rng.randrange(n)
        b = rng.randrange(a, n)
        rows.append([1 if a <= k <= b else 0 for k in range(n)])
    return rows


def random_tu_matrix(rng: random.Random, m: int, n: int, family: Optional[str] = None) -> list[list[int]]:
    """A TU matrix from one of the families, possibly transposed and with
    some rows negated (both keep total unimodularity)."""
    family = family or rng.choice(TU_FAMILIES)
    transpose = rng.random() < 0.3
    rm, rn = (n, m) if transpose else (m, n)
    if family in ("digraph", "bipartite") and rm < 2:
        family = "interval"
    if family == "digraph":
        a = digraph_incidence(rng, rm, rn)
    elif family == "bipartite":
        a = bipartite_incidence(rng, rm, rn)
    elif family == "interval":
        a = interval_matrix(rng, rm, rn)
    else:
        raise ValueError(f"unknown TU family {family!r}")
    if transpose:
        a = [list(col) for col in zip(*a)]
    return [[-v for v in row] if rng.random() < 0.2 else row for row in a]


def random_tu_system(rng: random.Random, n: int, m: int, family: Optional[str] = None) -> TUSystem:
    """Bounds are placed around ``A x0`` for a random 0/1 point ``x0``, so
    the system is never empty."""
    a = random_tu_matrix(rng, m, n, family) if m else []
    x0 = [rng.randint(0, 1) for _ in range(n)]
    lo, hi = [], []
    for row in a:
        v = sum(c * x for c, x in zip(row, x0))
        lo.append(rng.choice([None, v, v - 1]))
        hi.append(rng.choice([None, v, v + 1]))
    return TUSystem.build(a, lo, hi, n)


def random_delays(rng: random.Random, n: int, length: int, low: int = -5, high: int = 5,
                  weakly_convex: bool = False) -> DelayTable:
    """Nondecreasing integer rows; with ``weakly_convex`` rows are redrawn
    until they qualify."""
    rows = []
    for _ in range(n):
        while True:
            row = sorted(rng.randint(low, high) for _ in range(length))
            if not weakly_convex or is_weakly_convex(DelayTable.build([row])):
                break
        rows.append(row)
    return DelayTable.build(rows)


def random_symmetric_tu_game(rng: random.Random, max_n: int = 6, max_m: int = 4, max_players: int = 3,
                             weakly_convex: bool = False) -> GameInstance:
    n = rng.randint(1, max_n)
    m = rng.randint(0, max_m)
    players = rng.randint(1, max_players)
    system = random_tu_system(rng, n, m)
    return GameInstance.symmetric_game(system, players,
                                       random_delays(rng, n, players, weakly_convex=weakly_convex))


def random_asymmetric_tu_game(rng: random.Random, max_n: int = 6, max_m: int = 4,
                              max_players: int = 3) -> GameInstance:
    n = rng.randint(1, max_n)
    players = rng.randint(1, max_players)
    systems = tuple(random_tu_system(rng, n, rng.randint(0, max_m)) for _ in range(players))
    return GameInstance(systems, random_delays(rng, n, players))


# -- (poly)matroids ---------------------------------------------------------

def _table(size: int, func) -> list[int]:
    return [func(mask) for mask in range(1 << size)]


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def random_matroid(rng: random.Random, size: int, max_rank: int) -> PolymatroidOracle:
    """Uniform, partition or graphic matroid of rank at most ``max_rank``."""
    kind = rng.choice(["uniform", "partition", "graphic"])
    if kind == "uniform" or size == 0:
        k = rng.randint(0, min(size, max_rank))
        return PolymatroidOracle(size, _table(size, lambda s: min(k, _popcount(s))))
    if kind == "partition":
        blocks = [rng.randrange(size) for _ in range(size)]
        caps = [rng.randint(0, 2) for _ in range(size)]

        def rank(s):
            used = {}
            for j in range(size):
                if s >> j & 1:
                    used[blocks[j]] = used.get(blocks[j], 0) + 1
            return sum(min(c, caps[b]) for b, c in used.items())
    else:
        nodes = max_rank + 1
        ends = [tuple(rng.sample(range(nodes), 2)) if nodes > 1 else (0, 0) for _ in range(size)]

        def rank(s):
            parent = list(range(nodes))

            def find(a):
                while parent[a] != a:
                    a = parent[a]
                return a
            r = 0
            for j in range(size):
                if s >> j & 1:
                    a, b = find(ends[j][0]), find(ends[j][1])
                    if a != b:
                        parent[a] = b
                        r += 1
            return r
    table = _table(size, rank)
    if table[-1] > max_rank:
        cap = max_rank
        table = [min(cap, v) for v in table]
    return PolymatroidOracle(size, table)


def random_polymatroid(rng: random.Random, size: int, max_total: int) -> PolymatroidOracle:
    """Truncated weighted coverage function, or a matroid."""
    if rng.random() < 0.3:
        return random_matroid(rng, size, max_total)
    universe = rng.randint(1, 4)
    covers = [rng.getrandbits(universe) for _ in range(size)]
    weights = [rng.randint(1, 2) for _ in range(universe)]
    cap = rng.randint(0, max_total)

    def value(s):
        union = 0
        for j in range(size):
            if s >> j & 1:
                union |= covers[j]
        return min(cap, sum(w for t, w in enumerate(weights) if union >> t & 1))
    return PolymatroidOracle(size, _table(size, value))


def random_polymatroid_game(rng: random.Random, max_size: int = 5, max_total: int = 6, matroid: bool = False,
                            base: bool = False, weakly_convex: bool = False,
                            max_players: int = 3) -> GameInstance:
    """Per-player oracles with ``sum_i g_i(R) <= max_total``."""
    size = rng.randint(1, max_size)
    players = rng.randint(1, max_players)
    oracles = []
    budget = max_total
    for i in range(players):
        # leave at least one unit for each later player when the budget allows
        cap = max(budget - (players - i - 1), 0)
        share = rng.randint(min(1, cap), cap) if not base else budget // (players - i)
        g = random_matroid(rng, size, share) if matroid else random_polymatroid(rng, size, share)
        budget -= g.rank_total
        oracles.append(g)
    strategies = tuple(PolymatroidStrategy(g, base) for g in oracles)
    length = max([1] + [sum(g(1 << j) for g in oracles) for j in range(size)])
    return GameInstance(strategies, random_delays(rng, size, length, weakly_convex=weakly_convex))


# -- LPs ---------------------------------------------------------------------

def random_degenerate_lp(rng: random.Random, max_vars: int = 5, max_rows: int = 5) -> LinearProgram:
    """Small box-bounded LP with many constraints through common points."""
    n = rng.randint(1, max_vars)
    m = rng.randint(0, max_rows)
    anchor = [rng.randint(-1, 2) for _ in range(n)]
    var_lower = [min(a, rng.randint(-2, 0)) for a in anchor]
    var_upper = [max(a, rng.randint(0, 3)) for a in anchor]
    matrix, lo, hi = [], [], []
    for _ in range(m):
        row = [rng.randint(-2, 2) for _ in range(n)]
        v = sum(c * a for c, a in zip(row, anchor))
        shape = rng.random()
        if shape < 0.3:
            lo.append(v)
            hi.append(v)
        elif shape < 0.6:
            lo.append(v)
            hi.append(None)
        elif shape < 0.9:
            lo.append(None)
            hi.append(v)
        else:
            # possibly infeasible row
            lo.append(v + rng.randint(-3, 3))
            hi.append(None)
        matrix.append(row)
    objective = [rng.randint(-3, 3) for _ in range(n)]
    return LinearProgram.build(objective, matrix, lo, hi, var_lower, var_upper)
