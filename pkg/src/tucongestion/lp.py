"""Exact bounded-variable primal simplex.

The solver works on

    minimize    c x
    subject to  row_lower <= A x <= row_upper
                var_lower <=  x  <= var_upper

with every bound either a number or ``None`` (absent). Rows are turned into
equalities ``A x - s = 0`` with a bounded slack ``s`` per row, and the
tableau is kept in ``Fraction``. Bland's rule (lowest index entering, lowest
index leaving among ratio ties) makes every run terminate and every run
reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from tucongestion.numeric import check_matrix

Bound = Optional[Fraction]


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def _bound(value) -> Bound:
    if value is None:
        return None
    if isinstance(value, float):
        raise TypeError("LP data must be exact (int or Fraction)")
    return Fraction(value)


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple
    matrix: tuple
    row_lower: tuple
    row_upper: tuple
    var_lower: tuple
    var_upper: tuple

    def __post_init__(self):
        n = len(self.objective)
        m, _ = check_matrix(self.matrix, n)
        if m and len(self.matrix[0]) != n:
            raise ValueError("matrix width does not match objective length")
        if len(self.row_lower) != m or len(self.row_upper) != m:
            raise ValueError("row bounds must have one entry per matrix row")
        if len(self.var_lower) != n or len(self.var_upper) != n:
            raise ValueError("variable bounds must have one entry per variable")
        for kind, lows, ups in (("row", self.row_lower, self.row_upper),
                                ("variable", self.var_lower, self.var_upper)):
            for k, (lo, hi) in enumerate(zip(lows, ups)):
                if lo is not None and hi is not None and _bound(lo) > _bound(hi):
                    raise ValueError(f"{kind} {k} has lower bound {lo} above upper bound {hi}")

    @classmethod
    def build(cls, objective, matrix, row_lower, row_upper, var_lower, var_upper):
        """Normalize sequences into the immutable, exact representation."""
        return cls(
            objective=tuple(Fraction(c) for c in objective),
            matrix=tuple(tuple(Fraction(a) for a in row) for row in matrix),
            row_lower=tuple(_bound(b) for b in row_lower),
            row_upper=tuple(_bound(b) for b in row_upper),
            var_lower=tuple(_bound(b) for b in var_lower),
            var_upper=tuple(_bound(b) for b in var_upper),
        )

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    @property
    def num_rows(self) -> int:
        return len(self.matrix)


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    solution: Optional[tuple] = None
    value: Optional[Fraction] = None

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Unbounded(Exception):
    pass


class _Tableau:
    def __init__(self, lp: LinearProgram, start: Optional[Sequence] = None):
        self.n = n = lp.num_vars
        rows = [r for r in range(lp.num_rows)
                if lp.row_lower[r] is not None or lp.row_upper[r] is not None]
        self.m = m = len(rows)
        self.lower: list[Bound] = list(lp.var_lower)
        self.upper: list[Bound] = list(lp.var_upper)
        self.x: list[Fraction] = []
        for j in range(n):
            lo, hi = self.lower[j], self.upper[j]
            if start is not None and start[j] in (lo, hi):
                self.x.append(Fraction(start[j]))
            else:
                self.x.append(lo if lo is not None else hi if hi is not None else Fraction(0))

        # Slack s_r = A_r x carries the row bounds.
        for r in rows:
            self.lower.append(lp.row_lower[r])
            self.upper.append(lp.row_upper[r])
        self.barred: set[int] = set()
        self.artificials: list[int] = []
        self.basis: list[int] = []
        self.T: list[list[Fraction]] = []
        pending = []
        for i, r in enumerate(rows):
            a = lp.matrix[r]
            v = sum((a[j] * self.x[j] for j in range(n)), Fraction(0))
            lo, hi = lp.row_lower[r], lp.row_upper[r]
            row = list(a) + [Fraction(0)] * m
            row[n + i] = Fraction(-1)
            if (lo is None or v >= lo) and (hi is None or v <= hi):
                self.x.append(v)
                self.basis.append(n + i)
                self.T.append([-c for c in row])
            else:
                beta = lo if lo is not None and v < lo else hi
                self.x.append(beta)
                pending.append((i, row, beta - v))
                self.basis.append(None)
                self.T.append(row)
        width = n + m + len(pending)
        for row in self.T:
            row.extend([Fraction(0)] * (width - len(row)))
        for t, (i, row, gap) in enumerate(pending):
            k = n + m + t
            sigma = 1 if gap > 0 else -1
            self.T[i][k] = Fraction(sigma)
            self.basis[i] = k
            if sigma < 0:
                self.T[i] = [-c for c in self.T[i]]
            self.lower.append(Fraction(0))
            self.upper.append(None)
            self.x.append(abs(gap))
            self.artificials.append(k)
        self.width = width
        self.cost = [Fraction(0)] * width
        self.d = [Fraction(0)] * width

    def set_cost(self, cost: Sequence[Fraction]) -> None:
        self.cost = list(cost) + [Fraction(0)] * (self.width - len(cost))
        d = list(self.cost)
        for r, b in enumerate(self.basis):
            cb = self.cost[b]
            if cb:
                row = self.T[r]
                for k in range(self.width):
                    if row[k]:
                        d[k] -= cb * row[k]
        self.d = d

    def objective(self) -> Fraction:
        return sum((c * v for c, v in zip(self.cost, self.x)), Fraction(0))

    def _pivot(self, r: int, q: int) -> None:
        row = self.T[r]
        piv = row[q]
        if piv != 1:
            row = [c / piv for c in row]
            self.T[r] = row
        nz = [k for k in range(self.width) if row[k]]
        for i, other in enumerate(self.T):
            if i != r:
                f = other[q]
                if f:
                    for k in nz:
                        other[k] -= f * row[k]
        f = self.d[q]
        if f:
            for k in nz:
                self.d[k] -= f * row[k]
        self.basis[r] = q

    def _ratio(self, q: int, direction: int, allow_flip: bool = True):
        """Largest step for x_q in ``direction``; returns (theta, row or None)."""
        best = None
        best_key = None
        if allow_flip:
            bound = self.upper[q] if direction > 0 else self.lower[q]
            if bound is not None:
                best = abs(bound - self.x[q])
                best_key = (best, q, None)
        for i, b in enumerate(self.basis):
            rate = -self.T[i][q] * direction
            if rate > 0 and self.upper[b] is not None:
                lim = (self.upper[b] - self.x[b]) / rate
            elif rate < 0 and self.lower[b] is not None:
                lim = (self.x[b] - self.lower[b]) / -rate
            else:
                continue
            key = (lim, b, i)
            if best_key is None or key[:2] < best_key[:2]:
                best_key = key
        if best_key is None:
            raise _Unbounded
        return best_key[0], best_key[2]

    def _step(self, q: int, direction: int, theta: Fraction, row) -> None:
        if theta:
            delta = theta * direction
            self.x[q] += delta
            for i, b in enumerate(self.basis):
                if self.T[i][q]:
                    self.x[b] -= self.T[i][q] * delta
        if row is None:
            # Bound flip: snap exactly onto the bound.
            self.x[q] = self.upper[q] if direction > 0 else self.lower[q]
            return
        leaving = self.basis[row]
        rate = -self.T[row][q] * direction
        self.x[leaving] = self.upper[leaving] if rate > 0 else self.lower[leaving]
        self._pivot(row, q)

    def _entering(self):
        basic = set(self.basis)
        for k in range(self.width):
            if k in basic or k in self.barred:
                continue
            dk = self.d[k]
            if dk < 0 and (self.upper[k] is None or self.x[k] < self.upper[k]):
                return k, 1
            if dk > 0 and (self.lower[k] is None or self.x[k] > self.lower[k]):
                return k, -1
        return None

    def optimize(self) -> None:
        while True:
            choice = self._entering()
            if choice is None:
                return
            q, direction = choice
            theta, row = self._ratio(q, direction)
            self._step(q, direction, theta, row)

    def retire_artificials(self) -> None:
        """Drive zero-valued artificials out of the basis and freeze them at 0."""
        art = set(self.artificials)
        for r, b in enumerate(self.basis):
            if b in art:
                basic = set(self.basis)
                for k in range(self.n + self.m):
                    if k not in basic and self.T[r][k] != 0:
                        self._pivot(r, k)
                        break
        for k in self.artificials:
            self.upper[k] = Fraction(0)
            self.barred.add(k)

    def crossover_free(self) -> None:
        """Move nonbasic free variables into the basis so the point is a vertex."""
        basic = set(self.basis)
        for k in range(self.n + self.m):
            if k in basic or self.lower[k] is not None or self.upper[k] is not None:
                continue
            if self.d[k] != 0:
                continue
            for direction in (1, -1):
                try:
                    theta, row = self._ratio(k, direction, allow_flip=False)
                except _Unbounded:
                    continue
                self._step(k, direction, theta, row)
                basic = set(self.basis)
                break


def _phase_one(lp: LinearProgram, start: Optional[Sequence] = None) -> _Tableau | None:
    tab = _Tableau(lp, start)
    if tab.artificials:
        cost = [Fraction(0)] * tab.width
        for k in tab.artificials:
            cost[k] = Fraction(1)
        tab.set_cost(cost)
        tab.optimize()
        if tab.objective() != 0:
            return None
        tab.retire_artificials()
    return tab


def _presolve(lp: LinearProgram):
    """Fold singleton rows into variable bounds, drop empty rows and
    substitute fixed variables. The feasible set is unchanged, so vertices
    of the reduced problem extend to vertices of the original one.

    Returns ``(reduced, fixed, keep)`` with ``fixed`` mapping eliminated
    columns to their values and ``keep`` listing the surviving columns, or
    None when the presolve already proves infeasibility.
    """
    lower, upper = list(lp.var_lower), list(lp.var_upper)
    rows = [(list(r), lo, hi) for r, lo, hi in zip(lp.matrix, lp.row_lower, lp.row_upper)]
    fixed: dict[int, Fraction] = {}
    while True:
        kept = []
        for row, lo, hi in rows:
            shift = sum((row[j] * v for j, v in fixed.items() if row[j]), Fraction(0))
            if shift:
                lo = None if lo is None else lo - shift
                hi = None if hi is None else hi - shift
            for j in fixed:
                row[j] = Fraction(0)
            support = [j for j, a in enumerate(row) if a]
            if not support:
                if (lo is not None and lo > 0) or (hi is not None and hi < 0):
                    return None
            elif len(support) == 1:
                j = support[0]
                a = row[j]
                b_lo, b_hi = (lo, hi) if a > 0 else (hi, lo)
                if b_lo is not None:
                    lower[j] = b_lo / a if lower[j] is None else max(lower[j], b_lo / a)
                if b_hi is not None:
                    upper[j] = b_hi / a if upper[j] is None else min(upper[j], b_hi / a)
            else:
                kept.append((row, lo, hi))
        rows = kept
        progress = False
        for j in range(lp.num_vars):
            if lower[j] is not None and upper[j] is not None:
                if lower[j] > upper[j]:
                    return None
                if lower[j] == upper[j] and j not in fixed:
                    fixed[j] = lower[j]
                    progress = True
        if not progress:
            break
    keep = [j for j in range(lp.num_vars) if j not in fixed]
    reduced = LinearProgram(
        objective=tuple(lp.objective[j] for j in keep),
        matrix=tuple(tuple(row[j] for j in keep) for row, _, _ in rows),
        row_lower=tuple(lo for _, lo, _ in rows),
        row_upper=tuple(hi for _, _, hi in rows),
        var_lower=tuple(lower[j] for j in keep),
        var_upper=tuple(upper[j] for j in keep),
    )
    return reduced, fixed, keep


def _expand(lp: LinearProgram, fixed: dict, keep: Sequence[int], y: Sequence) -> tuple:
    x = [Fraction(0)] * lp.num_vars
    for j, v in fixed.items():
        x[j] = v
    for j, v in zip(keep, y):
        x[j] = v
    return tuple(x)


def _run(lp: LinearProgram, optimize: bool, start: Optional[Sequence] = None) -> LpOutcome:
    pre = _presolve(lp)
    if pre is None:
        return LpOutcome(LpStatus.INFEASIBLE)
    reduced, fixed, keep = pre
    if start is not None:
        if len(start) != lp.num_vars:
            raise ValueError("start point has the wrong length")
        start = [Fraction(start[j]) for j in keep]
    tab = _phase_one(reduced, start)
    if tab is None:
        return LpOutcome(LpStatus.INFEASIBLE)
    if optimize:
        tab.set_cost(reduced.objective)
        try:
            tab.optimize()
        except _Unbounded:
            return LpOutcome(LpStatus.UNBOUNDED)
    else:
        tab.set_cost([Fraction(0)] * tab.width)
    tab.crossover_free()
    x = _expand(lp, fixed, keep, tab.x[: reduced.num_vars])
    value = sum((c * v for c, v in zip(lp.objective, x)), Fraction(0))
    return LpOutcome(LpStatus.OPTIMAL, x, value)


def solve_lp(lp: LinearProgram, start: Optional[Sequence] = None) -> LpOutcome:
    """Minimize ``lp.objective``; an optimal answer is always a basic solution.

    ``start`` is an optional warm start. Coordinates sitting on one of their
    variable bounds begin nonbasic there; when the point is feasible this
    skips phase one. Any point is accepted; the answer does not depend on
    its feasibility.
    """
    return _run(lp, True, start)


def find_vertex(lp: LinearProgram) -> LpOutcome:
    """Return some vertex of the feasible region (phase one only).

    The objective is ignored for the search; ``value`` reports it at the
    returned point.
    """
    return _run(lp, False)


def tight_constraints(lp: LinearProgram, x: Sequence) -> list[tuple]:
    """Rows of the constraint system that hold with equality at ``x``."""
    n = lp.num_vars
    tight = []
    for j in range(n):
        if x[j] == lp.var_lower[j] or x[j] == lp.var_upper[j]:
            tight.append(tuple(Fraction(int(k == j)) for k in range(n)))
    for r, row in enumerate(lp.matrix):
        v = sum((a * xi for a, xi in zip(row, x)), Fraction(0))
        if v == lp.row_lower[r] or v == lp.row_upper[r]:
            tight.append(tuple(row))
    return tight


def is_feasible_point(lp: LinearProgram, x: Sequence) -> bool:
    for j in range(lp.num_vars):
        if lp.var_lower[j] is not None and x[j] < lp.var_lower[j]:
            return False
        if lp.var_upper[j] is not None and x[j] > lp.var_upper[j]:
            return False
    for r, row in enumerate(lp.matrix):
        v = sum((a * xi for a, xi in zip(row, x)), Fraction(0))
        if lp.row_lower[r] is not None and v < lp.row_lower[r]:
            return False
        if lp.row_upper[r] is not None and v > lp.row_upper[r]:
            return False
    return True
