"""Total unimodularity checks via the Ghouila-Houri characterization.

A {-1,0,1} matrix is TU iff every subset of its rows can be signed with +-1
so that every signed column sum lies in {-1, 0, 1}. The test is exponential
in the smaller dimension, hence the hard cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from tucongestion.errors import SizeCapError
from tucongestion.model import GameInstance, TUSystem
from tucongestion.numeric import check_matrix, determinant

MAX_TU_SIDE = 20


def _oriented(a: Sequence[Sequence[int]]) -> list[list[int]]:
    """Return ``a`` or its transpose, whichever has fewer rows."""
    m, n = check_matrix(a)
    rows = [list(r) for r in a]
    if m > n:
        rows = [list(col) for col in zip(*rows)] if m else []
    return rows


def _signable(rows: list[list[int]]) -> bool:
    """Backtracking search for an equitable signing of ``rows``."""
    n = len(rows[0]) if rows else 0
    k = len(rows)
    # remaining[t][c]: sum of |entries| in column c over rows t..k-1
    remaining = [[0] * n for _ in range(k + 1)]
    for t in range(k - 1, -1, -1):
        remaining[t] = [remaining[t + 1][c] + abs(rows[t][c]) for c in range(n)]
    sums = [0] * n

    def extend(t: int) -> bool:
        if t == k:
            return True
        signs = (1,) if t == 0 else (1, -1)
        for s in signs:
            row = rows[t]
            ok = True
            for c in range(n):
                sums[c] += s * row[c]
            for c in range(n):
                if abs(sums[c]) > 1 + remaining[t + 1][c]:
                    ok = False
                    break
            if ok and extend(t + 1):
                return True
            for c in range(n):
                sums[c] -= s * row[c]
        return False

    return extend(0)


def _first_unsignable(rows: list[list[int]]) -> Optional[tuple[int, ...]]:
    m = len(rows)
    for size in range(1, m + 1):
        for subset in combinations(range(m), size):
            if not _signable([rows[r] for r in subset]):
                return subset
    return None


def is_totally_unimodular(a: Sequence[Sequence[int]]) -> bool:
    """Exact TU test; raises :class:`SizeCapError` when min(rows, cols) > 20."""
    m, n = check_matrix(a)
    if min(m, n) > MAX_TU_SIDE:
        raise SizeCapError(f"TU check is capped at min(rows, cols) <= {MAX_TU_SIDE}, got {min(m, n)}")
    if any(v not in (-1, 0, 1) for row in a for v in row):
        return False
    if min(m, n) == 0:
        return True
    return _first_unsignable(_oriented(a)) is None


def find_violating_submatrix(a: Sequence[Sequence[int]]) -> Optional[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Row and column indices of a square submatrix with determinant outside
    {-1, 0, 1}, or None when ``a`` is TU."""
    m, n = check_matrix(a)
    for r in range(m):
        for c in range(n):
            if a[r][c] not in (-1, 0, 1):
                return (r,), (c,)
    if min(m, n) > MAX_TU_SIDE:
        raise SizeCapError(f"TU check is capped at min(rows, cols) <= {MAX_TU_SIDE}")
    transposed = m > n
    rows = _oriented(a)
    bad = _first_unsignable(rows) if rows else None
    if bad is None:
        return None
    width = len(rows[0])
    # Rows of the failing subset already span a non-TU submatrix.
    for size in range(2, len(bad) + 1):
        for rs in combinations(bad, size):
            for cs in combinations(range(width), size):
                if determinant([[rows[r][c] for c in cs] for r in rs]) not in (-1, 0, 1):
                    return (cs, rs) if transposed else (rs, cs)
    raise AssertionError("Ghouila-Houri failure without a violating submatrix")


def tu_batch(mats: np.ndarray) -> np.ndarray:
    """Vectorized Ghouila-Houri test for a batch of equally shaped matrices.

    ``mats`` has shape ``(B, m, n)``; returns a boolean array of length B.
    """
    mats = np.asarray(mats)
    if mats.ndim != 3:
        raise ValueError("expected an array of shape (B, m, n)")
    b, m, n = mats.shape
    if m > n:
        mats = mats.transpose(0, 2, 1)
        m, n = n, m
    if m > MAX_TU_SIDE:
        raise SizeCapError(f"TU check is capped at min(rows, cols) <= {MAX_TU_SIDE}")
    mats = mats.astype(np.int8)
    ok = np.all((mats >= -1) & (mats <= 1), axis=(1, 2))
    alive = np.flatnonzero(ok)
    for size in range(1, m + 1):
        count = 1 << (size - 1)
        signs = np.array([[1] + [-1 if (s >> t) & 1 else 1 for t in range(size - 1)]
                          for s in range(count)], dtype=np.int8)
        for subset in combinations(range(m), size):
            if alive.size == 0:
                return ok
            sub = mats[alive][:, list(subset), :]
            sums = np.einsum("sk,bkn->bsn", signs, sub)
            passed = np.any(np.all(np.abs(sums) <= 1, axis=2), axis=1)
            ok[alive[~passed]] = False
            alive = alive[passed]
    return ok


@dataclass(frozen=True)
class PlayerTUReport:
    player: int
    kind: str
    totally_unimodular: Optional[bool]
    integral_bounds: bool
    violating_submatrix: Optional[tuple] = None


def check_instance_tu(inst: GameInstance) -> list[PlayerTUReport]:
    """Per-player TU verdicts; identical systems are checked once."""
    cache: dict[TUSystem, PlayerTUReport] = {}
    report = []
    for i, desc in enumerate(inst.strategies):
        if not isinstance(desc, TUSystem):
            report.append(PlayerTUReport(i, "polymatroid", None, True))
            continue
        if desc not in cache:
            integral = all(isinstance(b, int) for b in desc.row_lower + desc.row_upper if b is not None)
            witness = find_violating_submatrix(desc.matrix) if desc.matrix else None
            cache[desc] = PlayerTUReport(i, "tu", witness is None, integral, witness)
        r = cache[desc]
        report.append(PlayerTUReport(i, "tu", r.totally_unimodular, r.integral_bounds,
                                     r.violating_submatrix))
    return report
