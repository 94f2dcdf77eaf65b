"""Exact rational and integer linear algebra.

``Rational`` is :class:`fractions.Fraction`: arbitrary precision, always in
lowest terms with a positive denominator, zero stored as ``0/1``. Vectors and
matrices are plain tuples/lists of ``int`` or ``Rational``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


def as_rational(value) -> Fraction:
    """Convert ints, Fractions or ``"p/q"`` strings to a Rational.

    Floats are refused: every quantity in this package is exact.
    """
    if isinstance(value, float):
        raise TypeError("floating-point values are not accepted; use int, Fraction or 'p/q'")
    return Fraction(value)


def render_rational(value) -> str:
    """Render as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    q = Fraction(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def is_integral(vector: Iterable) -> bool:
    """True iff every component has denominator 1 (vacuously true when empty)."""
    return all(Fraction(v).denominator == 1 for v in vector)


def to_int_vector(vector: Iterable) -> tuple[int, ...]:
    out = []
    for v in vector:
        q = Fraction(v)
        if q.denominator != 1:
            raise ValueError(f"component {q} is not integral")
        out.append(q.numerator)
    return tuple(out)


def check_matrix(matrix: Sequence[Sequence], cols: int | None = None) -> tuple[int, int]:
    """Return ``(rows, cols)`` after checking all rows have the same length."""
    rows = len(matrix)
    if rows == 0:
        return 0, cols or 0
    width = len(matrix[0])
    if cols is not None and width != cols:
        raise ValueError(f"matrix has {width} columns, expected {cols}")
    for r, row in enumerate(matrix):
        if len(row) != width:
            raise ValueError(f"row {r} has length {len(row)}, expected {width}")
    return rows, width


def determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Integer determinant by Bareiss fraction-free elimination."""
    n = len(matrix)
    if n == 0:
        return 1
    a = [list(map(int, row)) for row in matrix]
    if any(len(row) != n for row in a):
        raise ValueError("determinant needs a square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rank(matrix: Sequence[Sequence]) -> int:
    """Exact rank over the rationals."""
    a = [[Fraction(v) for v in row] for row in matrix]
    if not a:
        return 0
    rows, cols = len(a), len(a[0])
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        for i in range(r + 1, rows):
            if a[i][c] != 0:
                f = a[i][c] / a[r][c]
                for j in range(c, cols):
                    a[i][j] -= f * a[r][j]
        r += 1
        if r == rows:
            break
    return r


def solve_square(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """Solve ``matrix @ x = rhs`` exactly; None if the matrix is singular."""
    n = len(matrix)
    a = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for c in range(n):
        pivot = next((i for i in range(c, n) if a[i][c] != 0), None)
        if pivot is None:
            return None
        a[c], a[pivot] = a[pivot], a[c]
        inv = 1 / a[c][c]
        a[c] = [v * inv for v in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [vi - f * vc for vi, vc in zip(a[i], a[c])]
    return [a[i][n] for i in range(n)]


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), 0)


def mat_vec(matrix: Sequence[Sequence], v: Sequence) -> list:
    return [dot(row, v) for row in matrix]
