from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tucongestion.numeric import (
    as_rational,
    check_matrix,
    determinant,
    is_integral,
    mat_vec,
    rank,
    render_rational,
    solve_square,
    to_int_vector,
)

rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 10**6)


def test_fraction_arithmetic_is_exact_and_canonical():
    assert Fraction(1, 2) + Fraction(1, 3) == Fraction(5, 6)
    q = Fraction(2, 4)
    assert (q.numerator, q.denominator) == (1, 2)
    q = Fraction(-3, -6)
    assert (q.numerator, q.denominator) == (1, 2)
    assert Fraction(0, 7).denominator == 1


def test_division_by_zero_raises():
    with pytest.raises(ZeroDivisionError):
        Fraction(1) / Fraction(0)


@given(rationals, rationals, rationals)
def test_field_laws_hold_exactly(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c


def test_as_rational_rejects_floats():
    assert as_rational("3/6") == Fraction(1, 2)
    assert as_rational(4) == 4
    with pytest.raises(TypeError):
        as_rational(0.5)


def test_render():
    assert render_rational(Fraction(5, 6)) == "5/6"
    assert render_rational(Fraction(4, 2)) == "2"
    assert render_rational(Fraction(-1, 3)) == "-1/3"


def test_is_integral():
    assert is_integral([1, 0, 2])
    assert not is_integral([Fraction(1, 2), 1])
    assert is_integral([])
    assert to_int_vector([Fraction(4, 2), 0]) == (2, 0)
    with pytest.raises(ValueError):
        to_int_vector([Fraction(1, 3)])


def test_determinant_and_rank():
    assert determinant([[1, 1], [-1, 1]]) == 2
    assert determinant([]) == 1
    assert determinant([[0, 1], [1, 0]]) == -1
    assert determinant([[1, 1, 0], [0, 1, 1], [1, 0, 1]]) == 2
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank([[1, 0], [0, 1], [1, 1]]) == 2


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=3, max_size=3))
def test_determinant_matches_permutation_expansion(m):
    from itertools import permutations

    def sign(p):
        s = 1
        for i in range(len(p)):
            for j in range(i + 1, len(p)):
                if p[i] > p[j]:
                    s = -s
        return s
    expected = sum(sign(p) * m[0][p[0]] * m[1][p[1]] * m[2][p[2]] for p in permutations(range(3)))
    assert determinant(m) == expected


def test_solve_square():
    x = solve_square([[2, 1], [1, 3]], [3, 5])
    assert x == [Fraction(4, 5), Fraction(7, 5)]
    assert mat_vec([[2, 1], [1, 3]], x) == [3, 5]
    assert solve_square([[1, 2], [2, 4]], [1, 2]) is None


def test_check_matrix_rejects_ragged():
    assert check_matrix([[1, 2], [3, 4]]) == (2, 2)
    with pytest.raises(ValueError):
        check_matrix([[1, 2], [3]])
