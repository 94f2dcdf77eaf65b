import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tucongestion.errors import SizeCapError
from tucongestion.frontends import GraphSpec, matching_game
from tucongestion.generate import digraph_incidence, random_tu_matrix
from tucongestion.model import DelayTable, GameInstance, TUSystem
from tucongestion.numeric import determinant
from tucongestion.oracle import all_sign_matrices, tu_by_determinants
from tucongestion.tu import (
    check_instance_tu,
    find_violating_submatrix,
    is_totally_unimodular,
    tu_batch,
)

TRIANGLE = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]


def test_digraph_incidence_is_tu():
    rng = random.Random(0)
    for nodes in range(2, 7):
        for arcs in range(1, 8):
            assert is_totally_unimodular(digraph_incidence(rng, nodes, arcs))


def test_small_non_tu_examples():
    assert not is_totally_unimodular([[1, 1], [-1, 1]])
    assert not is_totally_unimodular(TRIANGLE)
    assert not is_totally_unimodular([[2]])
    assert is_totally_unimodular([])
    assert is_totally_unimodular([[1, 0, 1]])


def test_violating_submatrix_has_bad_determinant():
    rows, cols = find_violating_submatrix(TRIANGLE)
    assert abs(determinant([[TRIANGLE[r][c] for c in cols] for r in rows])) > 1
    assert find_violating_submatrix([[1, 0], [0, 1]]) is None
    wide = [[1, 1, 0, 0], [-1, 1, 0, 0]]
    rows, cols = find_violating_submatrix([list(c) for c in zip(*wide)])
    assert len(rows) == len(cols) == 2


def test_size_cap():
    big = [[0] * 21 for _ in range(21)]
    with pytest.raises(SizeCapError):
        is_totally_unimodular(big)
    assert is_totally_unimodular([[0] * 21 for _ in range(3)])


def test_scalar_and_batch_agree_with_determinants_up_to_3x3():
    for m in range(1, 4):
        for n in range(1, 4):
            mats = all_sign_matrices(m, n)
            expected = tu_by_determinants(mats)
            assert np.array_equal(tu_batch(mats), expected)
    mats = all_sign_matrices(3, 3)
    sample = np.random.default_rng(1).choice(len(mats), 400, replace=False)
    for k in sample:
        assert is_totally_unimodular(mats[k].tolist()) == bool(tu_by_determinants(mats[k:k + 1])[0])


def test_batch_rejects_entries_outside_range():
    assert not tu_batch(np.array([[[2, 0], [0, 1]]]))[0]
    assert not tu_by_determinants(np.array([[[2, 0], [0, 1]]]))[0]


@given(st.integers(0, 10**6), st.integers(1, 5), st.integers(1, 5))
def test_tu_closure_under_identity_and_duplicate_rows(seed, m, n):
    rng = random.Random(seed)
    a = random_tu_matrix(rng, m, n)
    assert is_totally_unimodular(a)
    with_identity = a + [[int(i == j) for j in range(n)] for i in range(n)]
    assert is_totally_unimodular(with_identity)
    assert is_totally_unimodular(a + [a[rng.randrange(m)]])
    assert is_totally_unimodular([row + [int(r == 0)] for r, row in enumerate(a)])


def test_instance_reports():
    g = GraphSpec((0, 1, 2, 3), ((0, 1), (1, 2), (2, 3)))
    report = check_instance_tu(matching_game(g, [None, None], DelayTable.uniform(3, [0, 0])))
    assert all(r.totally_unimodular and r.integral_bounds for r in report)
    odd = TUSystem.build(TRIANGLE, [None] * 3, [1] * 3, 3)
    inst = GameInstance((TUSystem.free(3), odd), DelayTable.uniform(3, [0, 0]))
    report = check_instance_tu(inst)
    assert [r.totally_unimodular for r in report] == [True, False]
    assert report[1].violating_submatrix is not None
    assert check_instance_tu(GameInstance((), DelayTable.uniform(1, [0]))) == []
