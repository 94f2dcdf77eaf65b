import random
import warnings

import pytest
from hypothesis import given, strategies as st

from tucongestion.dynamics import verify_nash
from tucongestion.errors import PreconditionError
from tucongestion.generate import random_matroid, random_polymatroid, random_polymatroid_game
from tucongestion.model import DelayTable, GameState, is_weakly_convex, potential, social_delay
from tucongestion.oracle import (
    brute_force_min_potential,
    brute_force_min_social,
    enumerate_polymatroid_points,
)
from tucongestion.polymatroid import (
    OutsideGuaranteeWarning,
    PolymatroidOracle,
    decompose_polymatroid,
    greedy_min_separable,
    membership,
    polymatroid_game,
    potential_functions,
    solve_matroid_nash,
    solve_polymatroid_social,
    validate_oracle,
)

U12 = PolymatroidOracle.uniform_matroid(2, 1)


def test_oracle_axioms():
    assert validate_oracle(U12)
    assert not validate_oracle(PolymatroidOracle(2, [0, 0, 0, 1], check=False))
    assert validate_oracle(PolymatroidOracle(3, [0] * 8))
    assert not validate_oracle(PolymatroidOracle(1, [1, 2], check=False))
    with pytest.raises(PreconditionError):
        PolymatroidOracle(2, [0, 0, 0, 1])


def test_membership_examples():
    assert membership([U12, U12], (0, 0))
    assert membership([U12, U12], (1, 1))
    assert membership([U12, U12], (2, 0))
    assert not membership([U12, U12], (3, 0))
    assert not membership([U12, U12], (2, 1))
    g = PolymatroidOracle(3, [0, 1, 1, 2, 1, 2, 2, 2])
    assert membership([g], (1, 1, 0))


def test_greedy_examples():
    d = DelayTable.build([[-3, -1], [-2, -2]])
    f = potential_functions(d, [2, 2])
    z = greedy_min_separable([U12, U12], f)
    assert z == (1, 1)
    assert sum(f[j][v] for j, v in enumerate(z)) == -5
    assert greedy_min_separable([U12, U12], [[0, 1, 2], [0, 0, 5]]) == (0, 0)
    g = PolymatroidOracle(3, [0, 1, 1, 2, 1, 2, 2, 2])
    z = greedy_min_separable([g], [[0, -1, -2]] * 3)
    assert sum(z) == 2 and membership([g], z)
    with pytest.raises(PreconditionError):
        greedy_min_separable([U12], [[0, 2, 3], [0, 0, 0]])


def test_decompose_examples():
    assert sorted(decompose_polymatroid([U12, U12], (1, 1))) == [(0, 1), (1, 0)]
    g = PolymatroidOracle(2, [0, 2, 1, 2])
    assert decompose_polymatroid([g], (2, 0)) == [(2, 0)]
    assert decompose_polymatroid([U12, g], (0, 0)) == [(0, 0), (0, 0)]
    with pytest.raises(PreconditionError):
        decompose_polymatroid([U12, U12], (3, 0))


def test_matroid_nash_examples():
    inst = polymatroid_game([U12, U12], DelayTable.build([[-3, -1], [-2, -2]]))
    s = solve_matroid_nash(inst)
    assert s.loads == (1, 1) and potential(inst, s) == -5
    assert potential(inst, s) == brute_force_min_potential(inst)[1]
    pos = polymatroid_game([U12, U12], DelayTable.build([[1, 2], [1, 2]]))
    assert solve_matroid_nash(pos).loads == (0, 0)
    free = PolymatroidOracle.free_matroid(1)
    base = polymatroid_game([free, free], DelayTable.build([[1, 3]]), base=True)
    s = solve_matroid_nash(base)
    assert s.strategies == ((1,), (1,)) and potential(base, s) == 4


def test_polymatroid_social_examples():
    pos = polymatroid_game([U12, U12], DelayTable.build([[0, 1], [2, 2]]))
    assert social_delay(pos, solve_polymatroid_social(pos)) == 0
    neg = polymatroid_game([U12, U12], DelayTable.build([[-2, -2], [-2, -2]]))
    assert social_delay(neg, solve_polymatroid_social(neg)) == -4
    free = PolymatroidOracle.free_matroid(1)
    base = polymatroid_game([free, free], DelayTable.build([[1, 3]]), base=True)
    assert social_delay(base, solve_polymatroid_social(base)) == 6


def test_non_matroid_nash_is_flagged():
    g = PolymatroidOracle(1, [0, 2])
    inst = polymatroid_game([g], DelayTable.build([[-1, 0]]))
    with pytest.warns(OutsideGuaranteeWarning):
        solve_matroid_nash(inst)


def test_non_convex_social_rejected():
    inst = polymatroid_game([U12, U12, U12], DelayTable.build([[0, 1, 1], [0, 1, 1]]))
    with pytest.raises(PreconditionError):
        solve_polymatroid_social(inst)


def test_sum_polymatroid_points():
    pts = enumerate_polymatroid_points([U12, U12])
    assert sorted(pts) == sorted([(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)])
    assert enumerate_polymatroid_points([PolymatroidOracle(2, [0] * 4)]) == [(0, 0)]
    assert enumerate_polymatroid_points([PolymatroidOracle.free_matroid(1)]) == [(0,), (1,)]


def _oracles(rng):
    size = rng.randint(1, 5)
    budget = 6
    out = []
    for i in range(rng.randint(1, 3)):
        g = random_polymatroid(rng, size, rng.randint(0, budget))
        budget -= g.rank_total
        out.append(g)
    return out


@given(st.integers(0, 10**6))
def test_greedy_matches_exhaustive_minimum(seed):
    rng = random.Random(seed)
    oracles = _oracles(rng)
    size = oracles[0].size
    caps = [sum(g(1 << j) for g in oracles) for j in range(size)]
    functions = []
    for j in range(size):
        steps = sorted(rng.randint(-4, 4) for _ in range(caps[j]))
        f = [0]
        for s in steps:
            f.append(f[-1] + s)
        functions.append(f)
    z = greedy_min_separable(oracles, functions)
    best = min(sum(f[v] for f, v in zip(functions, p)) for p in enumerate_polymatroid_points(oracles))
    assert sum(f[v] for f, v in zip(functions, z)) == best


@given(st.integers(0, 10**6))
def test_decomposition_sound_and_tight(seed):
    rng = random.Random(seed)
    oracles = _oracles(rng)
    z = rng.choice(enumerate_polymatroid_points(oracles))
    parts = decompose_polymatroid(oracles, z)
    assert tuple(sum(c) for c in zip(*parts)) == tuple(z)
    for i, (g, x) in enumerate(zip(oracles, parts)):
        assert g.contains(x)
        rest = oracles[i + 1:]
        residual = [a - sum(p[j] for p in parts[:i + 1]) for j, a in enumerate(z)]
        for j in range(len(z)):
            bumped = list(x)
            bumped[j] += 1
            if not g.contains(bumped):
                continue
            r = list(residual)
            r[j] -= 1
            assert min(r) < 0 or (rest and not membership(rest, r)) or (not rest and any(r))


@given(st.integers(0, 10**6))
def test_matroid_nash_is_verified(seed):
    inst = random_polymatroid_game(random.Random(seed), matroid=True)
    s = solve_matroid_nash(inst)
    assert verify_nash(inst, s)
    assert potential(inst, s) == brute_force_min_potential(inst)[1]


@given(st.integers(0, 10**6))
def test_polymatroid_social_matches_brute_force(seed):
    rng = random.Random(seed)
    inst = random_polymatroid_game(rng, weakly_convex=True, base=rng.random() < 0.4)
    assert is_weakly_convex(inst.delays)
    s = solve_polymatroid_social(inst)
    assert social_delay(inst, s) == brute_force_min_social(inst)[1]


def test_random_matroids_have_unit_increments():
    rng = random.Random(2)
    for _ in range(50):
        assert random_matroid(rng, rng.randint(1, 5), rng.randint(0, 3)).is_matroid
