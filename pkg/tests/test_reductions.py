import random
import warnings
from itertools import product

import networkx as nx
import pytest

from tucongestion.dynamics import verify_nash
from tucongestion.errors import PreconditionError
from tucongestion.model import is_weakly_convex, player_cost
from tucongestion.oracle import brute_force_min_social, enumerate_strategies
from tucongestion.reductions import (
    Clause,
    SatInstance,
    map_assignment_state,
    map_state_assignment,
    nae2sat_to_pm,
    nae2sat_to_pvc,
    nae3sat_to_pm_social,
    nae_satisfied,
    parse_sat,
    sat_value,
)


def _edge_delay(art, a, b):
    for k, e in enumerate(art.graph.edges):
        if set(e) == {a, b}:
            return art.instance.delays.values[k]
    raise KeyError((a, b))


def _node_delay(art, v):
    return art.instance.delays.values[art.graph.node_index(v)]


def random_sat(rng, max_vars=8, max_clauses=6):
    n = rng.randint(2, max_vars)
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        if rng.random() < 0.7:
            clauses.append(Clause(tuple(rng.sample(range(n), 2)), (), rng.randint(1, 5)))
        else:
            clauses.append(Clause((rng.randrange(n),), (rng.randint(0, 1),), rng.randint(1, 5)))
    return SatInstance(n, tuple(clauses))


def test_parse_and_render_round_trip():
    sat = parse_sat("# demo\nvars 3\n2 : 1 2\n3 : 3 T\n1 : 2 F\n")
    assert sat.num_vars == 3
    assert sat.clauses[1] == Clause((2,), (1,), 3)
    assert parse_sat(sat.render()) == sat


@pytest.mark.parametrize("text", ["", "1 : 1 1", "0 : 1 2", "1 : x", "1 : 1 2 3 4", "vars 1\n1 : 1 2", "1 : T F"])
def test_parse_rejects(text):
    with pytest.raises(PreconditionError):
        parse_sat(text)


def test_sat_value():
    sat = parse_sat("2 : 1 2\n3 : 2 T\n")
    assert sat_value(sat, [0, 1]) == 2
    assert sat_value(sat, [0, 0]) == 3
    assert sat_value(sat, [1, 1]) == 0
    assert nae_satisfied(Clause((0, 1, 2)), [0, 0, 1])
    with pytest.raises(PreconditionError):
        sat_value(sat, [0])


def test_pm_single_two_variable_clause():
    art = nae2sat_to_pm(parse_sat("1 : 1 2"))
    assert len(art.graph.edges) == 4
    assert _edge_delay(art, "v1", "u1") == (0, 1)
    assert len(art.graph.nodes) == 3


def test_pm_clause_with_constant_one():
    art = nae2sat_to_pm(parse_sat("vars 2\n3 : 1 T\n1 : 1 2"))
    assert _edge_delay(art, "v1", "u1") == (0, 0)
    assert _edge_delay(art, "v1", "u2") == (3, 3)
    assert _edge_delay(art, "vbar1", "u1") == (0, 0)


def test_pm_graph_is_bipartite_with_spine_class():
    sat = random_sat(random.Random(3), 6, 5)
    art = nae2sat_to_pm(sat)
    n = len(sat.clauses)
    spine = {f"u{j + 1}" for j in range(n)}
    for a, b in art.graph.edges:
        assert (a in spine) != (b in spine)
    assert art.graph.is_bipartite()


def test_pvc_single_clause():
    art = nae2sat_to_pvc(parse_sat("2 : 1 2"))
    assert len(art.graph.edges) == 8
    assert _node_delay(art, "s1") == (0, 2)
    assert _node_delay(art, "v1") == (0, 2)
    for v in art.graph.nodes:
        if v not in ("s1", "v1"):
            assert _node_delay(art, v) == (0, 0)


def test_pvc_constant_zero():
    art = nae2sat_to_pvc(parse_sat("vars 2\n4 : 1 F\n1 : 1 2"))
    assert _node_delay(art, "v1") == (0, 0)
    assert _node_delay(art, "s1") == (4, 4)


def test_social_reduction_delays():
    sat = SatInstance(4, (Clause((0, 1, 2)), Clause((1, 2, 3))))
    art = nae3sat_to_pm_social(sat)
    assert _edge_delay(art, "v1", "u1") == (0, 0, 1, 2)
    assert _edge_delay(art, "v1", "u2") == (0, 0, 1, 2)
    assert _edge_delay(art, "vbar1", "u1") == (0, 0, 0, 0)
    assert is_weakly_convex(art.instance.delays)
    with pytest.raises(PreconditionError):
        nae3sat_to_pm_social(parse_sat("1 : 1 2"))
    with pytest.warns(UserWarning):
        nae3sat_to_pm_social(SatInstance(3, (Clause((0, 1, 2), (), 2),)))


def test_local_search_gadgets_reject_three_variables():
    sat = SatInstance(3, (Clause((0, 1, 2)),))
    with pytest.raises(PreconditionError):
        nae2sat_to_pm(sat)
    with pytest.raises(PreconditionError):
        nae2sat_to_pvc(sat)


@pytest.mark.parametrize("build,factor", [(nae2sat_to_pm, 2), (nae2sat_to_pvc, 4)])
def test_player_subgraphs_are_cycles_with_two_strategies(build, factor):
    rng = random.Random(11)
    for _ in range(6):
        # 7 nodes per clause in the cover gadget; stay under the enumeration cap
        sat = random_sat(rng, 4, 3 if build is nae2sat_to_pm else 2)
        art = build(sat)
        n = len(sat.clauses)
        for i, system in enumerate(art.instance.strategies):
            assert sorted(enumerate_strategies(system)) == sorted(art.labels[i])
            used = set()
            for x in art.labels[i]:
                used |= {k for k, v in enumerate(x) if v}
            if build is nae2sat_to_pm:
                edges = [art.graph.edges[k] for k in used]
            else:
                own = {art.graph.nodes[k] for k in used}
                edges = [e for e in art.graph.edges if set(e) <= own]
            h = nx.MultiGraph(edges)
            assert h.number_of_nodes() == factor * n
            if factor * n > 2:
                assert all(d == 2 for _, d in h.degree())
                assert nx.is_connected(h)


@pytest.mark.parametrize("build", [nae2sat_to_pm, nae2sat_to_pvc])
def test_assignment_map_round_trip(build):
    sat = random_sat(random.Random(5), 5, 4)
    art = build(sat)
    for bits in product((0, 1), repeat=sat.num_vars):
        assert map_state_assignment(art, map_assignment_state(art, bits)) == bits
    with pytest.raises(PreconditionError):
        map_assignment_state(art, [2] * sat.num_vars)


@pytest.mark.parametrize("build", [nae2sat_to_pm, nae2sat_to_pvc])
def test_flip_identity_and_nash_local_optima(build):
    rng = random.Random(19)
    for _ in range(4):
        sat = random_sat(rng, 4, 4)
        art = build(sat)
        for bits in product((0, 1), repeat=sat.num_vars):
            state = map_assignment_state(art, bits)
            w = sat_value(sat, bits)
            improvable = False
            for i in range(sat.num_vars):
                flipped = list(bits)
                flipped[i] ^= 1
                other = map_assignment_state(art, flipped)
                w2 = sat_value(sat, flipped)
                assert w - w2 == player_cost(art.instance, other, i) - player_cost(art.instance, state, i)
                improvable |= w2 > w
            assert bool(verify_nash(art.instance, state)) == (not improvable)


def test_social_reduction_equivalence_small():
    sats = [SatInstance(3, (Clause((0, 1, 2)),)),
            SatInstance(4, (Clause((0, 1, 2)), Clause((0, 1, 3)), Clause((0, 2, 3)), Clause((1, 2, 3))))]
    for sat in sats:
        art = nae3sat_to_pm_social(sat)
        satisfiable = any(all(nae_satisfied(c, b) for c in sat.clauses)
                          for b in product((0, 1), repeat=sat.num_vars))
        assert (brute_force_min_social(art.instance)[1] == 0) == satisfiable
