import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tjoin.generate import gen_k4, gen_random_metric
from tjoin.instance import EdgeMultiset, make_instance, metric_completion, validate_connected_tjoin
from tjoin.oracle import (
    OracleLimits,
    brute_force_lp1,
    brute_force_min_djoin,
    brute_force_opt,
    enumerate_violated_cuts,
    prufer_decode,
    prufer_sequences,
)
from tjoin.prizecollect import gen_tight_example

from conftest import small_metric

TWO = make_instance(2, [(0, 1, 5)], [0, 1])


def test_limits_must_be_positive():
    with pytest.raises(ValueError):
        OracleLimits(max_nodes_tree_enum=0)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_prufer_gives_every_tree_once(n):
    trees = {frozenset(prufer_decode(list(s))) for s in prufer_sequences(n)}
    assert len(trees) == n ** (n - 2)


def test_opt_two_nodes():
    F, value = brute_force_opt(TWO)
    assert value == 5 and F.mult == {(0, 1): 1}


def test_opt_k4_unit():
    F, value = brute_force_opt(gen_k4())
    # K4 has 16 trees: 12 Hamiltonian paths (odd set = 2 ends) and 4 stars (odd set = all)
    assert value == 3
    assert F.odd_nodes(4) == {0, 1, 2, 3}


def test_opt_tight_cycle_matches_manual_enumeration():
    inst = gen_tight_example(4)
    _, value = brute_force_opt(inst)
    full = metric_completion(inst)
    best = None
    for tree in itertools.combinations(full.edge_list, 3):
        F = EdgeMultiset.from_edges(tree)
        if validate_connected_tjoin(full, F).ok:
            c = F.cost(full)
            best = c if best is None or c < best else best
    assert value == best == Fraction(5, 2)


def test_opt_limits():
    with pytest.raises(ValueError):
        brute_force_opt(gen_random_metric(9, 2, 0))
    with pytest.raises(ValueError):
        brute_force_opt(_odd())


def _odd():
    inst = make_instance(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)], [0, 1])
    return type(inst)(inst.n, inst.edges, frozenset({0, 1, 2}), None, None, True)


def test_min_djoin_trivial():
    inst = gen_random_metric(5, 2, 1)
    M, c = brute_force_min_djoin(inst, [])
    assert len(M) == 0 and c == 0
    M, c = brute_force_min_djoin(inst, [3, 1])
    assert M.mult == {(1, 3): 1} and c == inst.cost(1, 3)
    with pytest.raises(ValueError):
        brute_force_min_djoin(inst, [1, 2, 3])


@given(st.integers(0, 10**6))
def test_min_djoin_relabel_symmetric(seed):
    rng = random.Random(seed)
    n = 7
    inst = gen_random_metric(n, 2, seed)
    perm = list(range(n))
    rng.shuffle(perm)
    relabeled = make_instance(n, [(perm[u], perm[v], c) for u, v, c in inst.edges], [perm[0], perm[1]])
    D = rng.sample(range(n), 6)
    assert brute_force_min_djoin(inst, D)[1] == brute_force_min_djoin(relabeled, [perm[v] for v in D])[1]


def test_violated_cuts_tree_point():
    inst = gen_k4()
    path = {(0, 1): Fraction(1), (1, 2): Fraction(1), (2, 3): Fraction(1)}
    x = {e: path.get(e, Fraction(0)) for e in inst.edge_list}
    cuts = enumerate_violated_cuts(inst, x)
    assert all(c.family == "t_even" for c in cuts)
    assert any(c.nodes == {0, 1} and c.violation == 1 for c in cuts)


def test_violated_cuts_k4_half_point_empty():
    inst = gen_k4()
    assert enumerate_violated_cuts(inst, {e: Fraction(1, 2) for e in inst.edge_list}) == []


def test_violated_cuts_total_row():
    inst = gen_k4()
    cuts = enumerate_violated_cuts(inst, {e: Fraction(1, 3) for e in inst.edge_list})
    assert any(c.family == "total" and c.violation == 1 for c in cuts)


def test_lp1_oracle_examples():
    assert brute_force_lp1(TWO) == 5
    assert brute_force_lp1(gen_k4()) == 3
    with pytest.raises(ValueError):
        brute_force_lp1(gen_random_metric(9, 2, 0))


@pytest.mark.parametrize("seed", range(12))
def test_lp1_below_opt(seed):
    inst = small_metric(seed, (4, 7))
    assert brute_force_lp1(inst) <= brute_force_opt(inst)[1]
