import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tjoin.generate import gen_k4, gen_random_metric
from tjoin.joins import min_cost_djoin, min_weight_perfect_matching
from tjoin.oracle import brute_force_min_djoin
from tjoin.simplex import GE, LpModel, Status, simplex_solve


def test_pair():
    inst = gen_random_metric(6, 2, 4)
    M = min_cost_djoin(inst, [4, 2])
    assert M.mult == {(2, 4): 1}
    assert M.odd_nodes(6) == {2, 4}


def test_k4_all_nodes():
    M = min_cost_djoin(gen_k4(), [0, 1, 2, 3])
    assert M.cost(gen_k4()) == 2 and len(M) == 2


def test_empty_and_errors():
    inst = gen_random_metric(5, 2, 0)
    assert len(min_cost_djoin(inst, [])) == 0
    with pytest.raises(ValueError):
        min_cost_djoin(inst, [0, 1, 2])
    with pytest.raises(ValueError, match="limit"):
        min_weight_perfect_matching(range(22), lambda u, v: Fraction(1))


def test_lexicographic_tie_break():
    # all pairings cost the same; the lowest node takes the lowest partner
    p = min_weight_perfect_matching([5, 1, 3, 7], lambda u, v: Fraction(1))
    assert p.pairs == ((1, 3), (5, 7)) and p.cost == 2


@given(st.integers(0, 10**6))
def test_matches_enumeration_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(8, 10)
    inst = gen_random_metric(n, 2, seed)
    D = rng.sample(range(n), 8)
    M = min_cost_djoin(inst, D)
    assert M.odd_nodes(n) == set(D)
    assert M.cost(inst) == brute_force_min_djoin(inst, D)[1]


def _djoin_cut_lp(inst, D):
    """min c.y over y >= 0 with y(delta(S)) >= 1 for every D-odd S."""
    model = LpModel([c for _, _, c in inst.edges])
    Dset = set(D)
    for r in range(1, inst.n):
        for S in itertools.combinations(range(inst.n), r):
            S = set(S)
            if len(S & Dset) % 2:
                model.add({i: 1 for i, (u, v) in enumerate(inst.edge_list) if (u in S) != (v in S)}, GE, 1)
    res = simplex_solve(model)
    assert res.status is Status.OPTIMAL
    return res.value


@pytest.mark.parametrize("seed", range(6))
def test_cost_equals_cut_relaxation(seed):
    rng = random.Random(seed)
    n = rng.randint(4, 6)
    inst = gen_random_metric(n, 2, seed)
    D = rng.sample(range(n), 2 * rng.randint(1, n // 2))
    assert min_cost_djoin(inst, D).cost(inst) == _djoin_cut_lp(inst, D)
