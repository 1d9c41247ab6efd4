import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tjoin.generate import gen_k4
from tjoin.lp import solve_lp1
from tjoin.narrowcuts import (
    EmptyBlockError,
    check_flow_conditions,
    correction_flows,
    crosses,
    enumerate_narrow_cuts,
    partition_from_subfamily,
    verify_partition_inequality,
    x_delta,
)

from conftest import small_metric

HALF = Fraction(1, 2)
K4_HALF = {e: HALF for e in gen_k4().edge_list}


def test_k4_just_above_half():
    fam = enumerate_narrow_cuts(gen_k4(), K4_HALF, tau=Fraction(51, 100))
    assert fam.cuts == (frozenset({1}), frozenset({2}), frozenset({3}), frozenset({1, 2, 3}))
    assert fam.values == (Fraction(3, 2),) * 4


def test_k4_flow_falls_short():
    fam = enumerate_narrow_cuts(gen_k4(), K4_HALF, tau=Fraction(51, 100))
    flows = correction_flows(gen_k4(), K4_HALF, fam)
    assert not flows.saturated
    assert flows.value == 3 and flows.cut_capacity == 3


def test_k4_at_half_is_empty():
    fam = enumerate_narrow_cuts(gen_k4(), K4_HALF, tau=HALF)
    assert len(fam) == 0
    flows = correction_flows(gen_k4(), K4_HALF, fam)
    assert flows.saturated and flows.value == 0


def test_t_hat_must_be_terminal():
    inst = small_metric(1, (6, 6), (2,))
    nonterm = next(v for v in range(inst.n) if v not in inst.terminals)
    with pytest.raises(ValueError):
        enumerate_narrow_cuts(inst, solve_lp1(inst).x_star, t_hat=nonterm)


@given(st.integers(0, 10**6))
def test_family_on_lp_optima(seed):
    inst = small_metric(seed, (4, 9))
    x = solve_lp1(inst).x_star
    for tau in (HALF, Fraction(1)):
        fam = enumerate_narrow_cuts(inst, x, tau=tau)
        for i, S in enumerate(fam.cuts):
            assert inst.root_node not in S and len(S & inst.terminals) % 2 == 1
            assert fam.values[i] == x_delta(x, S) < 1 + tau
            for R in fam.cuts[:i]:
                assert not crosses(R, S)
    fam = enumerate_narrow_cuts(inst, x, tau=HALF)
    flows = correction_flows(inst, x, fam)
    assert flows.saturated and check_flow_conditions(x, flows) == []


def test_partition_examples():
    assert partition_from_subfamily([], 4, 0) == [frozenset(range(4))]
    assert partition_from_subfamily([frozenset({2})], 4, 0) == [frozenset({2}), frozenset({0, 1, 3})]
    chain = [frozenset({1}), frozenset({1, 2}), frozenset({1, 2, 3})]
    assert partition_from_subfamily(chain, 5, 0) == [
        frozenset({1}), frozenset({2}), frozenset({3}), frozenset({0, 4})
    ]


def test_partition_rejects_bad_input():
    with pytest.raises(ValueError):
        partition_from_subfamily([frozenset({0, 1})], 3, 0)
    with pytest.raises(ValueError):
        partition_from_subfamily([frozenset({1, 2}), frozenset({2, 3})], 4, 0)
    covered = [frozenset({1}), frozenset({2}), frozenset({1, 2})]
    with pytest.raises(EmptyBlockError):
        partition_from_subfamily(covered, 4, 0)
    assert partition_from_subfamily(covered, 4, 0, tau=Fraction(3, 4))[2] == frozenset()


@given(st.integers(0, 10**6))
def test_random_subfamilies_give_valid_partitions(seed):
    rng = random.Random(seed)
    inst = small_metric(seed, (4, 9))
    x = solve_lp1(inst).x_star
    fam = enumerate_narrow_cuts(inst, x, tau=HALF)
    sub = [U for U in fam.cuts if rng.random() < 0.6]
    blocks = partition_from_subfamily(sub, inst.n, fam.t_hat)
    assert all(blocks[:-1])
    seen = [v for P in blocks for v in P]
    assert sorted(seen) == list(range(inst.n))
    assert verify_partition_inequality(x, blocks)


def test_partition_inequality_detects_violation():
    x = {(0, 1): Fraction(1), (1, 2): HALF}
    assert verify_partition_inequality(x, [{0}, {1}, {2}]) is False
    assert verify_partition_inequality(x, [{0, 1}, {2}]) is False
    assert verify_partition_inequality(x, [{0}, {1, 2}]) is True
    with pytest.raises(ValueError):
        verify_partition_inequality(x, [{0, 1}, {1, 2}])


def test_flow_condition_checker_flags_bad_vectors():
    inst = gen_k4()
    x = solve_lp1(inst).x_star
    fam = enumerate_narrow_cuts(inst, x, tau=HALF)
    flows = correction_flows(inst, x, fam)
    U = fam.cuts[0]
    e = next(iter(flows.f[U]))
    flows.f[U][e] = flows.f[U][e] + 5
    assert any("exceeds" in p for p in check_flow_conditions(x, flows))
