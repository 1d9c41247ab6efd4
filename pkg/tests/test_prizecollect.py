import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tjoin.generate import gen_random_pc
from tjoin.instance import make_instance
from tjoin.prizecollect import (
    dual_value,
    gen_tight_example,
    pc_relaxation_value,
    make_pc,
    rho,
    solve_pd,
    synthetic_penalty,
    verify_pd_guarantees,
)


def test_single_edge():
    pc = make_pc(make_instance(2, [(0, 1, 4)], [0, 1]))
    r = solve_pd(pc)
    assert r.J == ((0, 1),) and r.cost == 4 and r.penalty == 0
    assert r.dual_value == 4 and r.ratio == 1
    assert verify_pd_guarantees(pc, r).ok


@pytest.mark.parametrize(
    "t, cost, value", [(4, Fraction(7, 2), Fraction(3, 2)), (6, Fraction(13, 2), Fraction(5, 2)),
                       (8, Fraction(19, 2), Fraction(7, 2)), (10, Fraction(25, 2), Fraction(9, 2))]
)
def test_tight_cycles_reach_rho(t, cost, value):
    pc = make_pc(gen_tight_example(t))
    r = solve_pd(pc)
    assert (r.cost, r.dual_value) == (cost, value)
    assert r.ratio == rho(t) == 3 - Fraction(2, t - 1)
    assert verify_pd_guarantees(pc, r).ok


def test_tight_example_input_checks():
    with pytest.raises(ValueError):
        gen_tight_example(5)
    with pytest.raises(ValueError):
        gen_tight_example(2)


def test_rho_values():
    assert rho(2) == 2 and rho(4) == Fraction(7, 3) and rho(6) == Fraction(13, 5)


def test_dual_value_weights_even_sets_twice():
    pc = make_pc(gen_tight_example(4))
    r = solve_pd(pc)
    d = r.dual
    d.y = {frozenset({1}): Fraction(1), frozenset({1, 2}): Fraction(1, 3)}
    assert dual_value(d) == 1 + Fraction(2, 3)


def test_missing_penalty_rejected():
    inst = make_instance(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)], [0, 1])
    with pytest.raises(ValueError, match="missing penalties"):
        make_pc(inst)
    with pytest.raises(ValueError, match="root"):
        make_pc(make_instance(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)], [0, 1], {2: 0}), t_star=2)


def test_zero_penalty_node_is_isolated():
    inst = make_instance(3, [(0, 1, 2), (1, 2, 1), (0, 2, 1)], [0, 1], {2: 0})
    pc = make_pc(inst)
    r = solve_pd(pc)
    assert r.I == {2} and r.penalty == 0 and r.cost == 2
    assert verify_pd_guarantees(pc, r).ok


def test_large_penalty_node_is_connected_when_cheap():
    # node 2 sits between the terminals, so routing through it is free
    inst = make_instance(3, [(0, 1, 2), (1, 2, 1), (0, 2, 1)], [0, 1], {2: 100})
    r = solve_pd(make_pc(inst))
    assert r.I == frozenset() and r.cost == 2


def test_synthetic_penalty_exceeds_total_cost():
    inst = gen_tight_example(4)
    assert synthetic_penalty(inst) == 1 + 2 * inst.total_cost()


def test_two_terminals_ratio_at_most_two():
    for seed in range(10):
        pc = make_pc(gen_random_pc(6, 2, seed))
        r = solve_pd(pc)
        assert r.cost + 2 * r.penalty <= 2 * r.dual_value


@given(st.integers(0, 10**6))
def test_random_instances_pass_every_check(seed):
    rng = random.Random(seed)
    n = rng.randint(4, 8)
    t = rng.choice([t for t in (2, 4, 6) if t <= n])
    pc = make_pc(gen_random_pc(n, t, seed))
    r = solve_pd(pc)
    audit = verify_pd_guarantees(pc, r)
    assert audit.ok, audit.details
    assert r.dual_value <= pc_relaxation_value(pc)
