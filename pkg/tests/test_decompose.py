import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tjoin.decompose import (
    NotInTreePolytope,
    SpanningTreeDecomposition,
    decompose_spanning_trees,
    edge_marginals,
    format_decomposition,
    parse_decomposition,
    sample_tree,
    verify_decomposition,
)
from tjoin.generate import gen_k4
from tjoin.lp import solve_lp1

from conftest import small_metric

HALF = Fraction(1, 2)


def test_single_tree():
    x = {(0, 1): Fraction(1), (1, 2): Fraction(1), (0, 2): Fraction(0)}
    d = decompose_spanning_trees(3, x)
    assert d.terms == ((Fraction(1), ((0, 1), (1, 2))),)
    assert verify_decomposition(x, d, 3)


def test_k4_half_point():
    x = {e: HALF for e in gen_k4().edge_list}
    d = decompose_spanning_trees(4, x)
    assert verify_decomposition(x, d, 4)
    assert edge_marginals(d) == x


def test_outside_polytope():
    x = {(0, 1): Fraction(2), (1, 2): Fraction(0), (0, 2): Fraction(0)}
    with pytest.raises(NotInTreePolytope):
        decompose_spanning_trees(3, x)
    # sums to n-1 but concentrated on a triangle of a 4-node graph
    x = {(0, 1): Fraction(1), (1, 2): Fraction(1), (0, 2): Fraction(1), (2, 3): Fraction(0)}
    with pytest.raises(NotInTreePolytope) as err:
        decompose_spanning_trees(4, x)
    assert err.value.value < 1


def test_perturbed_lambda_fails_verification():
    x = {e: HALF for e in gen_k4().edge_list}
    d = decompose_spanning_trees(4, x)
    (l0, t0), (l1, t1) = d.terms[0], d.terms[1]
    bad = SpanningTreeDecomposition(
        ((l0 + Fraction(1, 1000), t0), (l1 - Fraction(1, 1000), t1)) + d.terms[2:]
    )
    check = verify_decomposition(x, bad, 4)
    assert not check and check.problems


def test_non_tree_term_flagged():
    x = {(0, 1): Fraction(1), (1, 2): Fraction(1)}
    d = SpanningTreeDecomposition(((Fraction(1), ((0, 1),)),))
    assert not verify_decomposition(x, d, 3)


@given(st.integers(0, 10**6))
def test_lp_optima_decompose(seed):
    inst = small_metric(seed, (3, 8))
    x = solve_lp1(inst).x_star
    d = decompose_spanning_trees(inst.n, x)
    assert verify_decomposition(x, d, inst.n)


def test_sampling_is_deterministic():
    d = decompose_spanning_trees(4, {e: HALF for e in gen_k4().edge_list})
    assert [sample_tree(d, s) for s in range(20)] == [sample_tree(d, s) for s in range(20)]
    one = SpanningTreeDecomposition(((Fraction(1), ((0, 1),)),))
    assert sample_tree(one, 123) == ((0, 1),)


def test_sampling_frequencies_track_lambdas():
    d = decompose_spanning_trees(4, {e: HALF for e in gen_k4().edge_list})
    draws = 10_000
    counts = Counter(sample_tree(d, s) for s in range(draws))
    for lam, t in d.terms:
        sigma = math.sqrt(float(lam) * (1 - float(lam)) / draws)
        assert abs(counts[t] / draws - float(lam)) <= 5 * sigma


def test_roundtrip_text():
    d = decompose_spanning_trees(4, {e: HALF for e in gen_k4().edge_list})
    assert parse_decomposition(format_decomposition(d)) == d
    with pytest.raises(ValueError, match="line 1"):
        parse_decomposition("lambda 1 tree 0+1\n")
