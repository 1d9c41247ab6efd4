import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tjoin.generate import gen_random_metric
from tjoin.instance import (
    EdgeMultiset,
    InstanceFormatError,
    combine,
    fmt_q,
    format_instance,
    is_spanning_tree,
    kruskal,
    make_instance,
    metric_completion,
    cut_parity_holds,
    parse_instance,
    shortcut_steps,
    shortcut_to_tree,
    validate_connected_tjoin,
    wrong_degree_set,
)
from tjoin.oracle import brute_force_opt

K4_TEXT = """nodes 4
T 4 0 1 2 3
edge 0 1 1
edge 0 2 1
edge 0 3 1
edge 1 2 1
edge 1 3 1
edge 2 3 1
"""


def test_parse_smallest_instance():
    inst = parse_instance("nodes 2\nT 2 0 1\nedge 0 1 5\n")
    assert inst.n == 2
    assert inst.edges == ((0, 1, Fraction(5)),)
    assert inst.terminals == {0, 1}
    assert inst.is_metric


def test_parse_k4():
    inst = parse_instance(K4_TEXT)
    assert len(inst.edges) == 6 and inst.terminals == {0, 1, 2, 3} and inst.is_metric


@pytest.mark.parametrize(
    "text, message, line",
    [
        ("nodes 3\nT 3 0 1 2\nedge 0 1 1\n", "odd |T|", 2),
        ("nodes 3\nT 0\nedge 0 1 1\n", "empty T", 2),
        ("nodes 2\nT 2 0 1\nedge 0 1 -1\n", "negative cost", 3),
        ("nodes 2\nT 2 0 1\nedge 0 1 1\nedge 1 0 2\n", "duplicate edge", 4),
        ("nodes 2\nT 2 0 1\nedge 0 1\n", "malformed", 3),
        ("nodes 2\nT 2 0 1\nedge 0 1 1/0\n", "malformed", 3),
        ("nodes 2\nT 2 0 1\nfoo 1\n", "unknown directive", 3),
    ],
)
def test_parse_errors_carry_line_numbers(text, message, line):
    with pytest.raises(InstanceFormatError) as exc:
        parse_instance(text)
    assert message in str(exc.value)
    assert exc.value.lineno == line


def test_parse_comments_root_penalties():
    inst = parse_instance("# c\nnodes 3\nT 2 0 2  # terminals\nroot 2\nedge 0 1 1/2\nedge 1 2 3/4\npenalty 1 7\n")
    assert inst.root_node == 2
    assert inst.penalties == {1: Fraction(7)}
    assert not inst.is_metric  # not complete


def test_penalty_on_terminal_rejected():
    with pytest.raises(InstanceFormatError):
        parse_instance("nodes 2\nT 2 0 1\nedge 0 1 1\npenalty 0 1\n")


def test_fmt_rational():
    assert fmt_q(Fraction(6, 4)) == "3/2"
    assert fmt_q(Fraction(4, 2)) == "2"
    assert fmt_q(Fraction(-1, 3)) == "-1/3"


@given(st.integers(0, 10**6))
def test_format_roundtrip(seed):
    inst = gen_random_metric(random.Random(seed).randint(2, 7), 2, seed)
    again = parse_instance(format_instance(inst))
    assert again == inst


def test_metric_completion_two_hop():
    inst = make_instance(3, [(0, 1, 1), (1, 2, 1)], [0, 2])
    full = metric_completion(inst)
    assert full.is_metric and full.check_metric()
    assert full.cost(0, 2) == 2
    # existing edges keep their positions
    assert full.edge_list[:2] == [(0, 1), (1, 2)]


def test_metric_completion_idempotent():
    inst = gen_random_metric(6, 4, 3)
    assert metric_completion(inst).costs == inst.costs


def test_metric_completion_disconnected():
    with pytest.raises(ValueError, match="disconnected"):
        metric_completion(make_instance(4, [(0, 1, 1), (2, 3, 1)], [0, 1]))


def _path_enumeration_distance(n, edges, s, t):
    """Cheapest simple path by enumerating node orderings."""
    c = {frozenset((u, v)): w for u, v, w in edges}
    best = None
    others = [v for v in range(n) if v not in (s, t)]
    for r in range(len(others) + 1):
        for mid in itertools.permutations(others, r):
            path = (s, *mid, t)
            legs = [frozenset(p) for p in zip(path, path[1:])]
            if all(leg in c for leg in legs):
                w = sum(c[leg] for leg in legs)
                best = w if best is None or w < best else best
    return best


@pytest.mark.parametrize("seed", range(8))
def test_metric_completion_matches_path_enumeration(seed):
    rng = random.Random(seed)
    n = 6
    tree = [(v, rng.randrange(v), Fraction(rng.randint(1, 20), rng.randint(1, 3))) for v in range(1, n)]
    extra = []
    have = {frozenset(e[:2]) for e in tree}
    for u in range(n):
        for v in range(u + 1, n):
            if frozenset((u, v)) not in have and rng.random() < 0.3:
                extra.append((u, v, Fraction(rng.randint(1, 40), 2)))
    edges = tree + extra
    inst = make_instance(n, edges, [0, 1])
    full = metric_completion(inst)
    norm_edges = [(min(u, v), max(u, v), c) for u, v, c in edges]
    for u in range(n):
        for v in range(u + 1, n):
            assert full.cost(u, v) == _path_enumeration_distance(n, norm_edges, u, v)
    assert full.check_metric()


def test_edge_multiset_cost_and_reduced():
    inst = gen_random_metric(4, 2, 1)
    F = EdgeMultiset.from_edges([(0, 1), (1, 0), (2, 3)])
    assert F.mult == {(0, 1): 2, (2, 3): 1}
    assert F.cost(inst) == 2 * inst.cost(0, 1) + inst.cost(2, 3)
    assert F.is_reduced()
    assert not EdgeMultiset({(0, 1): 3}).is_reduced()


def test_combine_doubles_shared_edges():
    J = [(0, 1), (1, 2)]
    assert combine(J, EdgeMultiset({})).mult == {(0, 1): 1, (1, 2): 1}
    assert combine(J, EdgeMultiset({(1, 2): 1})).mult[(1, 2)] == 2


def test_validate_connected_tjoin():
    inst = parse_instance("nodes 2\nT 2 0 1\nedge 0 1 5\n")
    rep = validate_connected_tjoin(inst, EdgeMultiset({(0, 1): 1}))
    assert rep.ok and rep.cost == 5
    k4 = parse_instance(K4_TEXT)
    rep = validate_connected_tjoin(k4, EdgeMultiset.from_edges([(0, 1), (1, 2), (2, 3)]))
    assert rep.connected and not rep.parity_ok  # nodes 1 and 2 have even degree


def test_wrong_degree_set_examples():
    path = [(0, 1), (1, 2), (2, 3)]
    assert wrong_degree_set(path, {0, 3}) == frozenset()
    star = [(0, 1), (0, 2), (0, 3)]
    assert wrong_degree_set(star, {1, 2}) == {0, 3}
    assert wrong_degree_set(star, {0, 1, 2, 3}) == frozenset()


@given(st.integers(0, 10**6))
def test_wrong_degree_set_recount(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 10)
    tree = [(v, rng.randrange(v)) for v in range(1, n)]
    T = set(rng.sample(range(n), 2 * rng.randint(1, n // 2)))
    D = wrong_degree_set(tree, T)
    for v in range(n):
        deg = sum(v in e for e in tree)
        assert (v in D) == ((v in T) == (deg % 2 == 0))
    assert len(D) % 2 == 0


def test_shortcut_tree_unchanged():
    inst = gen_random_metric(5, 2, 4)
    tree = [(0, 2), (2, 3), (3, 4), (1, 4)]
    assert validate_connected_tjoin(inst, EdgeMultiset.from_edges(tree)).ok
    assert sorted(shortcut_to_tree(inst, EdgeMultiset.from_edges(tree))) == sorted(tree)


def test_shortcut_rejects_bad_parity():
    inst = make_instance(3, [(0, 1, 1), (0, 2, 1), (1, 2, 1)], [0, 2])
    with pytest.raises(ValueError):
        shortcut_to_tree(inst, EdgeMultiset({(0, 1): 2}))


@given(st.integers(0, 10**6))
def test_shortcut_tree_plus_doubled_edge(seed):
    rng = random.Random(seed)
    n = 6
    inst = gen_random_metric(n, rng.choice([2, 4, 6]), seed)
    # any tree of the instance with the right parity, plus a doubled edge
    _, opt = brute_force_opt(inst)
    costs = inst.costs
    tree = kruskal(n, inst.edge_list, lambda e: rng.random())
    D = wrong_degree_set(tree, inst.terminals)
    F = combine(tree, EdgeMultiset.from_edges(zip(sorted(D)[::2], sorted(D)[1::2])))
    F = F + EdgeMultiset({rng.choice(inst.edge_list): 2})
    assert validate_connected_tjoin(inst, F).ok
    sizes = [len(s) for s in shortcut_steps(inst, F)]
    assert all(b < a for a, b in zip(sizes, sizes[1:]))
    out = shortcut_to_tree(inst, F)
    assert is_spanning_tree(n, out)
    assert EdgeMultiset.from_edges(out).odd_nodes(n) == inst.terminals
    c = sum(costs[e] for e in out)
    assert opt <= c <= F.cost(inst)


@given(st.integers(0, 10**6))
def test_cut_parity_random(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 9)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    F = EdgeMultiset({e: rng.randint(0, 3) for e in rng.sample(edges, min(len(edges), rng.randint(0, 12)))})
    T = frozenset(rng.sample(range(n), 2 * rng.randint(0, n // 2)))
    for mask in range(1 << n):
        U = frozenset(v for v in range(n) if mask >> v & 1)
        assert cut_parity_holds(F, T, U, n)
