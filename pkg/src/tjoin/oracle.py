"""Brute-force ground truth for desk-scale instances.

Everything here is deliberately exponential and written independently of
the fast paths it is used to check: cut enumeration is a plain Python loop
over subsets, the optimum comes from enumerating every spanning tree, and
the relaxation is solved with every row written out.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .instance import Edge, EdgeMultiset, Instance, metric_completion, nodes_of, norm
from .simplex import EQ, GE, LE, LpModel, Status, simplex_solve


@dataclass(frozen=True)
class OracleLimits:
    max_nodes_tree_enum: int = 8
    max_nodes_cut_enum: int = 20
    max_D_matching_enum: int = 10

    def __post_init__(self) -> None:
        for name in ("max_nodes_tree_enum", "max_nodes_cut_enum", "max_D_matching_enum"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


DEFAULT_LIMITS = OracleLimits()


@dataclass(frozen=True)
class ViolatedCut:
    nodes: frozenset[int]
    family: str  # "subtour", "t_even" or "total"
    violation: Fraction


def _complete(inst: Instance) -> Instance:
    return inst if inst.is_metric and inst.is_complete() else metric_completion(inst)


def prufer_sequences(n: int) -> np.ndarray:
    """All ``n**(n-2)`` Prüfer sequences as rows, in lexicographic order."""
    k = n - 2
    if k <= 0:
        return np.zeros((1, 0), dtype=np.int8)
    grid = np.indices((n,) * k, dtype=np.int8)
    return grid.reshape(k, -1).T


def prufer_decode(seq) -> list[Edge]:
    n = len(seq) + 2
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    edges = []
    for v in seq:
        leaf = next(u for u in range(n) if degree[u] == 1)
        edges.append(norm(leaf, int(v)))
        degree[leaf] -= 1
        degree[v] -= 1
    u, w = (x for x in range(n) if degree[x] == 1)
    edges.append(norm(u, w))
    return edges


def brute_force_opt(inst: Instance, limits: OracleLimits = DEFAULT_LIMITS) -> tuple[EdgeMultiset, Fraction]:
    """Cheapest spanning tree of the metric completion whose odd-degree set is T.

    Some optimal connected T-join is such a tree, so this is the optimum.
    Trees are enumerated as Prüfer sequences; degree parity is read off the
    sequence (degree = 1 + occurrences) before any tree is decoded.
    """
    T = inst.terminals
    if not T:
        raise ValueError("T must be nonempty")
    if len(T) % 2:
        raise ValueError("|T| must be even")
    n = inst.n
    if n > limits.max_nodes_tree_enum:
        raise ValueError(f"{n} nodes exceeds the tree enumeration limit {limits.max_nodes_tree_enum}")
    full = _complete(inst)
    seqs = prufer_sequences(n)
    counts = np.zeros((seqs.shape[0], n), dtype=np.int16)
    for v in range(n):
        counts[:, v] = (seqs == v).sum(axis=1)
    want_odd = np.array([v in T for v in range(n)])
    # degree is odd exactly when the count is even
    ok = ((counts % 2 == 0) == want_odd).all(axis=1)
    best = None
    best_cost = None
    for seq in seqs[ok]:
        tree = prufer_decode([int(v) for v in seq])
        c = sum((full.cost(u, v) for u, v in tree), Fraction(0))
        if best_cost is None or c < best_cost:
            best, best_cost = tree, c
    assert best is not None, "no spanning tree has the required odd-degree set"
    return EdgeMultiset.from_edges(best), best_cost


def brute_force_min_djoin(
    inst: Instance, D, limits: OracleLimits = DEFAULT_LIMITS
) -> tuple[EdgeMultiset, Fraction]:
    """Cheapest perfect pairing of ``D`` by direct metric edges."""
    D = sorted(D)
    if len(D) % 2:
        raise ValueError("|D| must be even")
    if len(D) > limits.max_D_matching_enum:
        raise ValueError(f"|D| = {len(D)} exceeds the pairing enumeration limit")
    full = _complete(inst)

    def pairings(rest):
        if not rest:
            yield []
            return
        a = rest[0]
        for i in range(1, len(rest)):
            for tail in pairings(rest[1:i] + rest[i + 1:]):
                yield [(a, rest[i])] + tail

    best, best_cost = [], None
    for p in pairings(D):
        c = sum((full.cost(u, v) for u, v in p), Fraction(0))
        if best_cost is None or c < best_cost:
            best, best_cost = p, c
    return EdgeMultiset.from_edges(best), best_cost or Fraction(0)


def enumerate_violated_cuts(
    inst: Instance, x: dict[Edge, Fraction], limits: OracleLimits = DEFAULT_LIMITS
) -> list[ViolatedCut]:
    """Every violated relaxation row at ``x``, one subset at a time."""
    n = inst.n
    if n > limits.max_nodes_cut_enum:
        raise ValueError(f"{n} nodes exceeds the cut enumeration limit {limits.max_nodes_cut_enum}")
    items = [(e, Fraction(v)) for e, v in x.items() if v]
    L = lcm(*(v.denominator for _, v in items)) if items else 1
    weighted = [(1 << u, 1 << v, int(val * L)) for (u, v), val in items]
    full = (1 << n) - 1
    t_mask = inst.t_mask
    out = []
    total = sum(w for _, _, w in weighted)
    if total != (n - 1) * L:
        out.append(ViolatedCut(frozenset(range(n)), "total", Fraction(abs(total - (n - 1) * L), L)))
    for S in range(1, full):
        inside = crossing = 0
        for bu, bv, w in weighted:
            iu, iv = bool(S & bu), bool(S & bv)
            if iu and iv:
                inside += w
            elif iu != iv:
                crossing += w
        size = bin(S).count("1")
        if inside > (size - 1) * L:
            out.append(ViolatedCut(nodes_of(S), "subtour", Fraction(inside - (size - 1) * L, L)))
        if bin(S & t_mask).count("1") % 2 == 0 and crossing < 2 * L:
            out.append(ViolatedCut(nodes_of(S), "t_even", Fraction(2 * L - crossing, L)))
    return out


def full_lp1_model(inst: Instance) -> LpModel:
    """The relaxation with every subtour and T-even row written out."""
    n = inst.n
    edges = inst.edge_list
    model = LpModel([c for _, _, c in inst.edges])
    model.add({i: 1 for i in range(len(edges))}, EQ, n - 1)
    for i in range(len(edges)):
        model.add({i: 1}, LE, 1)
    for r in range(2, n):
        for S in itertools.combinations(range(n), r):
            s = set(S)
            model.add({i: 1 for i, (u, v) in enumerate(edges) if u in s and v in s}, LE, r - 1)
    for r in range(1, n):
        for S in itertools.combinations(range(n), r):
            s = set(S)
            if len(s & inst.terminals) % 2:
                continue
            model.add({i: 1 for i, (u, v) in enumerate(edges) if (u in s) != (v in s)}, GE, 2)
    return model


def brute_force_lp1(inst: Instance) -> Fraction:
    if inst.n > 8:
        raise ValueError("the full relaxation oracle is limited to 8 nodes")
    res = simplex_solve(full_lp1_model(inst))
    if res.status is not Status.OPTIMAL:
        raise RuntimeError(f"full relaxation is {res.status.value}")
    return res.value
