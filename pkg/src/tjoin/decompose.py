"""Exact decomposition of a spanning-tree-polytope point into spanning trees.

Column generation: the master LP maximizes ``sum(lambda)`` subject to
``sum_J lambda_J chi(J) <= x`` over the trees generated so far, and pricing
asks for a spanning tree whose total dual weight is below 1.  That is a
minimum spanning tree under ``w_e = -(row dual of e)``, which is nonnegative
since the master is solved in minimization form.  When no such tree
exists the master value is the polytope optimum; for ``x`` in the polytope
it equals 1 and the inequalities are all tight.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .instance import Edge, fmt_edge, fmt_q, is_spanning_tree, kruskal, norm, parse_rational
from .simplex import LE, Dictionary, Status


class NotInTreePolytope(ValueError):
    """Pricing stopped below 1: ``x`` is not a convex combination of trees.

    ``weights`` are the dual edge weights certifying it: every spanning tree
    has weight at least 1 under them while ``x`` has weight ``value < 1``.
    """

    def __init__(self, value: Fraction, weights: dict[Edge, Fraction]) -> None:
        self.value = value
        self.weights = weights
        super().__init__(f"master value {fmt_q(value)} < 1; point lies outside the tree polytope")


@dataclass(frozen=True)
class SpanningTreeDecomposition:
    terms: tuple[tuple[Fraction, tuple[Edge, ...]], ...]

    def __len__(self) -> int:
        return len(self.terms)

    def lambdas(self) -> list[Fraction]:
        return [lam for lam, _ in self.terms]

    def trees(self) -> list[tuple[Edge, ...]]:
        return [t for _, t in self.terms]


def decompose_spanning_trees(n: int, x_star: dict[Edge, Fraction]) -> SpanningTreeDecomposition:
    support = sorted(e for e, v in x_star.items() if v)
    if not support:
        if n == 1:
            return SpanningTreeDecomposition(((Fraction(1), ()),))
        raise NotInTreePolytope(Fraction(0), {})
    dic = Dictionary([])
    row_of: dict[Edge, int] = {}
    for e in support:
        (k,) = dic.add_row({}, LE, x_star[e])
        row_of[e] = k
    columns: list[tuple[Edge, ...]] = []

    def add_tree(tree):
        tree = tuple(sorted(tree))
        dic.add_column({row_of[e]: 1 for e in tree}, -1)
        columns.append(tree)

    first = kruskal(n, support, lambda e: 0)
    if len(first) != n - 1:
        raise NotInTreePolytope(Fraction(0), {})
    add_tree(first)
    while True:
        if dic.optimize() is not Status.OPTIMAL:
            raise RuntimeError("master LP failed")
        w = {e: -dic.row_dual(row_of[e]) for e in support}
        tree = kruskal(n, support, lambda e: w[e])
        if sum(w[e] for e in tree) >= 1:
            break
        add_tree(tree)
    value = -dic.value()
    if value != 1:
        raise NotInTreePolytope(value, w)
    lam = dic.primal()
    terms = tuple((l, t) for l, t in zip(lam, columns) if l)
    return SpanningTreeDecomposition(terms)


@dataclass
class DecompositionCheck:
    ok: bool
    problems: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def verify_decomposition(
    x_star: dict[Edge, Fraction], d: SpanningTreeDecomposition, n: int | None = None
) -> DecompositionCheck:
    """Exact check: positive weights summing to 1, spanning trees, and edgewise equality with x."""
    problems = []
    nodes = {v for e in x_star for v in e} | {v for _, t in d.terms for e in t for v in e}
    if n is None:
        n = max(nodes) + 1 if nodes else 1
    if any(lam <= 0 for lam in d.lambdas()):
        problems.append("nonpositive lambda")
    if sum(d.lambdas(), Fraction(0)) != 1:
        problems.append(f"lambdas sum to {fmt_q(sum(d.lambdas(), Fraction(0)))}")
    for i, (_, t) in enumerate(d.terms):
        if not is_spanning_tree(n, t):
            problems.append(f"term {i} is not a spanning tree")
    nedges = len(x_star)
    if len(d.terms) > nedges + 1:
        problems.append(f"{len(d.terms)} terms exceeds |E|+1 = {nedges + 1}")
    acc: dict[Edge, Fraction] = {}
    for lam, t in d.terms:
        for e in t:
            acc[norm(*e)] = acc.get(norm(*e), Fraction(0)) + lam
    for e in set(acc) | set(x_star):
        if acc.get(e, Fraction(0)) != x_star.get(e, Fraction(0)):
            problems.append(
                f"edge {fmt_edge(e)}: combination {fmt_q(acc.get(e, 0))} vs x {fmt_q(x_star.get(e, 0))}"
            )
    return DecompositionCheck(not problems, problems)


def edge_marginals(d: SpanningTreeDecomposition) -> dict[Edge, Fraction]:
    """``sum of lambda_i over trees containing e``, for each edge."""
    acc: dict[Edge, Fraction] = {}
    for lam, t in d.terms:
        for e in t:
            acc[e] = acc.get(e, Fraction(0)) + lam
    return acc


def sample_tree(d: SpanningTreeDecomposition, seed: int) -> tuple[Edge, ...]:
    """Draw tree i with probability lambda_i, exactly (one uniform integer draw)."""
    L = lcm(*(lam.denominator for lam in d.lambdas()))
    r = random.Random(seed).randrange(L)
    acc = 0
    for lam, t in d.terms:
        acc += int(lam * L)
        if r < acc:
            return t
    raise ValueError("lambdas do not sum to 1")


def format_decomposition(d: SpanningTreeDecomposition) -> str:
    lines = []
    for lam, t in d.terms:
        lines.append("lambda " + fmt_q(lam) + " tree " + " ".join(fmt_edge(e) for e in t))
    return "\n".join(lines) + ("\n" if lines else "")


_EDGE = re.compile(r"^(\d+)-(\d+)$")


def parse_decomposition(text: str) -> SpanningTreeDecomposition:
    terms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts:
            continue
        if len(parts) < 3 or parts[0] != "lambda" or parts[2] != "tree":
            raise ValueError(f"line {lineno}: expected 'lambda p/q tree u-v ...'")
        edges = []
        for tok in parts[3:]:
            m = _EDGE.match(tok)
            if not m:
                raise ValueError(f"line {lineno}: bad edge {tok!r}")
            edges.append(norm(int(m.group(1)), int(m.group(2))))
        terms.append((parse_rational(parts[1]), tuple(edges)))
    return SpanningTreeDecomposition(tuple(terms))
