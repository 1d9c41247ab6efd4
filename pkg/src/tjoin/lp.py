"""Cutting-plane solver for the connected-T-join relaxation.

The relaxation: minimize ``c . x`` over ``x >= 0`` with

* ``x(E(S)) <= |S| - 1`` for every ``S`` with ``2 <= |S| < n``;
* ``x(E(V)) == n - 1``;
* ``x(delta(S)) >= 2`` for every proper nonempty T-even ``S``.

Separation is exhaustive over node subsets, which is fine up to ~20 nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import subsets
from .instance import Edge, Instance, nodes_of
from .oracle import DEFAULT_LIMITS, OracleLimits
from .simplex import EQ, GE, LE, Dictionary, Status

SUBTOUR, T_EVEN, TOTAL = "subtour", "t_even", "total"


@dataclass(frozen=True)
class Cut:
    nodes: frozenset[int]
    family: str
    violation: Fraction


@dataclass
class Lp1Solution:
    x_star: dict[Edge, Fraction]
    value: Fraction
    active_rows: list[Cut] = field(default_factory=list)
    rounds: int = 0

    def support(self) -> dict[Edge, Fraction]:
        return {e: v for e, v in self.x_star.items() if v}


def _check_size(inst: Instance, limits: OracleLimits) -> None:
    if inst.n > limits.max_nodes_cut_enum:
        raise ValueError(
            f"{inst.n} nodes exceeds the exhaustive separation limit of {limits.max_nodes_cut_enum}"
        )


def _top(cands: np.ndarray, viol: np.ndarray, L: int, family: str, batch: int) -> list[Cut]:
    if cands.size == 0:
        return []
    order = sorted(range(cands.size), key=lambda i: (-int(viol[i]), int(cands[i])))[:batch]
    return [Cut(nodes_of(int(cands[i])), family, Fraction(int(viol[i]), L)) for i in order]


def separate_subtour(
    inst: Instance, x: dict[Edge, Fraction], batch: int = 50, limits: OracleLimits = DEFAULT_LIMITS
) -> list[Cut]:
    """Violated ``x(E(S)) <= |S|-1`` rows, most violated first."""
    _check_size(inst, limits)
    n = inst.n
    table, L = subsets.fractional_inner(n, x)
    size = subsets.popcount(n)
    if L * n >= 1 << 62:
        table = table.astype(object)
    viol = table - (size.astype(table.dtype) - 1) * L
    all_masks = subsets.masks(n)
    sel = (size >= 2) & (size < n) & (viol > 0)
    return _top(all_masks[sel], viol[sel], L, SUBTOUR, batch)


def separate_teven(
    inst: Instance, x: dict[Edge, Fraction], batch: int = 50, limits: OracleLimits = DEFAULT_LIMITS
) -> list[Cut]:
    """Violated ``x(delta(S)) >= 2`` rows over T-even S, most violated first.

    ``S`` and its complement give the same row, so only sets avoiding the
    root terminal are reported.
    """
    _check_size(inst, limits)
    n = inst.n
    table, L = subsets.fractional_boundary(n, x)
    if 2 * L >= 1 << 62:
        table = table.astype(object)
    viol = 2 * L - table
    all_masks = subsets.masks(n)
    even = subsets.parity(n, inst.t_mask) == 0
    avoid = (all_masks & (1 << inst.root_node)) == 0
    sel = even & avoid & (all_masks != 0) & (viol > 0)
    return _top(all_masks[sel], viol[sel], L, T_EVEN, batch)


def cut_row(inst: Instance, cut: Cut) -> tuple[dict[int, int], str, int]:
    """The LP row of a cut over edge indices."""
    S = cut.nodes
    if cut.family == SUBTOUR:
        coeffs = {i: 1 for i, (u, v) in enumerate(inst.edge_list) if u in S and v in S}
        return coeffs, LE, len(S) - 1
    if cut.family == T_EVEN:
        coeffs = {i: 1 for i, (u, v) in enumerate(inst.edge_list) if (u in S) != (v in S)}
        return coeffs, GE, 2
    raise ValueError(f"no row for family {cut.family}")


def initial_rows(inst: Instance) -> list[tuple[dict[int, int], str, int]]:
    m = len(inst.edges)
    rows = [({i: 1 for i in range(m)}, EQ, inst.n - 1)]
    rows += [({i: 1}, LE, 1) for i in range(m)]
    return rows


def solve_lp1(
    inst: Instance, batch: int = 50, limits: OracleLimits = DEFAULT_LIMITS, max_rounds: int = 10_000
) -> Lp1Solution:
    """Exact optimum of the relaxation by cutting planes and exhaustive separation."""
    if not inst.is_metric:
        raise ValueError("solve_lp1 expects a metric instance")
    if not inst.terminals or len(inst.terminals) % 2:
        raise ValueError("T must be nonempty and even")
    _check_size(inst, limits)
    dic = Dictionary([c for _, _, c in inst.edges])
    for coeffs, rel, rhs in initial_rows(inst):
        dic.add_row(coeffs, rel, rhs)
    active: list[Cut] = []
    for rounds in range(1, max_rounds + 1):
        status = dic.optimize()
        if status is not Status.OPTIMAL:
            raise RuntimeError(f"master LP is {status.value}")
        x = dict(zip(inst.edge_list, dic.primal()))
        cuts = separate_subtour(inst, x, batch, limits) + separate_teven(inst, x, batch, limits)
        if not cuts:
            return Lp1Solution(x, dic.value(), active, rounds)
        for cut in cuts:
            dic.add_row(*cut_row(inst, cut))
        active.extend(cuts)
    raise RuntimeError("cutting-plane loop did not converge")


def resolve_with_rows(inst: Instance, rows: list[Cut]) -> Fraction:
    """Solve from scratch with the initial rows plus ``rows``; used for determinism checks."""
    dic = Dictionary([c for _, _, c in inst.edges])
    for coeffs, rel, rhs in initial_rows(inst):
        dic.add_row(coeffs, rel, rhs)
    for cut in rows:
        dic.add_row(*cut_row(inst, cut))
    if dic.optimize() is not Status.OPTIMAL:
        raise RuntimeError("re-solve failed")
    return dic.value()
