"""Exact minimum-cost D-joins on metric instances.

On a complete metric graph a minimum D-join is a minimum perfect matching of
D using direct edges, so all the work is an exact matching by dynamic
programming over subsets of D.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .instance import Edge, EdgeMultiset, Instance, combine, norm
from .subsets import scale

__all__ = ["Pairing", "min_weight_perfect_matching", "min_cost_djoin", "combine"]

MAX_MATCHING_SIZE = 20


@dataclass(frozen=True)
class Pairing:
    pairs: tuple[Edge, ...]
    cost: Fraction


def min_weight_perfect_matching(
    nodes: Sequence[int], cost: Callable[[int, int], Fraction], max_size: int = MAX_MATCHING_SIZE
) -> Pairing:
    """Minimum perfect matching of ``nodes`` under ``cost``.

    The DP always matches the lowest unmatched node first and tries partners
    in increasing order, keeping the first optimum, so among optimal
    pairings the lexicographically smallest is returned.
    """
    D = sorted(set(nodes))
    k = len(D)
    if k % 2:
        raise ValueError(f"cannot perfectly match an odd set of {k} nodes")
    if k > max_size:
        raise ValueError(
            f"|D| = {k} exceeds the exact matching limit {max_size}; use a smaller instance"
        )
    if k == 0:
        return Pairing((), Fraction(0))
    pairs_idx = [(i, j) for i in range(k) for j in range(i + 1, k)]
    ints, L = scale(cost(D[i], D[j]) for i, j in pairs_idx)
    w = {p: c for p, c in zip(pairs_idx, ints)}
    full = (1 << k) - 1

    @lru_cache(maxsize=None)
    def best(mask: int) -> tuple[int, int]:
        # returns (cost, partner of lowest node) for the unmatched set ``mask``
        if mask == 0:
            return 0, -1
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        out = None
        m = rest
        while m:
            j = (m & -m).bit_length() - 1
            m &= m - 1
            c = w[(i, j)] + best(rest & ~(1 << j))[0]
            if out is None or c < out[0]:
                out = (c, j)
        return out

    pairs = []
    mask = full
    while mask:
        i = (mask & -mask).bit_length() - 1
        j = best(mask)[1]
        pairs.append(norm(D[i], D[j]))
        mask &= ~((1 << i) | (1 << j))
    total = best(full)[0]
    best.cache_clear()
    return Pairing(tuple(pairs), Fraction(total, L))


def min_cost_djoin(inst: Instance, D: Iterable[int], max_size: int = MAX_MATCHING_SIZE) -> EdgeMultiset:
    """Minimum-cost D-join of a metric instance as a set of direct edges."""
    if not inst.is_metric:
        raise ValueError("min_cost_djoin needs a metric instance")
    pairing = min_weight_perfect_matching(list(D), inst.cost, max_size)
    return EdgeMultiset.from_edges(pairing.pairs)
