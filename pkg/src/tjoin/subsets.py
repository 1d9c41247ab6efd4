"""Vectorized set functions over all node subsets (bitmasks).

Every exhaustive cut scan in the package goes through these tables: a
rational weight vector is scaled to integers over a common denominator and
summed over all ``2**n`` masks with numpy.  Values stay exact; the dtype is
``int64`` when the magnitudes allow it and Python ``object`` otherwise.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .instance import Edge

_SAFE = 1 << 62


def scale(values: Iterable[Fraction]) -> tuple[list[int], int]:
    """Integers ``k_i`` and denominator ``L`` with ``values[i] == k_i / L``."""
    values = [Fraction(v) for v in values]
    L = lcm(*(v.denominator for v in values)) if values else 1
    return [int(v * L) for v in values], L


def masks(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def bits(n: int) -> list[np.ndarray]:
    m = masks(n)
    return [((m >> v) & 1).astype(np.int64) for v in range(n)]


def popcount(n: int) -> np.ndarray:
    return np.bitwise_count(masks(n)).astype(np.int64)


def parity(n: int, node_mask: int) -> np.ndarray:
    """``|S & node_mask| mod 2`` for every mask S."""
    return (np.bitwise_count(masks(n) & node_mask) & 1).astype(np.int64)


def _dtype(weights: Sequence[int]) -> type | np.dtype:
    big = max((abs(w) for w in weights), default=0) * max(len(weights), 1)
    return np.int64 if big < _SAFE else object


def boundary(n: int, edges: Sequence[Edge], weights: Sequence[int]) -> np.ndarray:
    """``sum_{e in delta(S)} w_e`` for every mask S."""
    b = bits(n)
    dt = _dtype(weights)
    out = np.zeros(1 << n, dtype=dt)
    for (u, v), w in zip(edges, weights):
        if w:
            out += (b[u] ^ b[v]).astype(dt) * w
    return out


def inner(n: int, edges: Sequence[Edge], weights: Sequence[int]) -> np.ndarray:
    """``sum_{e in E(S)} w_e`` for every mask S."""
    b = bits(n)
    dt = _dtype(weights)
    out = np.zeros(1 << n, dtype=dt)
    for (u, v), w in zip(edges, weights):
        if w:
            out += (b[u] & b[v]).astype(dt) * w
    return out


def node_sum(n: int, weights: Sequence[int]) -> np.ndarray:
    """``sum_{v in S} w_v`` for every mask S."""
    b = bits(n)
    dt = _dtype(weights)
    out = np.zeros(1 << n, dtype=dt)
    for v, w in enumerate(weights):
        if w:
            out += b[v].astype(dt) * w
    return out


def fractional_boundary(n: int, point: dict[Edge, Fraction]) -> tuple[np.ndarray, int]:
    """Scaled ``x(delta(S))`` table and its denominator."""
    edges = list(point)
    ints, L = scale(point[e] for e in edges)
    return boundary(n, edges, ints), L


def fractional_inner(n: int, point: dict[Edge, Fraction]) -> tuple[np.ndarray, int]:
    edges = list(point)
    ints, L = scale(point[e] for e in edges)
    return inner(n, edges, ints), L
