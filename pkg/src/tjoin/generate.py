"""Seeded instance generators."""

from __future__ import annotations

import random
from fractions import Fraction

from .instance import Instance, make_instance


def gen_random_metric(n: int, t_size: int, seed: int) -> Instance:
    """Random points in [0, 1000]^2 with L1 costs; T is the first ``t_size`` nodes.

    L1 keeps every cost an integer and the triangle inequality exact.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if t_size <= 0 or t_size % 2 or t_size > n:
        raise ValueError("t_size must be even, positive and at most n")
    rng = random.Random(seed)
    pts = [(rng.randint(0, 1000), rng.randint(0, 1000)) for _ in range(n)]
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            d = abs(pts[u][0] - pts[v][0]) + abs(pts[u][1] - pts[v][1])
            edges.append((u, v, d))
    return make_instance(n, edges, range(t_size))


def gen_k4() -> Instance:
    """K4 with unit costs and every node a terminal."""
    edges = [(u, v, 1) for u in range(4) for v in range(u + 1, 4)]
    return make_instance(4, edges, range(4))


def with_random_penalties(inst: Instance, seed: int, max_penalty: int = 2000, zero_prob: float = 0.25) -> Instance:
    """Attach integer penalties to every non-terminal; some are zero on purpose."""
    rng = random.Random(seed)
    pen = {}
    for v in range(inst.n):
        if v in inst.terminals:
            continue
        pen[v] = Fraction(0) if rng.random() < zero_prob else Fraction(rng.randint(0, max_penalty))
    return make_instance(inst.n, inst.edges, inst.terminals, pen, inst.root)


def gen_random_pc(n: int, t_size: int, seed: int, max_penalty: int = 2000) -> Instance:
    """Random metric instance with penalties on all non-terminals."""
    return with_random_penalties(gen_random_metric(n, t_size, seed), seed + 1, max_penalty)
