"""Exact maximum flow (shortest augmenting paths) with a min-cut witness."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction


@dataclass
class FlowResult:
    value: Fraction
    flow: list[Fraction]  # per input arc
    source_side: frozenset[int]  # residual-reachable nodes from the source

    def cut_capacity(self, arcs) -> Fraction:
        S = self.source_side
        return sum((Fraction(c) for u, v, c in arcs if u in S and v not in S), Fraction(0))


def max_flow(num_nodes: int, arcs: list[tuple[int, int, Fraction]], s: int, t: int) -> FlowResult:
    """Edmonds-Karp over rationals; ``arcs`` are ``(tail, head, capacity)``."""
    if s == t:
        raise ValueError("source equals sink")
    # residual graph as paired arcs: 2i forward, 2i+1 backward
    head: list[int] = []
    cap: list[Fraction] = []
    adj: list[list[int]] = [[] for _ in range(num_nodes)]
    for u, v, c in arcs:
        c = Fraction(c)
        if c < 0:
            raise ValueError("negative capacity")
        adj[u].append(len(head))
        head.append(v)
        cap.append(c)
        adj[v].append(len(head))
        head.append(u)
        cap.append(Fraction(0))
    value = Fraction(0)
    while True:
        pred = [-1] * num_nodes
        pred[s] = -2
        q = deque([s])
        while q and pred[t] == -1:
            u = q.popleft()
            for a in adj[u]:
                v = head[a]
                if cap[a] > 0 and pred[v] == -1:
                    pred[v] = a
                    q.append(v)
        if pred[t] == -1:
            break
        push = None
        v = t
        while v != s:
            a = pred[v]
            push = cap[a] if push is None else min(push, cap[a])
            v = head[a ^ 1]
        v = t
        while v != s:
            a = pred[v]
            cap[a] -= push
            cap[a ^ 1] += push
            v = head[a ^ 1]
        value += push
    reach = frozenset(v for v in range(num_nodes) if pred[v] != -1)
    flow = [cap[2 * i + 1] for i in range(len(arcs))]
    return FlowResult(value, flow, reach)
