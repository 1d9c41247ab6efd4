"""Primal-dual algorithm for prize-collecting connected T-joins.

Nodes outside T carry penalties; a solution may leave a set ``I`` of them
isolated and pays ``pi(I)`` instead of connecting them.  Terminals get a
synthetic penalty larger than any dual load, so they are always connected.

Growth is event driven and exact.  Each phase raises ``y_S`` uniformly for
the active components until an edge goes tight (merge) or an active
T-even component's accumulated load ``a(S) = sum_{R subset S, R T-even} 2 y_R``
reaches its penalty (deactivate).  Simultaneous events are resolved edge
events first, then the lowest edge index, then the lowest minimum node.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import subsets
from .instance import (
    Edge,
    EdgeMultiset,
    Instance,
    combine,
    fmt_edge,
    fmt_q,
    fmt_set,
    make_instance,
    mask_of,
    metric_completion,
    nodes_of,
    wrong_degree_set,
)
from .joins import min_cost_djoin
from .oracle import DEFAULT_LIMITS, OracleLimits
from .simplex import GE, LpModel, Status, simplex_solve


@dataclass(frozen=True)
class PcInstance:
    base: Instance  # complete metric graph with penalties on every non-terminal
    t_star: int
    pi: tuple[Fraction, ...]  # per node, synthetic for terminals

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def terminals(self) -> frozenset[int]:
        return self.base.terminals

    def penalty(self, nodes) -> Fraction:
        return sum((self.pi[v] for v in nodes), Fraction(0))


def synthetic_penalty(inst: Instance) -> Fraction:
    return 1 + 2 * inst.total_cost()


def make_pc(inst: Instance, t_star: int | None = None, complete: bool = True) -> PcInstance:
    """Wrap ``inst`` for the primal-dual algorithm, on its metric completion by default.

    Every non-terminal needs a penalty (zero is allowed).
    """
    T = inst.terminals
    if not T or len(T) % 2:
        raise ValueError("T must be nonempty and even")
    pen = dict(inst.penalties or {})
    missing = [v for v in range(inst.n) if v not in T and v not in pen]
    if missing:
        raise ValueError("missing penalties for non-terminals " + fmt_set(missing))
    if t_star is None:
        t_star = inst.root_node
    if t_star not in T:
        raise ValueError("the root must be a terminal")
    base = inst
    if complete and not (inst.is_metric and inst.is_complete()):
        base = metric_completion(inst)
    big = synthetic_penalty(base)
    pi = tuple(big if v in T else pen[v] for v in range(inst.n))
    return PcInstance(base, t_star, pi)


@dataclass(frozen=True)
class Phase:
    active: tuple[frozenset[int], ...]
    delta: Fraction
    event: str  # "edge" or "tight"
    edge: Edge | None = None
    merged: tuple[frozenset[int], frozenset[int]] | None = None
    deactivated: frozenset[int] | None = None


@dataclass
class DualSolution:
    y: dict[frozenset[int], Fraction]
    terminals: frozenset[int]
    history: list[Phase] = field(default_factory=list)
    components: list[frozenset[int]] = field(default_factory=list)  # every component ever formed
    deactivated: list[frozenset[int]] = field(default_factory=list)  # went pi-tight

    def is_odd(self, S: frozenset[int]) -> bool:
        return len(S & self.terminals) % 2 == 1


def dual_value(d: DualSolution) -> Fraction:
    """``sum of y over T-odd sets + 2 * sum over T-even sets``."""
    return sum((v if d.is_odd(S) else 2 * v for S, v in d.y.items()), Fraction(0))


def rho(t_size: int) -> Fraction:
    return max(3 - Fraction(2, t_size - 1), Fraction(2))


@dataclass
class PdResult:
    J: tuple[Edge, ...]
    I: frozenset[int]
    M: EdgeMultiset
    dual: DualSolution
    dual_value: Fraction
    rho: Fraction
    F: EdgeMultiset
    cost: Fraction  # cost(J + M)
    penalty: Fraction  # pi(I)
    grown: tuple[Edge, ...] = ()  # edges picked during growth, before pruning

    @property
    def total(self) -> Fraction:
        return self.cost + self.penalty

    @property
    def ratio(self) -> Fraction | None:
        return self.total / self.dual_value if self.dual_value else None

    def report_lines(self) -> list[str]:
        lines = ["tree " + " ".join(fmt_edge(e) for e in sorted(self.J))]
        lines.append(" ".join(["isolated", *(str(v) for v in sorted(self.I))]))
        for e, m in sorted(self.M.mult.items()):
            lines.append(f"join {fmt_edge(e)} {m}")
        for S in sorted(self.dual.y, key=lambda S: (len(S), sorted(S))):
            if self.dual.y[S]:
                lines.append(f"dual {fmt_set(S)} {fmt_q(self.dual.y[S])}")
        lines.append(f"cost {fmt_q(self.cost)}")
        lines.append(f"penalty {fmt_q(self.penalty)}")
        lines.append(f"value {fmt_q(self.dual_value)}")
        if self.ratio is not None:
            lines.append(f"ratio {fmt_q(self.ratio)} (~{float(self.ratio):.6f})")
        return lines


def _delta(J, S) -> list[Edge]:
    return [e for e in J if (e[0] in S) != (e[1] in S)]


def solve_pd(pc: PcInstance) -> PdResult:
    inst = pc.base
    n = inst.n
    T = inst.terminals
    root = pc.t_star
    edges = inst.edges
    comp_of = list(range(n))
    members: dict[int, frozenset[int]] = {v: frozenset([v]) for v in range(n)}
    active = {v for v in range(n) if v != root}
    a: dict[int, Fraction] = {v: Fraction(0) for v in range(n)}
    load = [Fraction(0)] * len(edges)
    dual = DualSolution({}, T)
    dual.components.extend(members.values())
    next_id = n
    grown: list[Edge] = []

    def even(cid):
        return len(members[cid] & T) % 2 == 0

    while active:
        best = None
        for idx, (u, v, c) in enumerate(edges):
            cu, cv = comp_of[u], comp_of[v]
            if cu == cv:
                continue
            k = (cu in active) + (cv in active)
            if not k:
                continue
            key = ((c - load[idx]) / k, 0, idx)
            if best is None or key < best:
                best = key
        for cid in active:
            if even(cid):
                key = ((pc.penalty(members[cid]) - a[cid]) / 2, 1, min(members[cid]))
                if best is None or key < best:
                    best = key
        assert best is not None, "an active component always has an event"
        dt, kind, which = best
        assert dt >= 0
        if dt:
            for idx, (u, v, c) in enumerate(edges):
                cu, cv = comp_of[u], comp_of[v]
                if cu != cv:
                    load[idx] += dt * ((cu in active) + (cv in active))
            for cid in active:
                S = members[cid]
                dual.y[S] = dual.y.get(S, Fraction(0)) + dt
                if even(cid):
                    a[cid] += 2 * dt
        snapshot = tuple(sorted((members[c] for c in active), key=lambda S: min(S)))
        if kind == 0:
            u, v, _ = edges[which]
            cu, cv = comp_of[u], comp_of[v]
            new = members[cu] | members[cv]
            nid = next_id
            next_id += 1
            members[nid] = new
            a[nid] = a[cu] + a[cv]
            for w in new:
                comp_of[w] = nid
            active.discard(cu)
            active.discard(cv)
            if root not in new:
                active.add(nid)
            grown.append((u, v))
            dual.components.append(new)
            dual.history.append(Phase(snapshot, dt, "edge", (u, v), (members[cu], members[cv])))
        else:
            cid = next(c for c in active if min(members[c]) == which)
            active.discard(cid)
            dual.deactivated.append(members[cid])
            dual.history.append(Phase(snapshot, dt, "tight", deactivated=members[cid]))

    J = _prune(n, grown, dual.deactivated, root)
    covered = {root} | {v for e in J for v in e}
    I = frozenset(range(n)) - covered
    assert T <= covered, "the pruned tree must reach every terminal"
    D = wrong_degree_set(J, T)
    M = min_cost_djoin(inst, D)
    F = combine(J, M)
    return PdResult(
        tuple(sorted(J)),
        I,
        M,
        dual,
        dual_value(dual),
        rho(len(T)),
        F,
        F.cost(inst),
        pc.penalty(I),
        tuple(grown),
    )


def _prune(n: int, grown: list[Edge], deactivated: list[frozenset[int]], root: int) -> list[Edge]:
    """Drop the single edge leaving any deactivated set, largest sets first,
    until none qualifies; then keep only the root's component."""
    J = set(grown)
    order = sorted(deactivated, key=lambda S: (-len(S), sorted(S)))
    changed = True
    while changed:
        changed = False
        for X in order:
            cut = _delta(J, X)
            if len(cut) == 1:
                J.discard(cut[0])
                changed = True
                break
    reach = {root}
    stack = [root]
    adj: dict[int, list[int]] = {}
    for u, v in J:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    while stack:
        x = stack.pop()
        for y in adj.get(x, []):
            if y not in reach:
                reach.add(y)
                stack.append(y)
    return [e for e in J if e[0] in reach]


# ---------------------------------------------------------------- audits


@dataclass
class PdAudit:
    checks: dict[str, bool]
    details: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v for v in self.checks.values() if v is not None)

    def lines(self) -> list[str]:
        out = []
        for name, v in self.checks.items():
            status = "skip" if v is None else ("pass" if v else "fail")
            out.append(f"bound-check {name} {status}")
        return out


def _dual_violations(pc: PcInstance, y: dict[frozenset[int], Fraction]) -> list[str]:
    """Exact check of both dual constraint families; penalty rows scanned over all X."""
    inst = pc.base
    n = inst.n
    T = inst.terminals
    out = []
    for u, v, c in inst.edges:
        s = sum((val for S, val in y.items() if (u in S) != (v in S)), Fraction(0))
        if s > c:
            out.append(f"edge {u}-{v} load {fmt_q(s)} > {fmt_q(c)}")
    even = [(mask_of(S), val) for S, val in y.items() if val and len(S & T) % 2 == 0]
    if even:
        ints, L = subsets.scale([2 * val for _, val in even] + list(pc.pi))
        k = len(even)
        all_masks = subsets.masks(n)
        load = np.zeros(1 << n, dtype=object)
        load[:] = 0
        for (m, _), w in zip(even, ints[:k]):
            load = load + ((all_masks & m) == m).astype(object) * w
        cap = np.zeros(1 << n, dtype=object)
        cap[:] = 0
        for v, w in enumerate(ints[k:]):
            cap = cap + ((all_masks >> v) & 1).astype(object) * w
        ok_region = ((all_masks >> pc.t_star) & 1) == 0
        bad = np.nonzero(ok_region & (load > cap))[0]
        for m in bad[:5]:
            out.append(f"penalty row {fmt_set(nodes_of(int(m)))} overloaded")
    return out


def pc_relaxation_value(pc: PcInstance, limit: int = 8) -> Fraction | None:
    """Optimal value of the prize-collecting relaxation, or None above ``limit`` nodes."""
    inst = pc.base
    n = inst.n
    if n > limit:
        return None
    T = inst.terminals
    others = [v for v in range(n) if v != pc.t_star]
    sets = []
    for r in range(1, len(others) + 1):
        sets.extend(frozenset(c) for c in itertools.combinations(others, r))
    m = len(inst.edges)
    obj = [c for _, _, c in inst.edges] + [pc.penalty(X) for X in sets]
    model = LpModel(obj)
    for S in sets:
        row = {i: 1 for i, (u, v, _) in enumerate(inst.edges) if (u in S) != (v in S)}
        if len(S & T) % 2:
            model.add(row, GE, 1)
        else:
            for j, X in enumerate(sets):
                if S <= X:
                    row[m + j] = 2
            model.add(row, GE, 2)
    res = simplex_solve(model)
    if res.status is not Status.OPTIMAL:
        raise RuntimeError(f"prize-collecting relaxation is {res.status.value}")
    return res.value


def _replay(d: DualSolution):
    """Yield the dual vector after each phase."""
    y: dict[frozenset[int], Fraction] = {}
    for ph in d.history:
        if ph.delta:
            for S in ph.active:
                y[S] = y.get(S, Fraction(0)) + ph.delta
        yield ph, dict(y)


def verify_pd_guarantees(
    pc: PcInstance, r: PdResult, limits: OracleLimits = DEFAULT_LIMITS, replay: bool = True
) -> PdAudit:
    inst = pc.base
    n = inst.n
    T = inst.terminals
    t = len(T)
    y = r.dual.y
    I = r.I
    J = list(r.J)
    odd_sum = sum((v for S, v in y.items() if len(S & T) % 2), Fraction(0))
    even_out = sum((v for S, v in y.items() if len(S & T) % 2 == 0 and not S <= I), Fraction(0))
    inside_I = sum((v for S, v in y.items() if S <= I), Fraction(0))
    costs = inst.costs
    cost_J = sum((costs[e] for e in J), Fraction(0))
    cost_M = r.M.cost(inst)
    checks: dict[str, bool | None] = {}
    details: dict[str, str] = {}

    checks["penalty-exact"] = r.penalty == 2 * inside_I
    details["penalty-exact"] = f"{fmt_q(r.penalty)} vs {fmt_q(2 * inside_I)}"
    tree_bound = (2 - Fraction(1, t - 1)) * odd_sum + 2 * even_out
    checks["tree-cost"] = cost_J <= tree_bound
    details["tree-cost"] = f"{fmt_q(cost_J)} <= {fmt_q(tree_bound)}"
    join_bound = (1 - Fraction(1, t - 1)) * odd_sum + 2 * even_out
    checks["join-cost"] = cost_M <= join_bound
    details["join-cost"] = f"{fmt_q(cost_M)} <= {fmt_q(join_bound)}"
    lmp_lhs = r.cost + r.rho * r.penalty
    checks["lmp"] = lmp_lhs <= r.rho * r.dual_value
    details["lmp"] = f"{fmt_q(lmp_lhs)} <= {fmt_q(r.rho * r.dual_value)}"
    if n <= limits.max_nodes_cut_enum:
        bad = _dual_violations(pc, y)
        checks["dual-feasible"] = not bad
        details["dual-feasible"] = "; ".join(bad) or "ok"
    else:
        checks["dual-feasible"] = None
    relax = pc_relaxation_value(pc, limits.max_nodes_tree_enum)
    checks["dual-vs-lp"] = None if relax is None else r.dual_value <= relax
    details["dual-vs-lp"] = "skipped" if relax is None else f"{fmt_q(r.dual_value)} <= {fmt_q(relax)}"

    # structural properties of the output
    Jset = set(J)
    covered = {pc.t_star} | {v for e in J for v in e}
    checks["tree-spans-T"] = (
        len(Jset) == len(covered) - 1 and T <= covered and pc.t_star in covered and _connected(covered, J)
    )
    F_ok = r.F.odd_nodes(n) == T and _connected(covered, r.F.support())
    checks["connected-tjoin"] = F_ok
    comps = set(r.dual.components)
    checks["duals-on-components"] = all(
        (S in comps) and pc.t_star not in S for S, v in y.items() if v
    )

    # per-phase degree counting and dual feasibility
    deg_ok = True
    feas_ok = True
    for ph, y_now in _replay(r.dual) if replay else ():
        C = [S for S in ph.active if len(S & T) % 2]
        Chat = [S for S in ph.active if len(S & T) % 2 == 0 and not S <= I]
        lhs = sum(len(_delta(J, S)) for S in C) + sum(len(_delta(J, S)) for S in Chat)
        rhs = (2 - Fraction(1, t - 1)) * len(C) + 2 * len(Chat)
        if lhs > rhs or len(C) > t - 1:
            deg_ok = False
            details["degree-count"] = f"phase with C={len(C)} Chat={len(Chat)}: {lhs} > {fmt_q(rhs)}"
        if n <= limits.max_nodes_cut_enum and _dual_violations(pc, y_now):
            feas_ok = False
    if replay:
        checks["degree-count"] = deg_ok
        checks["phase-feasible"] = feas_ok

    # every T-odd component has a cut edge whose removal leaves two D-even sides
    D = wrong_degree_set(J, T)
    hat = _hat_edges(J, D)
    claim_ok = True
    for S in r.dual.components:
        if pc.t_star in S or len(S & T) % 2 == 0:
            continue
        if not any(e in hat for e in _delta(J, S)):
            claim_ok = False
            details["odd-component-claim"] = f"component {fmt_set(S)}"
    checks["odd-component-claim"] = claim_ok
    return PdAudit(checks, details)


def _connected(nodes, edges) -> bool:
    nodes = set(nodes)
    if not nodes:
        return True
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    start = next(iter(nodes))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for w in adj.get(x, []):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen >= nodes


def _hat_edges(J: list[Edge], D: frozenset[int]) -> set[Edge]:
    """Tree edges whose removal leaves two sides each with an even number of D nodes."""
    out = set()
    for e in J:
        rest = [f for f in J if f != e]
        side = {e[0]}
        stack = [e[0]]
        adj: dict[int, list[int]] = {}
        for u, v in rest:
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
        while stack:
            x = stack.pop()
            for w in adj.get(x, []):
                if w not in side:
                    side.add(w)
                    stack.append(w)
        if len(side & D) % 2 == 0:
            out.add(e)
    return out


def gen_tight_example(t_size: int) -> Instance:
    """Even cycle on ``t_size`` terminals; the two edges at node 0 cost 1/2, the rest 1.

    Edges are listed around the cycle starting at node 0, node 0 is the root,
    and every node is a terminal (so no explicit penalties are needed).
    """
    if t_size < 4 or t_size % 2:
        raise ValueError("t_size must be even and at least 4")
    k = t_size
    edges = []
    for i in range(k):
        j = (i + 1) % k
        c = Fraction(1, 2) if 0 in (i, j) else Fraction(1)
        edges.append((i, j, c))
    return make_instance(k, edges, range(k), root=0)
