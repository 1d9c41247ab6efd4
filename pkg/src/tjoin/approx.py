"""The two LP-based approximation algorithms and their executable certificates.

``christofides_tjoin`` is the MST-plus-D-join algorithm (ratio 5/3).
``aks_tjoin`` decomposes the LP optimum into spanning trees and fixes the
parity of each tree with a minimum D-join, returning the cheapest result
(ratio 13/8 for ``|T| >= 4``).

Each D-join is backed by a fractional D-join ``y`` whose feasibility is
audited over every D-odd cut; its cost bounds the cost of the D-join.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import subsets
from .decompose import SpanningTreeDecomposition, decompose_spanning_trees, sample_tree
from .instance import (
    Edge,
    EdgeMultiset,
    Instance,
    combine,
    fmt_q,
    fmt_set,
    kruskal,
    nodes_of,
    validate_connected_tjoin,
    wrong_degree_set,
)
from .joins import min_cost_djoin
from .lp import Lp1Solution, solve_lp1
from .narrowcuts import CorrectionFlows, correction_flows, enumerate_narrow_cuts
from .oracle import DEFAULT_LIMITS, OracleLimits

FIVE_THIRDS = Fraction(5, 3)
THIRTEEN_EIGHTHS = Fraction(13, 8)
DEFAULT_TAU, DEFAULT_ALPHA, DEFAULT_BETA = Fraction(1, 2), Fraction(1, 5), Fraction(2, 5)
CORRECTION_SLACK = Fraction(1, 40)


class CertificateError(RuntimeError):
    """A fractional D-join misses a D-odd cut."""

    def __init__(self, witness: frozenset[int], value: Fraction) -> None:
        self.witness = witness
        self.value = value
        super().__init__(f"D-odd cut {fmt_set(witness)} has y(delta) = {fmt_q(value)} < 1")


def check_parameters(tau, alpha, beta) -> tuple[Fraction, Fraction, Fraction]:
    """Validate ``alpha + 2 beta >= 1`` and ``tau == (1 - 2 alpha)/beta - 1`` exactly."""
    tau, alpha, beta = Fraction(tau), Fraction(alpha), Fraction(beta)
    if alpha < 0 or beta <= 0:
        raise ValueError("need alpha >= 0 and beta > 0")
    if alpha + 2 * beta < 1:
        raise ValueError(f"alpha + 2 beta = {fmt_q(alpha + 2 * beta)} < 1")
    if tau != (1 - 2 * alpha) / beta - 1:
        raise ValueError(
            f"tau = {fmt_q(tau)} but (1 - 2 alpha)/beta - 1 = {fmt_q((1 - 2 * alpha) / beta - 1)}"
        )
    if tau > Fraction(1, 2):
        raise ValueError("tau must be at most 1/2 for the correction vectors to exist")
    return tau, alpha, beta


@dataclass
class CertificateAudit:
    y: dict[Edge, Fraction]
    cost_y: Fraction
    cost_M: Fraction | None
    cuts_checked: int
    min_slack: Fraction | None  # min over D-odd U of y(delta(U)) - 1

    @property
    def ok(self) -> bool:
        return (self.min_slack is None or self.min_slack >= 0) and (
            self.cost_M is None or self.cost_M <= self.cost_y
        )


def audit_djoin_cuts(n: int, y: dict[Edge, Fraction], D: frozenset[int]) -> tuple[int, Fraction | None, frozenset[int] | None]:
    """Check ``y(delta(U)) >= 1`` for every D-odd ``U``.

    Returns (number checked, minimum slack, a worst witness).  Complements
    give the same cut, so only sets avoiding node ``n-1`` are scanned.
    """
    if not D:
        return 0, None, None
    table, L = subsets.fractional_boundary(n, y)
    all_masks = subsets.masks(n)
    sel = (subsets.parity(n, sum(1 << v for v in D)) == 1) & ((all_masks >> (n - 1)) & 1 == 0)
    vals = table[sel]
    i = int(np.argmin(vals))
    worst = Fraction(int(vals[i]), L)
    return int(sel.sum()), worst - 1, nodes_of(int(all_masks[sel][i]))


def fractional_djoin_certificate(
    inst: Instance,
    x_star: dict[Edge, Fraction],
    J,
    D=None,
    tau=DEFAULT_TAU,
    alpha=DEFAULT_ALPHA,
    beta=DEFAULT_BETA,
    flows: CorrectionFlows | None = None,
    correction: bool = True,
    M: EdgeMultiset | None = None,
) -> tuple[dict[Edge, Fraction], CertificateAudit]:
    """``y = alpha chi(J) + beta x + z`` audited as a fractional D-join.

    ``z`` adds ``(1 - 2 alpha - beta x(delta(U))) f^U`` for each D-odd narrow
    cut ``U``.  With ``correction=False`` (the 1/3, 1/3 certificate) no
    correction is added and the parameters are taken as given.
    """
    J = list(J)
    if D is None:
        D = wrong_degree_set(J, inst.terminals)
    D = frozenset(D)
    alpha, beta = Fraction(alpha), Fraction(beta)
    if correction:
        tau, alpha, beta = check_parameters(tau, alpha, beta)
    y: dict[Edge, Fraction] = {}
    for e, v in x_star.items():
        if v:
            y[e] = beta * v
    for e in J:
        y[e] = y.get(e, Fraction(0)) + alpha
    if correction and D:
        if flows is None:
            fam = enumerate_narrow_cuts(inst, x_star, tau=tau)
            flows = correction_flows(inst, x_star, fam)
        for U, val in zip(flows.family.cuts, flows.family.values):
            if len(U & D) % 2 == 0:
                continue
            coef = 1 - 2 * alpha - beta * val
            for e, f in flows.f.get(U, {}).items():
                y[e] = y.get(e, Fraction(0)) + coef * f
    checked, slack, witness = audit_djoin_cuts(inst.n, y, D)
    if slack is not None and slack < 0:
        raise CertificateError(witness, slack + 1)
    costs = inst.costs
    cost_y = sum((v * costs[e] for e, v in y.items()), Fraction(0))
    cost_M = M.cost(inst) if M is not None else None
    audit = CertificateAudit(y, cost_y, cost_M, checked, slack)
    if cost_M is not None and cost_M > cost_y:
        raise RuntimeError(f"D-join cost {fmt_q(cost_M)} exceeds its fractional bound {fmt_q(cost_y)}")
    return y, audit


@dataclass
class TreeRow:
    lam: Fraction
    tree: tuple[Edge, ...]
    tree_cost: Fraction
    d_size: int
    djoin_cost: Fraction
    f_cost: Fraction
    cost_y: Fraction | None = None


@dataclass
class SolveReport:
    algorithm: str
    solution: EdgeMultiset
    cost: Fraction
    lp_value: Fraction | None
    ratio: Fraction | None
    tree: tuple[Edge, ...]
    D: frozenset[int]
    per_tree: list[TreeRow] = field(default_factory=list)
    certificates: list[CertificateAudit] = field(default_factory=list)
    aggregate_y: Fraction | None = None  # sum_i lambda_i cost(y_i)
    aggregate_bound: Fraction | None = None  # (alpha + beta + 1/40) cost(x*)
    lp: Lp1Solution | None = None
    decomposition: SpanningTreeDecomposition | None = None
    flows: CorrectionFlows | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def bound(self) -> Fraction:
        return FIVE_THIRDS if self.algorithm == "five-thirds" else THIRTEEN_EIGHTHS

    @property
    def aggregate_ok(self) -> bool | None:
        if self.aggregate_y is None:
            return None
        return self.aggregate_y <= self.aggregate_bound

    def report_lines(self) -> list[str]:
        lines = [f"cost {fmt_q(self.cost)}"]
        if self.lp_value is not None:
            lines.append(f"lp {fmt_q(self.lp_value)}")
        if self.ratio is not None:
            lines.append(f"ratio {fmt_q(self.ratio)} (~{float(self.ratio):.6f})")
        for e, m in sorted(self.solution.mult.items()):
            lines.append(f"edge {e[0]} {e[1]} {m}")
        for i, row in enumerate(self.per_tree):
            lines.append(
                f"tree-row {i} lambda {fmt_q(row.lam)} tree {fmt_q(row.tree_cost)} "
                f"D {row.d_size} join {fmt_q(row.djoin_cost)} F {fmt_q(row.f_cost)}"
            )
        if self.aggregate_y is not None:
            lines.append(f"aggregate {fmt_q(self.aggregate_y)} bound {fmt_q(self.aggregate_bound)}")
        lines.extend(f"note {n}" for n in self.notes)
        return lines


def _ratio(cost: Fraction, lp_value: Fraction | None) -> Fraction | None:
    if lp_value is None:
        return None
    if lp_value == 0:
        return Fraction(1) if cost == 0 else None
    return cost / lp_value


def _require(inst: Instance) -> None:
    if not inst.is_metric:
        raise ValueError("algorithm needs a metric instance")
    T = inst.terminals
    if not T or len(T) % 2:
        raise ValueError("T must be nonempty and even")


def christofides_tjoin(
    inst: Instance, with_lp: bool = True, lp: Lp1Solution | None = None, limits: OracleLimits = DEFAULT_LIMITS
) -> SolveReport:
    """MST ``J``, minimum D-join ``M`` for its wrong-degree set ``D``, output ``J + M``."""
    _require(inst)
    costs = inst.costs
    J = tuple(kruskal(inst.n, inst.edge_list, lambda e: costs[e]))
    D = wrong_degree_set(J, inst.terminals)
    M = min_cost_djoin(inst, D)
    F = combine(J, M)
    cost = F.cost(inst)
    if with_lp and lp is None:
        lp = solve_lp1(inst, limits=limits)
    report = SolveReport("five-thirds", F, cost, lp.value if lp else None, None, J, D, lp=lp)
    report.ratio = _ratio(cost, report.lp_value)
    if lp is not None:
        third = Fraction(1, 3)
        _, audit = fractional_djoin_certificate(
            inst, lp.x_star, J, D, alpha=third, beta=third, correction=False, M=M
        )
        report.certificates.append(audit)
    assert validate_connected_tjoin(inst, F).ok
    return report


def aks_tjoin(
    inst: Instance,
    tau=DEFAULT_TAU,
    alpha=DEFAULT_ALPHA,
    beta=DEFAULT_BETA,
    lp: Lp1Solution | None = None,
    certify: bool = True,
    seed: int | None = None,
    limits: OracleLimits = DEFAULT_LIMITS,
) -> SolveReport:
    """Best of ``J_i + M_i`` over the spanning trees of the LP decomposition.

    With ``seed`` given, one tree is drawn with probability ``lambda_i``
    instead (the randomized variant); per-tree data still covers all trees.
    """
    _require(inst)
    tau, alpha, beta = check_parameters(tau, alpha, beta)
    notes = []
    if len(inst.terminals) == 2:
        msg = "|T| = 2: only the 5/3 bound is claimed for this input"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
    if lp is None:
        lp = solve_lp1(inst, limits=limits)
    dec = decompose_spanning_trees(inst.n, lp.x_star)
    flows = None
    if certify:
        fam = enumerate_narrow_cuts(inst, lp.x_star, tau=tau, limits=limits)
        flows = correction_flows(inst, lp.x_star, fam)
    costs = inst.costs
    rows: list[TreeRow] = []
    sols: list[tuple[EdgeMultiset, frozenset[int]]] = []
    audits: list[CertificateAudit] = []
    for lam, tree in dec.terms:
        D = wrong_degree_set(tree, inst.terminals)
        M = min_cost_djoin(inst, D)
        F = combine(tree, M)
        tree_cost = sum((costs[e] for e in tree), Fraction(0))
        row = TreeRow(lam, tree, tree_cost, len(D), M.cost(inst), F.cost(inst))
        if certify:
            _, audit = fractional_djoin_certificate(
                inst, lp.x_star, tree, D, tau, alpha, beta, flows=flows, M=M
            )
            row.cost_y = audit.cost_y
            audits.append(audit)
        rows.append(row)
        sols.append((F, D))
    if seed is not None:
        chosen = dec.trees().index(sample_tree(dec, seed))
    else:
        chosen = min(range(len(rows)), key=lambda i: (rows[i].f_cost, i))
    F, D = sols[chosen]
    report = SolveReport(
        "thirteen-eighths",
        F,
        rows[chosen].f_cost,
        lp.value,
        _ratio(rows[chosen].f_cost, lp.value),
        rows[chosen].tree,
        D,
        rows,
        audits,
        lp=lp,
        decomposition=dec,
        flows=flows,
        notes=notes,
    )
    if certify:
        report.aggregate_y = sum((r.lam * r.cost_y for r in rows), Fraction(0))
        report.aggregate_bound = (alpha + beta + CORRECTION_SLACK) * lp.value
    assert validate_connected_tjoin(inst, F).ok
    return report


@dataclass
class OddProbabilityReport:
    checked: int
    violations: list[tuple[frozenset[int], Fraction, Fraction]]  # (U, probability, x(delta(U)) - 1)
    max_probability_gap: Fraction | None = None  # max of probability - (x(delta) - 1)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_fact_odd_probability(
    inst: Instance,
    x_star: dict[Edge, Fraction],
    decomposition: SpanningTreeDecomposition,
    t_hat: int | None = None,
    limits: OracleLimits = DEFAULT_LIMITS,
) -> OddProbabilityReport:
    """For each T-odd ``U`` (avoiding ``t_hat``) with ``x(delta(U)) < 2``, check that the
    total weight of trees whose wrong-degree set is odd on ``U`` is at most ``x(delta(U)) - 1``."""
    n = inst.n
    if n > limits.max_nodes_cut_enum:
        raise ValueError("instance too large for exhaustive cut enumeration")
    if t_hat is None:
        t_hat = inst.root_node
    table, L = subsets.fractional_boundary(n, x_star)
    table = table.astype(object)
    all_masks = subsets.masks(n)
    sel = (
        (subsets.parity(n, inst.t_mask) == 1)
        & ((all_masks >> t_hat) & 1 == 0)
        & (table < 2 * L)
    )
    lams = decomposition.lambdas()
    lam_ints, K = subsets.scale(lams)
    prob = np.zeros(int(sel.sum()), dtype=object)
    prob[:] = 0
    for w, tree in zip(lam_ints, decomposition.trees()):
        D = wrong_degree_set(tree, inst.terminals)
        par = subsets.parity(n, sum(1 << v for v in D))[sel]
        prob = prob + par.astype(object) * w
    masks_sel = all_masks[sel]
    xs = table[sel]
    violations = []
    gap = None
    for m, p, xv in zip(masks_sel, prob, xs):
        pr = Fraction(int(p), K)
        rhs = Fraction(int(xv), L) - 1
        g = pr - rhs
        gap = g if gap is None or g > gap else gap
        if pr > rhs:
            violations.append((nodes_of(int(m)), pr, rhs))
    return OddProbabilityReport(len(masks_sel), violations, gap)
