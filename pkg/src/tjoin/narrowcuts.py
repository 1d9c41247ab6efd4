"""Narrow T-odd cuts, the partition construction, and correction flows.

For the LP optimum ``x``, a T-odd set ``S`` not containing the designated
terminal ``t_hat`` is tau-narrow when ``x(delta(S)) < 1 + tau``.  For
``tau <= 1`` these sets form a laminar family, and for ``tau <= 1/2`` a
flow network distributes ``x`` into vectors ``f^U`` with

1. ``f^U >= 0``,
2. ``sum_U f^U <= x``,
3. ``f^U(delta(U)) >= 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import subsets
from .flow import max_flow
from .instance import Edge, Instance, fmt_edge, fmt_q, fmt_set, nodes_of
from .oracle import DEFAULT_LIMITS, OracleLimits

HALF = Fraction(1, 2)


class LaminarityError(RuntimeError):
    """Two narrow cuts cross although tau <= 1."""


class EmptyBlockError(RuntimeError):
    """A block of the subfamily partition is empty although tau <= 1/2."""


class CorrectionFlowError(RuntimeError):
    """The correction network does not saturate although tau <= 1/2."""


def x_delta(x: dict[Edge, Fraction], S: Iterable[int]) -> Fraction:
    S = set(S)
    return sum((v for (a, b), v in x.items() if (a in S) != (b in S)), Fraction(0))


def crosses(R: frozenset[int], S: frozenset[int]) -> bool:
    """Intersecting and neither contains the other (the union never covers V here)."""
    return bool(R & S) and not R <= S and not S <= R


@dataclass(frozen=True)
class NarrowCutFamily:
    t_hat: int
    tau: Fraction
    cuts: tuple[frozenset[int], ...]
    values: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.cuts)

    def value_of(self, U: frozenset[int]) -> Fraction:
        return self.values[self.cuts.index(U)]

    def report_lines(self) -> list[str]:
        return [f"cut {fmt_set(S)} xdelta {fmt_q(v)}" for S, v in zip(self.cuts, self.values)]


def enumerate_narrow_cuts(
    inst: Instance,
    x_star: dict[Edge, Fraction],
    t_hat: int | None = None,
    tau: Fraction = HALF,
    limits: OracleLimits = DEFAULT_LIMITS,
) -> NarrowCutFamily:
    """All T-odd ``S`` avoiding ``t_hat`` with ``x(delta(S)) < 1 + tau``.

    Cuts are ordered by size, then by bitmask.  For ``tau <= 1`` the family
    is checked pairwise and a crossing pair raises :class:`LaminarityError`.
    """
    tau = Fraction(tau)
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    n = inst.n
    if n > limits.max_nodes_cut_enum:
        raise ValueError(f"{n} nodes exceeds the cut enumeration limit {limits.max_nodes_cut_enum}")
    if t_hat is None:
        t_hat = inst.root_node
    if t_hat not in inst.terminals:
        raise ValueError("t_hat must be a terminal")
    table, L = subsets.fractional_boundary(n, x_star)
    all_masks = subsets.masks(n)
    bound = (1 + tau) * L
    odd = subsets.parity(n, inst.t_mask) == 1
    avoid = (all_masks & (1 << t_hat)) == 0
    # x(delta) * L < (1 + tau) * L, compared exactly with integers
    if table.dtype != object and int(table.max(initial=0)) * bound.denominator >= 1 << 62:
        table = table.astype(object)
    lhs = table * bound.denominator
    sel = odd & avoid & (lhs < bound.numerator)
    found = [(int(m), Fraction(int(v), L)) for m, v in zip(all_masks[sel], table[sel])]
    found.sort(key=lambda mv: (bin(mv[0]).count("1"), mv[0]))
    cuts = tuple(nodes_of(m) for m, _ in found)
    values = tuple(v for _, v in found)
    fam = NarrowCutFamily(t_hat, tau, cuts, values)
    if tau <= 1:
        _check_laminar(inst, x_star, fam)
    return fam


def _check_laminar(inst: Instance, x: dict[Edge, Fraction], fam: NarrowCutFamily) -> None:
    cuts = fam.cuts
    for i in range(len(cuts)):
        for j in range(i + 1, len(cuts)):
            R, S = cuts[i], cuts[j]
            if not crosses(R, S):
                continue
            if len(R & S & inst.terminals) % 2:
                a, b = R - S, S - R
                names = ("R-S", "S-R")
            else:
                a, b = R & S, R | S
                names = ("R&S", "R|S")
            raise LaminarityError(
                f"narrow cuts {fmt_set(R)} and {fmt_set(S)} cross at tau={fmt_q(fam.tau)}: "
                f"x(delta(R))={fmt_q(fam.values[i])}, x(delta(S))={fmt_q(fam.values[j])}, "
                f"x(delta({names[0]}))={fmt_q(x_delta(x, a))}, x(delta({names[1]}))={fmt_q(x_delta(x, b))}"
            )


def maximal_proper_subsets(U: frozenset[int], family: Sequence[frozenset[int]]) -> list[frozenset[int]]:
    inside = [W for W in family if W < U]
    return [W for W in inside if not any(W < W2 for W2 in inside)]


def partition_from_subfamily(
    L_prime: Sequence[frozenset[int]], n: int, t_hat: int, tau: Fraction | None = None
) -> list[frozenset[int]]:
    """Blocks ``g(U)`` for ``U`` in ``L_prime`` (in order), then ``V`` minus their union.

    ``g(U)`` is the part of ``U`` outside every smaller member.  With
    ``tau <= 1/2`` (or ``tau`` unknown) an empty block raises
    :class:`EmptyBlockError`; otherwise empty blocks are returned as is.
    """
    fam = [frozenset(U) for U in L_prime]
    for U in fam:
        if t_hat in U:
            raise ValueError(f"member {fmt_set(U)} contains t_hat")
    for i in range(len(fam)):
        for j in range(i + 1, len(fam)):
            if crosses(fam[i], fam[j]):
                raise ValueError(f"subfamily is not laminar: {fmt_set(fam[i])} and {fmt_set(fam[j])} cross")
    strict = tau is None or Fraction(tau) <= HALF
    blocks = []
    for U in fam:
        subs = maximal_proper_subsets(U, fam)
        g = U.difference(*subs)
        if not g and strict:
            raise EmptyBlockError(
                f"g({fmt_set(U)}) is empty; maximal proper subsets: "
                + ", ".join(fmt_set(W) for W in subs)
            )
        blocks.append(g)
    rest = frozenset(range(n)).difference(*fam)
    blocks.append(rest)
    return blocks


def verify_partition_inequality(x: dict[Edge, Fraction], partition: Sequence[Iterable[int]]) -> bool:
    """``x(delta(P_1, ..., P_k)) >= k - 1`` for the nonempty blocks given."""
    blocks = [frozenset(P) for P in partition if P]
    where = {}
    for i, P in enumerate(blocks):
        for v in P:
            if v in where:
                raise ValueError(f"node {v} is in two blocks")
            where[v] = i
    across = sum((val for (a, b), val in x.items() if where.get(a) != where.get(b)), Fraction(0))
    return across >= len(blocks) - 1


@dataclass
class CorrectionFlows:
    family: NarrowCutFamily
    f: dict[frozenset[int], dict[Edge, Fraction]]
    value: Fraction
    saturated: bool
    cut_capacity: Fraction
    cut_members: list[frozenset[int]] = field(default_factory=list)  # v_U on the source side
    cut_edges: list[Edge] = field(default_factory=list)  # v_e on the source side

    def report_lines(self) -> list[str]:
        lines = self.family.report_lines()
        for U in self.family.cuts:
            for e, v in sorted(self.f.get(U, {}).items()):
                if v:
                    lines.append(f"f {fmt_set(U)} {fmt_edge(e)} {fmt_q(v)}")
        lines.append(f"flow {fmt_q(self.value)} of {len(self.family)}")
        return lines


def correction_flows(inst: Instance, x_star: dict[Edge, Fraction], family: NarrowCutFamily) -> CorrectionFlows:
    """Max flow through source -> v_U -> v_e -> sink; ``f^U_e`` is the flow on ``v_U -> v_e``.

    Arcs ``v_U -> v_e`` stand in for infinite capacity with ``|family|``,
    which no flow can exceed.  Non-saturation is a hard error when
    ``tau <= 1/2`` and a reported outcome otherwise.
    """
    cuts = list(family.cuts)
    k = len(cuts)
    support = sorted(e for e, v in x_star.items() if v)
    s, t = 0, 1
    u_node = {U: 2 + i for i, U in enumerate(cuts)}
    e_node = {e: 2 + k + j for j, e in enumerate(support)}
    arcs: list[tuple[int, int, Fraction]] = []
    for U in cuts:
        arcs.append((s, u_node[U], Fraction(1)))
    mid: list[tuple[frozenset[int], Edge, int]] = []
    for U in cuts:
        for e in support:
            if (e[0] in U) != (e[1] in U):
                mid.append((U, e, len(arcs)))
                arcs.append((u_node[U], e_node[e], Fraction(k)))
    for e in support:
        arcs.append((e_node[e], t, x_star[e]))
    res = max_flow(2 + k + len(support), arcs, s, t)
    f: dict[frozenset[int], dict[Edge, Fraction]] = {U: {} for U in cuts}
    for U, e, a in mid:
        if res.flow[a]:
            f[U][e] = res.flow[a]
    saturated = res.value == k
    side = res.source_side
    out = CorrectionFlows(
        family,
        f,
        res.value,
        saturated,
        res.cut_capacity(arcs),
        [U for U in cuts if u_node[U] in side],
        [e for e in support if e_node[e] in side],
    )
    if not saturated and family.tau <= HALF:
        raise CorrectionFlowError(
            f"correction flow {fmt_q(res.value)} < {k} at tau={fmt_q(family.tau)}; "
            f"min cut members: " + ", ".join(fmt_set(U) for U in out.cut_members)
        )
    return out


def check_flow_conditions(x_star: dict[Edge, Fraction], flows: CorrectionFlows) -> list[str]:
    """Problems with the three conditions on ``f^U`` (empty when all hold)."""
    problems = []
    total: dict[Edge, Fraction] = {}
    for U in flows.family.cuts:
        fU = flows.f.get(U, {})
        for e, v in fU.items():
            if v < 0:
                problems.append(f"f^{fmt_set(U)} negative on {fmt_edge(e)}")
            if (e[0] in U) == (e[1] in U) and v:
                problems.append(f"f^{fmt_set(U)} uses {fmt_edge(e)} outside the cut")
            total[e] = total.get(e, Fraction(0)) + v
        across = sum((v for e, v in fU.items() if (e[0] in U) != (e[1] in U)), Fraction(0))
        if across < 1:
            problems.append(f"f^{fmt_set(U)}(delta) = {fmt_q(across)} < 1")
    for e, v in total.items():
        if v > x_star.get(e, Fraction(0)):
            problems.append(f"sum of f on {fmt_edge(e)} = {fmt_q(v)} exceeds x")
    return problems
