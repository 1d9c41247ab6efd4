"""Exact simplex over the rationals.

The working representation is a condensed dictionary kept in integer
(fraction-free) form: every entry is an integer and the true value is the
entry divided by a common positive denominator ``d``, which is the absolute
determinant of the current basis.  A pivot is one Bareiss-style update, so
all divisions are exact and no ``Fraction`` arithmetic happens inside the
loop.

Both primal and dual pivoting use Bland's rule with variables ordered by
creation, which guarantees termination.  Rows and columns can be appended to
a solved dictionary; the old basis stays valid, so cutting-plane loops
re-optimize with the dual simplex and column generation with the primal one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Mapping, Sequence

import numpy as np

LE, EQ, GE = "<=", "=", ">="


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class Row:
    coeffs: dict[int, Fraction]
    rel: str
    rhs: Fraction


@dataclass
class LpModel:
    """``min objective . x`` subject to ``rows``, ``x >= 0``."""

    objective: list[Fraction]
    rows: list[Row] = field(default_factory=list)

    @property
    def nvars(self) -> int:
        return len(self.objective)

    def add(self, coeffs: Mapping[int, Fraction | int], rel: str, rhs: Fraction | int) -> int:
        if rel not in (LE, EQ, GE):
            raise ValueError(f"bad relation {rel!r}")
        if any(not 0 <= j < self.nvars for j in coeffs):
            raise ValueError("row references an unknown variable")
        self.rows.append(Row({j: Fraction(a) for j, a in coeffs.items() if a}, rel, Fraction(rhs)))
        return len(self.rows) - 1


@dataclass
class LpResult:
    status: Status
    x: list[Fraction] | None = None
    value: Fraction | None = None
    duals: list[Fraction] | None = None


def _row_scale(values: Sequence[Fraction]) -> int:
    return lcm(*(Fraction(v).denominator for v in values)) if values else 1


class Dictionary:
    """Integer-preserving simplex dictionary with incremental rows/columns.

    Row 0 of ``T`` is the objective, column 0 the constants.  For basic
    variable ``basis[i-1]``::

        x = (T[i, 0] - sum_c T[i, c] * x_nonbasic[c-1]) / d

    and likewise ``z = (T[0, 0] - sum_c T[0, c] * x_c) / d`` for the
    (scaled) minimization objective.
    """

    def __init__(self, objective: Sequence[Fraction | int]) -> None:
        objective = [Fraction(c) for c in objective]
        self.cost_scale = _row_scale(objective)
        self.d = 1
        self.next_id = 0
        self.cost: dict[int, int] = {}
        self.structural: list[int] = []  # var ids of structural columns, by index
        self.basis: list[int] = []
        self.nonbasic: list[int] = []
        self.constraints: list[tuple[int, int]] = []  # (slack id, signed scale) per internal row
        self.T = np.zeros((1, 1), dtype=object)
        self.T[0, 0] = 0
        self._nbp: dict[int, int] = {}
        self._bp: dict[int, int] = {}
        for c in objective:
            self._new_structural({}, c)

    # -- construction -------------------------------------------------

    def _new_id(self) -> int:
        self.next_id += 1
        return self.next_id - 1

    def _scaled_cost(self, c: Fraction) -> int:
        c = Fraction(c)
        scaled = c * self.cost_scale
        if scaled.denominator != 1:
            g = scaled.denominator
            self.cost_scale *= g
            self.cost = {k: v * g for k, v in self.cost.items()}
            self.T[0, :] = self.T[0, :] * g
            scaled = c * self.cost_scale
        return int(scaled)

    def _new_structural(self, coeffs: Mapping[int, Fraction], c: Fraction) -> int:
        """Append a structural column; ``coeffs`` is keyed by internal row."""
        vid = self._new_id()
        cc = self._scaled_cost(c)
        self.cost[vid] = cc
        col = np.zeros(self.T.shape[0], dtype=object)
        col[:] = 0
        col[0] = -self.d * cc
        for k, a in coeffs.items():
            slack, sgn = self.constraints[k]
            a_int = a * sgn
            if a_int.denominator != 1:
                raise ValueError("column coefficient not integral after row scaling")
            a_int = int(a_int)
            if slack in self._nbp:
                col += self.T[:, self._nbp[slack]] * a_int
            else:
                col[self._bp[slack]] += a_int * self.d
        self.T = np.concatenate([self.T, col.reshape(-1, 1)], axis=1)
        self.nonbasic.append(vid)
        self.structural.append(vid)
        self._reindex()
        return len(self.structural) - 1

    def _reindex(self) -> None:
        self._nbp = {v: c + 1 for c, v in enumerate(self.nonbasic)}
        self._bp = {v: i + 1 for i, v in enumerate(self.basis)}

    def add_column(self, coeffs: Mapping[int, Fraction | int], cost: Fraction | int) -> int:
        """Add a structural variable; ``coeffs`` maps internal row -> coefficient.

        Internal rows are the ids returned by :meth:`add_row`.
        """
        scaled = {}
        for k, a in coeffs.items():
            if a:
                scaled[k] = Fraction(a)
        return self._new_structural(scaled, Fraction(cost))

    def add_row(self, coeffs: Mapping[int, Fraction | int], rel: str, rhs: Fraction | int) -> list[int]:
        """Append a constraint over structural indices; returns internal row ids."""
        coeffs = {j: Fraction(a) for j, a in coeffs.items() if a}
        rhs = Fraction(rhs)
        if rel == EQ:
            return self.add_row(coeffs, LE, rhs) + self.add_row(coeffs, GE, rhs)
        sgn = 1 if rel == LE else -1
        f = _row_scale([*coeffs.values(), rhs])
        a = {self.structural[j]: int(v * f) * sgn for j, v in coeffs.items()}
        b = int(rhs * f) * sgn
        base = np.zeros(self.T.shape[1], dtype=object)
        base[:] = 0
        base[0] = b
        for vid, coef in a.items():
            if vid in self._nbp:
                base[self._nbp[vid]] = coef
        new = base * self.d
        for vid, coef in a.items():
            if vid in self._bp:
                new = new - self.T[self._bp[vid], :] * coef
        slack = self._new_id()
        self.cost[slack] = 0
        self.T = np.concatenate([self.T, new.reshape(1, -1)], axis=0)
        self.basis.append(slack)
        self.constraints.append((slack, sgn * f))
        self._reindex()
        return [len(self.constraints) - 1]

    # -- pivoting -----------------------------------------------------

    def pivot(self, r: int, s: int) -> None:
        """Exchange basic row ``r`` with nonbasic column ``s`` (1-based)."""
        T = self.T
        p = T[r, s]
        col = T[:, s].copy()
        prow = T[r, :].copy()
        T = (T * p - np.outer(col, prow)) // self.d
        T[r, :] = prow
        T[:, s] = -col
        T[r, s] = self.d
        if p < 0:
            T = -T
            p = -p
        self.T = T
        self.d = p
        self.basis[r - 1], self.nonbasic[s - 1] = self.nonbasic[s - 1], self.basis[r - 1]
        self._reindex()

    def _dual_simplex(self) -> Status:
        T = self.T
        while True:
            T = self.T
            infeasible = [i for i in range(1, T.shape[0]) if T[i, 0] < 0]
            if not infeasible:
                return Status.OPTIMAL
            r = min(infeasible, key=lambda i: self.basis[i - 1])
            best = None
            for c in range(1, T.shape[1]):
                a = T[r, c]
                if a < 0:
                    if best is None:
                        best = c
                        continue
                    # ratio T[0,c]/a vs T[0,best]/T[r,best], both denominators negative
                    lhs = T[0, c] * T[r, best]
                    rhs = T[0, best] * a
                    if lhs < rhs or (lhs == rhs and self.nonbasic[c - 1] < self.nonbasic[best - 1]):
                        best = c
            if best is None:
                return Status.INFEASIBLE
            self.pivot(r, best)

    def _primal_simplex(self) -> Status:
        while True:
            T = self.T
            entering = [c for c in range(1, T.shape[1]) if T[0, c] > 0]
            if not entering:
                return Status.OPTIMAL
            s = min(entering, key=lambda c: self.nonbasic[c - 1])
            best = None
            for i in range(1, T.shape[0]):
                a = T[i, s]
                if a > 0:
                    if best is None:
                        best = i
                        continue
                    lhs = T[i, 0] * T[best, s]
                    rhs = T[best, 0] * a
                    if lhs < rhs or (lhs == rhs and self.basis[i - 1] < self.basis[best - 1]):
                        best = i
            if best is None:
                return Status.UNBOUNDED
            self.pivot(best, s)

    def _objective_row(self, cost: Mapping[int, int]) -> np.ndarray:
        T = self.T
        row = np.zeros(T.shape[1], dtype=object)
        row[:] = 0
        for i, vid in enumerate(self.basis, start=1):
            cb = cost.get(vid, 0)
            if cb:
                row = row + T[i, :] * cb
        for c, vid in enumerate(self.nonbasic, start=1):
            row[c] -= self.d * cost.get(vid, 0)
        return row

    def optimize(self) -> Status:
        T = self.T
        primal_ok = all(T[i, 0] >= 0 for i in range(1, T.shape[0]))
        dual_ok = all(T[0, c] <= 0 for c in range(1, T.shape[1]))
        if not primal_ok:
            if dual_ok:
                st = self._dual_simplex()
                if st is not Status.OPTIMAL:
                    return st
            else:
                # Phase 1: dual simplex on the clipped objective max(c, 0).
                clipped = {v: max(c, 0) for v, c in self.cost.items()}
                self.T[0, :] = self._objective_row(clipped)
                st = self._dual_simplex()
                self.T[0, :] = self._objective_row(self.cost)
                if st is not Status.OPTIMAL:
                    return st
        return self._primal_simplex()

    # -- readout ------------------------------------------------------

    def primal(self) -> list[Fraction]:
        x = []
        for vid in self.structural:
            if vid in self._bp:
                x.append(Fraction(self.T[self._bp[vid], 0], self.d))
            else:
                x.append(Fraction(0))
        return x

    def value(self) -> Fraction:
        return Fraction(self.T[0, 0], self.d * self.cost_scale)

    def row_dual(self, k: int) -> Fraction:
        """Marginal change of the optimum per unit increase of internal row ``k``'s rhs."""
        slack, scale = self.constraints[k]
        if slack in self._bp:
            return Fraction(0)
        t0 = self.T[0, self._nbp[slack]]
        return Fraction(t0 * scale, self.d * self.cost_scale)


def simplex_solve(model: LpModel) -> LpResult:
    """Solve ``model`` exactly; infeasible and unbounded are distinct outcomes."""
    dic = Dictionary(model.objective)
    internal = [dic.add_row(row.coeffs, row.rel, row.rhs) for row in model.rows]
    status = dic.optimize()
    if status is not Status.OPTIMAL:
        return LpResult(status)
    duals = [sum((dic.row_dual(k) for k in ks), Fraction(0)) for ks in internal]
    return LpResult(status, dic.primal(), dic.value(), duals)
