"""Exact linear and integer programming over the rationals.

Two-phase tableau simplex with Bland's rule (no cycling), and a depth-first
branch-and-bound for lattice-point feasibility in bounded polyhedra.
Variables are free unless bounded through the constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple | None = None
    value: Fraction | None = None


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.rows = rows
        self.basis = basis

    def pivot(self, r: int, c: int) -> None:
        row = self.rows[r]
        inv = 1 / row[c]
        row = [x * inv for x in row]
        self.rows[r] = row
        for i, other in enumerate(self.rows):
            if i != r and other[c] != 0:
                f = other[c]
                self.rows[i] = [x - f * y for x, y in zip(other, row)]
        self.basis[r] = c

    def run(self, cost: list[Fraction], allowed: int) -> str:
        """Minimise cost . y over columns < allowed.  cost has len ncols."""
        while True:
            # reduced costs
            red = list(cost)
            for i, b in enumerate(self.basis):
                cb = cost[b]
                if cb != 0:
                    row = self.rows[i]
                    for j in range(allowed):
                        red[j] -= cb * row[j]
            enter = next((j for j in range(allowed) if red[j] < 0), None)
            if enter is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], enter)


def linprog(
    c: Sequence,
    a_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    a_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    maximize: bool = True,
) -> LPResult:
    """Optimise c . x subject to a_ub x <= b_ub and a_eq x = b_eq, x free."""
    n = len(c)
    cons = [(list(map(Fraction, r)), Fraction(b), False) for r, b in zip(a_ub, b_ub)]
    cons += [(list(map(Fraction, r)), Fraction(b), True) for r, b in zip(a_eq, b_eq)]
    n_slack = sum(1 for _, _, eq in cons if not eq)
    # columns: x+ (n), x- (n), slacks, artificials
    width = 2 * n + n_slack
    rows = []
    s = 0
    for coef, rhs, eq in cons:
        row = coef + [-x for x in coef] + [Fraction(0)] * n_slack
        if not eq:
            row[2 * n + s] = Fraction(1)
            s += 1
        if rhs < 0:
            row = [-x for x in row]
            rhs = -rhs
        rows.append(row + [rhs])
    m = len(rows)
    total = width + m
    tab_rows = []
    for i, row in enumerate(rows):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        tab_rows.append(row[:-1] + art + [row[-1]])
    tab = _Tableau(tab_rows, [width + i for i in range(m)])
    phase1 = [Fraction(0)] * width + [Fraction(1)] * m
    tab.run(phase1, total)
    infeas = sum(row[-1] for row, b in zip(tab.rows, tab.basis) if b >= width)
    if infeas > 0:
        return LPResult(INFEASIBLE)
    # drive artificials out of the basis
    keep = []
    for i in range(len(tab.rows)):
        if tab.basis[i] >= width:
            col = next((j for j in range(width) if tab.rows[i][j] != 0), None)
            if col is None:
                continue
            tab.pivot(i, col)
        keep.append(i)
    tab.rows = [tab.rows[i] for i in keep]
    tab.basis = [tab.basis[i] for i in keep]
    sign = -1 if maximize else 1
    cost = [sign * Fraction(x) for x in c] + [-sign * Fraction(x) for x in c]
    cost += [Fraction(0)] * (total - 2 * n)
    status = tab.run(cost, width)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    y = [Fraction(0)] * total
    for row, b in zip(tab.rows, tab.basis):
        y[b] = row[-1]
    x = tuple(y[j] - y[n + j] for j in range(n))
    value = sum(Fraction(ci) * xi for ci, xi in zip(c, x))
    return LPResult(OPTIMAL, x, value)


def feasible_point(a_ub, b_ub, a_eq=(), b_eq=(), n: int | None = None) -> tuple | None:
    if n is None:
        n = len(a_ub[0]) if a_ub else len(a_eq[0])
    res = linprog([0] * n, a_ub, b_ub, a_eq, b_eq)
    return res.x if res.status == OPTIMAL else None


def integer_point(
    a_ub: Sequence[Sequence],
    b_ub: Sequence,
    a_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    n: int | None = None,
    max_nodes: int = 200_000,
) -> tuple | None:
    """Find an integer x with a_ub x <= b_ub, a_eq x = b_eq, or None.

    The feasible region must be bounded; otherwise branching need not
    terminate and ``max_nodes`` raises.  Exploration order is fixed, so the
    witness is deterministic.
    """
    if n is None:
        n = len(a_ub[0]) if a_ub else len(a_eq[0])
    stack = [(list(a_ub), list(b_ub))]
    nodes = 0
    while stack:
        ub, bb = stack.pop()
        nodes += 1
        if nodes > max_nodes:
            raise RuntimeError("branch-and-bound node limit exceeded")
        x = feasible_point(ub, bb, a_eq, b_eq, n)
        if x is None:
            continue
        frac = next((i for i, xi in enumerate(x) if xi.denominator != 1), None)
        if frac is None:
            return tuple(int(xi) for xi in x)
        e = [0] * n
        e[frac] = 1
        lo = math.floor(x[frac])
        # push the upper branch first so the lower branch is explored first
        stack.append((ub + [[-v for v in e]], bb + [-(lo + 1)]))
        stack.append((ub + [e], bb + [lo]))
    return None
