"""Exact simplex for small packing LPs.

Solves  max c.x  subject to  A x <= b,  x >= 0  exactly.  The tableau is
kept integral via Edmonds-style integer pivoting (the Bareiss identity makes
every division exact), which is far cheaper than normalizing a Fraction per
entry.  Pivoting is deterministic: Dantzig's rule (most negative reduced
cost, ties to the lowest index) while the objective improves, with a
permanent switch to Bland's anti-cycling rule after a run of degenerate
pivots, so termination is guaranteed and results are reproducible for a
fixed input ordering.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

ZERO = Fraction(0)

_DEGENERATE_RUN_LIMIT = 24


class SimplexUnbounded(Exception):
    """The objective can grow without bound (malformed instance)."""


def maximize(
    objective: Sequence[Fraction],
    rows: Sequence[Sequence[Fraction]],
    bounds: Sequence[Fraction],
) -> tuple[Fraction, list[Fraction]]:
    """Maximize objective.x over A x <= b, x >= 0.

    Requires b >= 0 (always true for the slack-capacity LPs built here), so
    the all-slack basis is feasible from the start.  Returns the optimal
    value and one optimal vertex.
    """
    n = len(objective)
    m = len(rows)
    # Row scaling clears denominators without changing the feasible set;
    # scaling the objective rescales only the reported value.
    obj = [Fraction(v) for v in objective]
    obj_scale = lcm(*(v.denominator for v in obj)) if obj else 1
    tableau: list[list[int]] = []
    for i in range(m):
        row = [Fraction(v) for v in rows[i]]
        b = Fraction(bounds[i])
        if b < 0:
            raise ValueError("negative bound: constraint system is not a packing LP")
        scale = lcm(b.denominator, *(v.denominator for v in row)) if row else b.denominator
        entries = [int(v * scale) for v in row] + [0] * m + [int(b * scale)]
        entries[n + i] = scale
        tableau.append(entries)
    cost = [int(-v * obj_scale) for v in obj] + [0] * (m + 1)
    basis = list(range(n, n + m))
    denom = 1  # true tableau = integer tableau / denom, with denom > 0

    use_bland = False
    degenerate_run = 0
    while True:
        enter = None
        if use_bland:
            for j in range(n + m):
                if cost[j] < 0:
                    enter = j
                    break
        else:
            best = 0
            for j in range(n + m):
                cj = cost[j]
                if cj < best:
                    best = cj
                    enter = j
        if enter is None:
            break
        leave = None
        lv_rhs = lv_col = None  # ratio of the current best leaving row
        for i in range(m):
            coeff = tableau[i][enter]
            if coeff > 0:
                rhs = tableau[i][-1]
                if (
                    leave is None
                    or rhs * lv_col < lv_rhs * coeff
                    or (rhs * lv_col == lv_rhs * coeff and basis[i] < basis[leave])
                ):
                    leave, lv_rhs, lv_col = i, rhs, coeff
        if leave is None:
            raise SimplexUnbounded(f"column {enter} is unbounded")
        if not use_bland:
            if lv_rhs == 0:
                degenerate_run += 1
                if degenerate_run >= _DEGENERATE_RUN_LIMIT:
                    use_bland = True
            else:
                degenerate_run = 0
        pivot = tableau[leave][enter]
        prow = tableau[leave]
        for i in range(m):
            if i == leave:
                continue
            row = tableau[i]
            factor = row[enter]
            if factor:
                tableau[i] = [
                    (v * pivot - factor * p) // denom for v, p in zip(row, prow)
                ]
            elif denom != pivot:
                tableau[i] = [v * pivot // denom for v in row]
        factor = cost[enter]
        if factor:
            cost = [(v * pivot - factor * p) // denom for v, p in zip(cost, prow)]
        elif denom != pivot:
            cost = [v * pivot // denom for v in cost]
        basis[leave] = enter
        denom = pivot

    solution = [ZERO] * n
    for i, var in enumerate(basis):
        if var < n:
            solution[var] = Fraction(tableau[i][-1], denom)
    return Fraction(cost[-1], denom * obj_scale), solution
