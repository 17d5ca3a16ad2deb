"""Dense two-phase simplex over exact rationals, for the tiny LPs of the bounds module."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

LE, GE, EQ = "<=", ">=", "="


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    value: Optional[Fraction]
    x: Optional[tuple[Fraction, ...]]


def _pivot(T: list[list[Fraction]], r: int, c: int) -> None:
    piv = T[r][c]
    row = [v / piv for v in T[r]]
    T[r] = row
    for i, other in enumerate(T):
        if i != r and other[c] != 0:
            f = other[c]
            T[i] = [a - f * b for a, b in zip(other, row)]


def _run(T, basis, cost, cols) -> str:
    """Minimize ``cost`` over the tableau using Bland's rule on columns ``cols``."""
    while True:
        entering = None
        for j in cols:
            if j in basis:
                continue
            red = cost[j] - sum(cost[basis[i]] * T[i][j] for i in range(len(T)))
            if red < 0:
                entering = j
                break
        if entering is None:
            return "optimal"
        best = None
        for i, row in enumerate(T):
            if row[entering] > 0:
                ratio = row[-1] / row[entering]
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded"
        r = best[1]
        _pivot(T, r, entering)
        basis[r] = entering


def solve_lp(c: Sequence, A: Sequence[Sequence], senses: Sequence[str], b: Sequence) -> LPResult:
    """Minimize ``c.x`` subject to ``A x (senses) b`` and ``x >= 0``."""
    nv = len(c)
    rows = []
    for a, s, rhs in zip(A, senses, b):
        a = [Fraction(v) for v in a]
        rhs = Fraction(rhs)
        if rhs < 0:
            a = [-v for v in a]
            rhs = -rhs
            s = {LE: GE, GE: LE, EQ: EQ}[s]
        rows.append((a, s, rhs))
    n_slack = sum(1 for _, s, _ in rows if s != EQ)
    n_art = sum(1 for _, s, _ in rows if s != LE)
    width = nv + n_slack + n_art
    T, basis = [], []
    si, ai = nv, nv + n_slack
    art_cols = []
    for a, s, rhs in rows:
        row = a + [Fraction(0)] * (n_slack + n_art) + [rhs]
        if s == LE:
            row[si] = Fraction(1)
            basis.append(si)
            si += 1
        else:
            if s == GE:
                row[si] = Fraction(-1)
                si += 1
            row[ai] = Fraction(1)
            basis.append(ai)
            art_cols.append(ai)
            ai += 1
        T.append(row)

    if art_cols:
        phase1 = [Fraction(0)] * width
        for j in art_cols:
            phase1[j] = Fraction(1)
        _run(T, basis, phase1, range(width))
        if sum(T[i][-1] for i, j in enumerate(basis) if j in art_cols) > 0:
            return LPResult("infeasible", None, None)
        # drive zero-level artificials out of the basis, dropping redundant rows
        for i in reversed(range(len(T))):
            if basis[i] in art_cols:
                col = next((j for j in range(nv + n_slack) if T[i][j] != 0), None)
                if col is None:
                    del T[i]
                    del basis[i]
                else:
                    _pivot(T, i, col)
                    basis[i] = col

    cost = [Fraction(v) for v in c] + [Fraction(0)] * (width - nv)
    status = _run(T, basis, cost, range(nv + n_slack))
    if status != "optimal":
        return LPResult(status, None, None)
    x = [Fraction(0)] * nv
    for i, j in enumerate(basis):
        if j < nv:
            x[j] = T[i][-1]
    value = sum((ci * xi for ci, xi in zip(cost, x)), Fraction(0))
    return LPResult("optimal", value, tuple(x))
