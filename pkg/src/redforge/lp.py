"""Exact rational linear algebra and a small two-phase simplex solver.

Everything runs over Fractions; no floating point touches any certificate.
The simplex uses Bland's rule, so it terminates without perturbation, and
the feasibility/optimality claims are re-derivable from the returned basis.
Problem sizes here are tiny (tens of variables), so clarity beats speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

try:  # gmpy2's exact rationals pivot an order of magnitude faster
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction


def exact_rank(rows: Sequence[Sequence]) -> int:
    """Rank of a rational matrix by Gaussian elimination."""
    mat = [[_Q(x) for x in row] for row in rows]
    rank = 0
    cols = len(mat[0]) if mat else 0
    for col in range(cols):
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [x * inv for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col]:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Optional[Fraction]
    solution: Optional[list[Fraction]]
    basis: Optional[list[int]]


def _pivot(tableau: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    inv = 1 / tableau[row][col]
    tableau[row] = [x * inv for x in tableau[row]]
    for r in range(len(tableau)):
        if r != row and tableau[r][col]:
            f = tableau[r][col]
            tableau[r] = [a - f * b for a, b in zip(tableau[r], tableau[row])]
    basis[row] = col


def _optimize(tableau: list[list[Fraction]], basis: list[int], cost: list[Fraction]) -> str:
    """Maximize cost over the tableau in place.

    Starts with Dantzig's rule for speed and falls back to Bland's rule
    (which cannot cycle) once the iteration count passes a safety cap.
    """
    m = len(tableau)
    ncols = len(tableau[0]) - 1
    iterations = 0
    cap = 16 * (m + ncols)
    while True:
        iterations += 1
        bland = iterations > cap
        cb = [cost[basis[i]] for i in range(m)]
        entering, best = None, 0
        for j in range(ncols):
            reduced = cost[j] - sum(cb[i] * tableau[i][j] for i in range(m) if tableau[i][j])
            if reduced > 0:
                if bland:
                    entering = j
                    break
                if reduced > best:
                    entering, best = j, reduced
        if entering is None:
            return "optimal"
        best_row, best_ratio = None, None
        for i in range(m):
            if tableau[i][entering] > 0:
                ratio = tableau[i][-1] / tableau[i][entering]
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[best_row])
                ):
                    best_row, best_ratio = i, ratio
        if best_row is None:
            return "unbounded"
        _pivot(tableau, basis, best_row, entering)


def solve_lp(A: Sequence[Sequence], b: Sequence, c: Sequence) -> LPResult:
    """Maximize c.x subject to A x = b, x >= 0, in exact rationals."""
    m, n = len(A), len(c)
    rows = [[_Q(x) for x in row] for row in A]
    rhs = [_Q(x) for x in b]
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-x for x in rows[i]]
            rhs[i] = -rhs[i]
    # phase 1: artificial basis
    tableau = [rows[i] + [_Q(int(i == j)) for j in range(m)] + [rhs[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    cost1 = [_Q(0)] * n + [_Q(-1)] * m
    status = _optimize(tableau, basis, cost1)
    assert status == "optimal", "phase 1 cannot be unbounded"
    phase1 = sum(tableau[i][-1] for i in range(m) if basis[i] >= n)
    if phase1 > 0:
        return LPResult("infeasible", None, None, None)
    # drive stray artificials out of the basis, dropping redundant rows
    keep = []
    for i in range(m):
        if basis[i] < n:
            keep.append(i)
            continue
        col = next((j for j in range(n) if tableau[i][j]), None)
        if col is not None:
            _pivot(tableau, basis, i, col)
            keep.append(i)
    tableau = [tableau[i][:n] + [tableau[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    cost2 = [_Q(x) for x in c]
    status = _optimize(tableau, basis, cost2)
    if status == "unbounded":
        return LPResult("unbounded", None, None, None)
    x = [_Q(0)] * n
    for i, var in enumerate(basis):
        x[var] = tableau[i][-1]
    value = sum(cost2[j] * x[j] for j in range(n))
    frac = lambda v: Fraction(v.numerator, v.denominator)
    return LPResult("optimal", frac(value), [frac(v) for v in x], list(basis))


def enumerate_basic_solutions(A: Sequence[Sequence], b: Sequence) -> list[list[Fraction]]:
    """All basic feasible solutions of A x = b, x >= 0, by brute force.

    Exponential in the column count; meant to cross-check simplex verdicts
    on small instances only.
    """
    rows = [[Fraction(x) for x in row] for row in A]
    rhs = [Fraction(x) for x in b]
    n = len(rows[0]) if rows else 0
    r = exact_rank(rows)
    out = []
    seen = set()
    for cols in combinations(range(n), r):
        sol = _solve_square([[row[j] for j in cols] for row in rows], rhs)
        if sol is None:
            continue
        x = [Fraction(0)] * n
        for j, v in zip(cols, sol):
            x[j] = v
        if any(v < 0 for v in x):
            continue
        key = tuple(x)
        if key not in seen:
            seen.add(key)
            out.append(x)
    return out


def _solve_square(A: list[list[Fraction]], b: list[Fraction]) -> Optional[list[Fraction]]:
    """Solve the (possibly overdetermined) system A x = b exactly; None if
    singular in the chosen columns or inconsistent."""
    m = len(A)
    n = len(A[0]) if A else 0
    aug = [A[i][:] + [b[i]] for i in range(m)]
    row = 0
    pivots = []
    for col in range(n):
        p = next((r for r in range(row, m) if aug[r][col]), None)
        if p is None:
            return None
        aug[row], aug[p] = aug[p], aug[row]
        inv = 1 / aug[row][col]
        aug[row] = [x * inv for x in aug[row]]
        for r in range(m):
            if r != row and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * c for a, c in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    if row < n:
        return None
    for r in range(row, m):
        if aug[r][-1] != 0:
            return None
    sol = [Fraction(0)] * n
    for r, col in enumerate(pivots):
        sol[col] = aug[r][-1]
    return sol
