"""Linear feasibility with certificates, on either numeric backend.

The single primitive the whole workbench needs is: given columns ``a_1..a_n``
and a target ``b``, find ``x >= 0`` with ``sum_j x_j a_j = b`` or produce a
hyperplane ``y`` with ``y . a_j >= 0`` for every column and ``y . b < 0``
(an infeasibility witness).  It is solved by a phase-I primal simplex on a
dense tableau; Bland's anti-cycling rule makes it terminate on the rational
backend and keeps pivoting deterministic on both.
"""

from __future__ import annotations

from dataclasses import dataclass

from .numerics import Backend, DimensionMismatch


@dataclass
class FeasibilityResult:
    feasible: bool
    weights: tuple | None      # x >= 0 with A x = b, when feasible
    witness: tuple | None      # y with y.A >= 0 columnwise and y.b < 0, otherwise


def _pivot(tableau, basis, row, col):
    piv = tableau[row][col]
    tableau[row] = [v / piv for v in tableau[row]]
    prow = tableau[row]
    for i, trow in enumerate(tableau):
        if i == row:
            continue
        f = trow[col]
        if f:
            tableau[i] = [v - f * p for v, p in zip(trow, prow)]
    basis[row] = col


def solve_nonneg_system(columns, target, backend: Backend) -> FeasibilityResult:
    """Feasibility of {x >= 0 : sum_j x_j columns[j] = target} with certificate."""
    m = len(target)
    for c in columns:
        if len(c) != m:
            raise DimensionMismatch("column length does not match target")
    n = len(columns)
    zero, one = backend.zero, backend.one

    # Rows are scaled so the right-hand side is nonnegative; artificials form
    # the starting basis.  signs[] remembers the scaling for the certificate.
    signs = [one if backend.le(zero, target[i]) else -one for i in range(m)]
    tableau = []
    for i in range(m):
        row = [signs[i] * columns[j][i] for j in range(n)]
        row += [one if k == i else zero for k in range(m)]
        row.append(signs[i] * target[i])
        tableau.append(row)
    basis = [n + i for i in range(m)]

    # Objective: minimise the sum of artificials.  z[j] = c_B . B^-1 A_j, and
    # the reduced cost of column j is c_j - z[j] (c_j = 0 for real columns).
    def reduced_costs():
        rc = []
        for j in range(n + m):
            z = zero
            for i in range(m):
                if basis[i] >= n and tableau[i][j]:
                    z += tableau[i][j]
            cj = zero if j < n else one
            rc.append(cj - z)
        return rc

    while True:
        rc = reduced_costs()
        enter = next((j for j in range(n + m) if backend.lt(rc[j], zero)), None)
        if enter is None:
            break
        ratios = []
        for i in range(m):
            t = tableau[i][enter]
            if backend.lt(zero, t):
                ratios.append((tableau[i][-1] / t, basis[i], i))
        if not ratios:
            raise ArithmeticError("phase-I simplex cannot be unbounded")
        # Bland: smallest ratio, ties broken by smallest basis index.
        best = min(ratios, key=lambda r: (r[0], r[1])) if backend.exact else None
        if best is None:
            lo = min(r[0] for r in ratios)
            best = min((r for r in ratios if r[0] <= lo + backend.eps),
                       key=lambda r: r[1])
        _pivot(tableau, basis, best[2], enter)

    objective = sum((tableau[i][-1] for i in range(m) if basis[i] >= n), start=zero)
    if backend.is_zero(objective):
        weights = [zero] * n
        for i in range(m):
            if basis[i] < n:
                weights[basis[i]] = tableau[i][-1]
        return FeasibilityResult(True, tuple(weights), None)

    # Infeasible: multipliers pi = c_B B^-1 read off the artificial columns
    # (B^-1 = tableau[:, artificials] by construction); y = -diag(signs) pi.
    pi = []
    for i in range(m):
        v = zero
        for k in range(m):
            if basis[k] >= n and tableau[k][n + i]:
                v += tableau[k][n + i]
        pi.append(v)
    witness = tuple(-signs[i] * pi[i] for i in range(m))
    return FeasibilityResult(False, None, witness)


def solve_conic_combination(generators, point, backend: Backend) -> FeasibilityResult:
    """Nonnegative weights expressing ``point`` over ``generators``, or a witness."""
    return solve_nonneg_system(list(generators), point, backend)
