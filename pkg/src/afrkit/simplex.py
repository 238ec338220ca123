"""Dense-tableau two-phase simplex over exact rationals.

Solves the standard form

    minimize  c . y   subject to   M y = h,  y >= 0

with Bland's rule for both the entering and the leaving variable, so the
method terminates on degenerate problems.  Arithmetic uses ``gmpy2.mpq``
internally; callers pass and receive :class:`fractions.Fraction`.

Besides the primal solution ``y`` the solver reports the simplex
multipliers ``pi`` of the equality rows.  At an optimum they satisfy
``c_j - (M^T pi)_j >= 0`` for every column and ``h . pi == value``, which is
what the linear-core uses to recover primal points of the dual problem.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from gmpy2 import mpq

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = mpq(0)


def _to_frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


@dataclass(frozen=True)
class StandardResult:
    status: str
    value: Fraction | None = None
    y: tuple[Fraction, ...] | None = None
    pi: tuple[Fraction, ...] | None = None


class _Tableau:
    """Row-major tableau with two objective rows kept in sync while pivoting."""

    def __init__(self, M, h, c):
        m = len(h)
        n = len(c)
        self.m, self.n = m, n
        self.sign = [1] * m
        rows = []
        for k in range(m):
            row = [mpq(v) for v in M[k]]
            rhs = mpq(h[k])
            if rhs < 0:
                row = [-v for v in row]
                rhs = -rhs
                self.sign[k] = -1
            art = [_ZERO] * m
            art[k] = mpq(1)
            rows.append(row + art + [rhs])
        self.rows = rows
        self.basis = [n + k for k in range(m)]
        width = n + m + 1
        # phase-one objective: sum of artificials, expressed in nonbasic terms
        ph1 = [_ZERO] * width
        for row in rows:
            for j in range(n):
                if row[j]:
                    ph1[j] -= row[j]
            ph1[-1] -= row[-1]
        self.phase1 = ph1
        # phase-two objective: artificials cost nothing
        self.phase2 = [mpq(v) for v in c] + [_ZERO] * m + [_ZERO]

    def pivot(self, p: int, j: int) -> None:
        prow = self.rows[p]
        inv = 1 / prow[j]
        prow = [v * inv for v in prow]
        self.rows[p] = prow
        nz = [i for i, v in enumerate(prow) if v]
        for k, row in enumerate(self.rows):
            if k != p and row[j]:
                f = row[j]
                for i in nz:
                    row[i] -= f * prow[i]
        for obj in (self.phase1, self.phase2):
            if obj is not None and obj[j]:
                f = obj[j]
                for i in nz:
                    obj[i] -= f * prow[i]
        self.basis[p] = j

    def run(self, obj, allowed: int) -> str:
        """Iterate with Bland's rule on columns ``< allowed``."""
        rows = self.rows
        while True:
            j = next((i for i in range(allowed) if obj[i] < 0), None)
            if j is None:
                return OPTIMAL
            best = None
            for k, row in enumerate(rows):
                a = row[j]
                if a > 0:
                    ratio = row[-1] / a
                    if (best is None or ratio < best[0]
                            or (ratio == best[0] and self.basis[k] < self.basis[best[1]])):
                        best = (ratio, k)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], j)


def solve_standard(M: Sequence[Sequence], h: Sequence, c: Sequence) -> StandardResult:
    """Minimize ``c.y`` subject to ``M y = h``, ``y >= 0``.

    ``M`` is given as ``len(h)`` rows of length ``len(c)``.
    """
    m, n = len(h), len(c)
    tab = _Tableau(M, h, c)
    tab.run(tab.phase1, n)
    if tab.phase1[-1] != 0:
        return StandardResult(INFEASIBLE)
    # drive zero-level artificials out of the basis where possible
    for k in range(m):
        if tab.basis[k] >= n:
            row = tab.rows[k]
            j = next((i for i in range(n) if row[i]), None)
            if j is not None:
                tab.pivot(k, j)
    tab.phase1 = None
    status = tab.run(tab.phase2, n)
    if status == UNBOUNDED:
        return StandardResult(UNBOUNDED)
    y = [_ZERO] * n
    for k, b in enumerate(tab.basis):
        if b < n:
            y[b] = tab.rows[k][-1]
    value = -tab.phase2[-1]
    # reduced cost of artificial k is -pi'_k; undo the row sign flips
    pi = [-tab.phase2[n + k] * tab.sign[k] for k in range(m)]
    return StandardResult(
        OPTIMAL,
        _to_frac(value),
        tuple(_to_frac(v) for v in y),
        tuple(_to_frac(v) for v in pi),
    )
