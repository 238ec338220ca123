"""Exact rational linear inequality systems.

A :class:`LinearSystem` is a list of rows ``sum(c_v * v) REL rhs`` over named
variables.  Every query (feasibility, optimization, implication, equivalence)
is answered exactly by the simplex in :mod:`afrkit.simplex`.

Optimization is carried out on the dual.  For ``max c.x`` subject to
``A x <= b`` with free ``x`` the dual ``min b.y, A^T y = c, y >= 0`` has only
as many equality rows as there are variables, which keeps the tableau small
when a system has many more rows than variables (the usual shape after
Fourier-Motzkin steps).  The primal optimum is read off the dual's simplex
multipliers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .rational import format_rational
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, solve_standard

LE, GE, EQ = "<=", ">=", "="
_RELATIONS = (LE, GE, EQ)


class InconsistentRowError(ValueError):
    """A constant row (no variables) that is false."""


@dataclass(frozen=True)
class Row:
    coeffs: Mapping[str, Fraction]
    rel: str
    rhs: Fraction

    def __post_init__(self):
        if self.rel not in _RELATIONS:
            raise ValueError(f"unknown relation {self.rel!r}")
        clean = {v: Fraction(c) for v, c in self.coeffs.items() if c != 0}
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "rhs", Fraction(self.rhs))

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    def holds_at(self, point: Mapping[str, Fraction]) -> bool:
        lhs = sum((c * point[v] for v, c in self.coeffs.items()), Fraction(0))
        if self.rel == LE:
            return lhs <= self.rhs
        if self.rel == GE:
            return lhs >= self.rhs
        return lhs == self.rhs

    def as_le(self) -> list[tuple[dict[str, Fraction], Fraction]]:
        """The row as one or two ``<=`` pairs ``(coeffs, rhs)``."""
        pos = dict(self.coeffs)
        neg = {v: -c for v, c in self.coeffs.items()}
        if self.rel == LE:
            return [(pos, self.rhs)]
        if self.rel == GE:
            return [(neg, -self.rhs)]
        return [(pos, self.rhs), (neg, -self.rhs)]

    def negated(self) -> "Row":
        """The complementary closed half-space boundary row (``<=`` flips to ``>=``)."""
        flip = {LE: GE, GE: LE, EQ: EQ}[self.rel]
        return Row(self.coeffs, flip, self.rhs)

    def __str__(self) -> str:
        if not self.coeffs:
            lhs = "0"
        else:
            parts = []
            for v in sorted(self.coeffs):
                c = self.coeffs[v]
                parts.append(f"{format_rational(c)}*{v}")
            lhs = " + ".join(parts)
        return f"{lhs} {self.rel} {format_rational(self.rhs)}"


def le(coeffs: Mapping[str, Fraction], rhs) -> Row:
    return Row(coeffs, LE, rhs)


def ge(coeffs: Mapping[str, Fraction], rhs) -> Row:
    return Row(coeffs, GE, rhs)


def eq(coeffs: Mapping[str, Fraction], rhs) -> Row:
    return Row(coeffs, EQ, rhs)


@dataclass(frozen=True)
class LinearSystem:
    variables: tuple[str, ...]
    rows: tuple[Row, ...] = field(default_factory=tuple)

    def __post_init__(self):
        variables = tuple(dict.fromkeys(self.variables))
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "rows", tuple(self.rows))
        known = set(variables)
        for row in self.rows:
            unknown = set(row.coeffs) - known
            if unknown:
                raise ValueError(f"row {row} uses undeclared variables {sorted(unknown)}")
            if row.is_constant and not row.holds_at({}):
                raise InconsistentRowError(f"constant row is false: {row}")

    def __len__(self) -> int:
        return len(self.rows)

    def with_rows(self, rows: Iterable[Row]) -> "LinearSystem":
        return LinearSystem(self.variables, tuple(self.rows) + tuple(rows))

    def le_form(self) -> list[tuple[dict[str, Fraction], Fraction]]:
        out = []
        for row in self.rows:
            out.extend(row.as_le())
        return out

    def satisfied_by(self, point: Mapping[str, Fraction]) -> bool:
        return all(row.holds_at(point) for row in self.rows)

    def dump(self) -> str:
        """One row per line, ``c1*v1 + c2*v2 <= rhs``."""
        return "\n".join(str(row) for row in self.rows) + ("\n" if self.rows else "")


@dataclass(frozen=True)
class LpOutcome:
    status: str
    value: Fraction | None = None
    witness: dict[str, Fraction] | None = None

    @property
    def is_feasible(self) -> bool:
        return self.status in (OPTIMAL, UNBOUNDED)


def _solve_dual(s: LinearSystem, objective: Mapping[str, Fraction]):
    """max objective.x over s, via the dual standard-form LP."""
    names = s.variables
    index = {v: k for k, v in enumerate(names)}
    rows = s.le_form()
    # M = A^T : one equality row per variable, one column per inequality
    M = [[Fraction(0)] * len(rows) for _ in names]
    for col, (coeffs, _) in enumerate(rows):
        for v, c in coeffs.items():
            M[index[v]][col] = c
    h = [Fraction(objective.get(v, 0)) for v in names]
    cost = [rhs for _, rhs in rows]
    return solve_standard(M, h, cost)


def _witness(s: LinearSystem, pi) -> dict[str, Fraction]:
    point = dict(zip(s.variables, pi))
    if not s.satisfied_by(point):  # pragma: no cover - solver invariant
        raise AssertionError("simplex multipliers do not satisfy the system")
    return point


def feasible(s: LinearSystem) -> LpOutcome:
    """Decide whether ``s`` has a solution; return a witness when it does."""
    res = _solve_dual(s, {})
    if res.status == OPTIMAL:
        return LpOutcome(OPTIMAL, Fraction(0), _witness(s, res.pi))
    return LpOutcome(INFEASIBLE)


def optimize(s: LinearSystem, objective: Mapping[str, Fraction], sense: str = "max") -> LpOutcome:
    """Exact optimum of ``objective`` over ``s``.

    ``sense`` is ``"max"`` or ``"min"``.  The witness of an optimal outcome is
    a basic solution (a vertex when the system has full column rank).
    """
    if sense not in ("max", "min"):
        raise ValueError(f"sense must be 'max' or 'min', not {sense!r}")
    unknown = set(objective) - set(s.variables)
    if unknown:
        raise ValueError(f"objective uses undeclared variables {sorted(unknown)}")
    obj = {v: Fraction(c) for v, c in objective.items()}
    if sense == "min":
        obj = {v: -c for v, c in obj.items()}
    res = _solve_dual(s, obj)
    if res.status == OPTIMAL:
        value = res.value if sense == "max" else -res.value
        return LpOutcome(OPTIMAL, value, _witness(s, res.pi))
    if res.status == UNBOUNDED:
        return LpOutcome(INFEASIBLE)
    # dual infeasible: the primal is either infeasible or unbounded
    if feasible(s).status == OPTIMAL:
        return LpOutcome(UNBOUNDED)
    return LpOutcome(INFEASIBLE)


def implies(s: LinearSystem, row: Row) -> bool:
    """True iff every solution of ``s`` satisfies ``row``.

    An infeasible system implies everything.
    """
    for coeffs, rhs in row.as_le():
        if not coeffs:
            if 0 <= rhs:
                continue
            return feasible(s).status == INFEASIBLE
        out = optimize(s, coeffs, "max")
        if out.status == UNBOUNDED:
            return False
        if out.status == OPTIMAL and out.value > rhs:
            return False
    return True


def system_equivalent(a: LinearSystem, b: LinearSystem) -> bool:
    """Mutual implication of two systems over the same variables."""
    if set(a.variables) != set(b.variables):
        raise ValueError("systems are over different variable sets")
    a2 = LinearSystem(tuple(a.variables) + tuple(b.variables), a.rows)
    b2 = LinearSystem(tuple(a.variables) + tuple(b.variables), b.rows)
    return all(implies(b2, r) for r in a.rows) and all(implies(a2, r) for r in b.rows)


class UnboundedDirectionError(ValueError):
    pass


def sample_vertex(s: LinearSystem, objective: Mapping[str, Fraction]) -> dict[str, Fraction]:
    """An optimal basic point of ``max objective`` over ``s``."""
    out = optimize(s, objective, "max")
    if out.status == UNBOUNDED:
        raise UnboundedDirectionError("objective is unbounded over the system")
    if out.status == INFEASIBLE:
        raise ValueError("system is infeasible")
    return out.witness


__all__ = [
    "LE", "GE", "EQ", "Row", "le", "ge", "eq", "LinearSystem", "LpOutcome",
    "InconsistentRowError", "UnboundedDirectionError", "OPTIMAL", "INFEASIBLE",
    "UNBOUNDED", "feasible", "optimize", "implies", "system_equivalent", "sample_vertex",
]
