"""Fourier-Motzkin elimination and the brute-force aggregate projection.

Rows handled here are always in ``<=`` form.  The projection oracle is slow
by design (its row count can explode); it exists to check the closed-form
aggregate model on small instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .flex import ResourceSet, energy_var, individual_polytope
from .linear import LE, LinearSystem, Row, eq, implies

DEFAULT_MAX_NT = 12


class GuardExceeded(ValueError):
    """The instance is too large for the brute-force oracle."""


def aggregate_var(t: int) -> str:
    return f"E({t})"


def to_le(s: LinearSystem) -> LinearSystem:
    rows = [Row(c, LE, b) for c, b in s.le_form()]
    return LinearSystem(s.variables, tuple(rows))


@dataclass(frozen=True)
class Partition:
    negative: tuple[Row, ...]
    zero: tuple[Row, ...]
    positive: tuple[Row, ...]


def classify(s: LinearSystem, var: str) -> Partition:
    """Split ``<=`` rows by the sign of ``var``'s coefficient."""
    neg, zero, pos = [], [], []
    for row in s.rows:
        if row.rel != LE:
            raise ValueError(f"row not in <= form: {row}")
        c = row.coeffs.get(var, 0)
        (neg if c < 0 else pos if c > 0 else zero).append(row)
    return Partition(tuple(neg), tuple(zero), tuple(pos))


def _combine(n: Row, p: Row, var: str) -> Row:
    a = -n.coeffs[var]
    b = p.coeffs[var]
    coeffs: dict[str, Fraction] = {}
    for v, c in n.coeffs.items():
        coeffs[v] = coeffs.get(v, 0) + b * c
    for v, c in p.coeffs.items():
        coeffs[v] = coeffs.get(v, 0) + a * c
    coeffs.pop(var, None)
    return Row(coeffs, LE, b * n.rhs + a * p.rhs)


def eliminate(s: LinearSystem, var: str) -> LinearSystem:
    """Project out ``var``.

    The result holds the zero-class rows followed by one combination per
    (negative, positive) pair, so its length is ``|Z| + |N|*|P|``.  A
    combination that loses every variable and is false raises
    :class:`InconsistentRowError`; true ones are kept.
    """
    part = classify(s, var)
    rows = list(part.zero)
    for n in part.negative:
        for p in part.positive:
            rows.append(_combine(n, p, var))
    variables = tuple(v for v in s.variables if v != var)
    return LinearSystem(variables, tuple(rows))


def _normalized_key(row: Row):
    """Scale so the first nonzero coefficient has magnitude 1."""
    first = row.coeffs[min(row.coeffs)]
    k = abs(first)
    return tuple(sorted((v, c / k) for v, c in row.coeffs.items())), row.rhs / k


def prune_redundant(s: LinearSystem) -> LinearSystem:
    """An irredundant ``<=`` system with the same solution set as ``s``.

    Constant rows are dropped (they are true by construction), parallel
    rows keep only the tightest, then each remaining row implied by the
    others is removed.
    """
    best: dict = {}
    order = []
    for row in to_le(s).rows:
        if row.is_constant:
            continue
        key, rhs = _normalized_key(row)
        if key not in best:
            order.append(key)
            best[key] = rhs
        elif rhs < best[key]:
            best[key] = rhs
    rows = [Row(dict(key), LE, best[key]) for key in order]
    kept = list(rows)
    k = 0
    while k < len(kept):
        others = LinearSystem(s.variables, tuple(kept[:k] + kept[k + 1:]))
        if implies(others, kept[k]):
            del kept[k]
        else:
            k += 1
    return LinearSystem(s.variables, tuple(kept))


def joint_system(rs: ResourceSet) -> LinearSystem:
    """All individual rows plus ``E(t) = sum_i e_i(t)``; NT + T variables."""
    T = rs.T
    variables: list[str] = []
    rows: list[Row] = []
    for r in rs:
        poly = individual_polytope(r)
        variables.extend(poly.variables)
        rows.extend(poly.rows)
    agg = tuple(aggregate_var(t) for t in range(1, T + 1))
    for t in range(1, T + 1):
        coeffs = {aggregate_var(t): Fraction(1)}
        for r in rs:
            coeffs[energy_var(r.id, t)] = Fraction(-1)
        rows.append(eq(coeffs, 0))
    return LinearSystem(tuple(variables) + agg, tuple(rows))


def aggregate_projection_oracle(
    rs: ResourceSet,
    *,
    max_nt: int = DEFAULT_MAX_NT,
    reverse_resources: bool = False,
) -> LinearSystem:
    """Project the joint system onto ``E(1..T)`` by eliminating every ``e_i(t)``.

    Intervals go from ``T`` down to 1; within one interval resources go in
    input order (or reversed).  The system is pruned after every step.
    """
    if rs.N * rs.T > max_nt:
        raise GuardExceeded(f"N*T = {rs.N * rs.T} exceeds the oracle guard {max_nt}")
    s = to_le(joint_system(rs))
    order: Sequence = list(rs.resources)
    if reverse_resources:
        order = order[::-1]
    for t in range(rs.T, 0, -1):
        for r in order:
            s = prune_redundant(eliminate(s, energy_var(r.id, t)))
    return s
