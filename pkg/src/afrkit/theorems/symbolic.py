"""Two-sided inequalities over ``e_i(t)`` and ``E(t)`` and the four
elimination operations that combine them with a resource's bound rows.

For a resource ``i`` and interval ``t`` there are two rows to combine with:
the power row ``p_lo(t) <= e_i(t) - e_i(t-1) <= p_hi(t)`` ("p") and the
energy row ``e_lo(t) <= e_i(t) <= e_hi(t)`` ("e").  Each operation below is
a sequence of single-resource substitutions:

* supplement (SA / SP): add ``sigma * e_i(t)`` for resources not yet present;
* remove (RA / RP): cancel ``sigma * e_i(t)`` for resources present,

where ``sigma = +-1`` is the common sign of the interval-``t`` symbols.  A
supplement that completes the whole fleet replaces ``sum_i e_i(t)`` by
``E(t)``.

``e_i(0)`` and ``E(0)`` are constants (the initial energies) when an
inequality is turned into LP rows.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from ..flex import FlexResource, ResourceSet, energy_var
from ..fme import aggregate_var
from ..linear import Row, ge, le

Symbol = tuple  # ("e", id, t) or ("E", t)

_MUTANTS: set[str] = set()
KNOWN_MUTANTS = ("b1-sign",)


@contextmanager
def mutant(name: str):
    """Inject a deliberate transcription error (test use only)."""
    if name not in KNOWN_MUTANTS:
        raise ValueError(f"unknown mutant {name!r}")
    _MUTANTS.add(name)
    try:
        yield
    finally:
        _MUTANTS.discard(name)


class SetPreconditionError(ValueError):
    pass


def e_sym(rid: str, t: int) -> Symbol:
    return ("e", rid, t)


def E_sym(t: int) -> Symbol:
    return ("E", t)


@dataclass(frozen=True)
class SymbolicInequality:
    """``lower <= sum coeffs[s] * s <= upper``."""

    coeffs: Mapping[Symbol, Fraction]
    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeffs", {s: Fraction(c) for s, c in self.coeffs.items() if c})
        object.__setattr__(self, "lower", Fraction(self.lower))
        object.__setattr__(self, "upper", Fraction(self.upper))

    def energy_set(self, t: int) -> dict[str, Fraction]:
        """Resources with an ``e_i(t)`` term, mapped to its coefficient."""
        return {s[1]: c for s, c in self.coeffs.items() if s[0] == "e" and s[2] == t}

    def sign_at(self, t: int) -> int | None:
        """Common sign of the interval-``t`` energy symbols, or None if absent or mixed."""
        signs = {1 if c > 0 else -1 for c in self.energy_set(t).values()}
        if len(signs) != 1:
            return None
        return signs.pop()

    def uniform_unit(self, t: int) -> bool:
        """All interval-``t`` energy coefficients are +1, or all are -1."""
        vals = set(self.energy_set(t).values())
        return vals in ({Fraction(1)}, {Fraction(-1)}, set())

    def to_rows(self, rs: ResourceSet) -> list[Row]:
        """Rows over ``e[id](t)`` and ``E(t)`` with time-0 symbols substituted."""
        const = Fraction(0)
        coeffs: dict[str, Fraction] = {}
        e0 = {r.id: r.e0 for r in rs}
        for s, c in self.coeffs.items():
            if s[0] == "e":
                if s[2] == 0:
                    const += c * e0[s[1]]
                else:
                    coeffs[energy_var(s[1], s[2])] = c
            else:
                if s[1] == 0:
                    const += c * rs.e0
                else:
                    coeffs[aggregate_var(s[1])] = c
        return [ge(coeffs, self.lower - const), le(coeffs, self.upper - const)]

    def __str__(self) -> str:
        def name(s):
            return f"e_{s[1]}({s[2]})" if s[0] == "e" else f"E({s[1]})"
        body = " ".join(f"{'+' if c > 0 else '-'}{'' if abs(c) == 1 else abs(c)}{name(s)}"
                        for s, c in sorted(self.coeffs.items(), key=lambda kv: str(kv[0])))
        return f"{self.lower} <= {body or '0'} <= {self.upper}"


def _res(rs: ResourceSet) -> dict[str, FlexResource]:
    return {r.id: r for r in rs}


def _range(r: FlexResource, t: int, mode: str) -> tuple[Fraction, Fraction]:
    if mode == "p":
        return r.p_lo[t - 1], r.p_hi[t - 1]
    if mode == "e":
        return r.e_lo[t - 1], r.e_hi[t - 1]
    raise ValueError(f"mode must be 'p' or 'e', not {mode!r}")


def _scaled(c: Fraction, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    return (c * lo, c * hi) if c > 0 else (c * hi, c * lo)


def supplement(f: SymbolicInequality, rid: str, t: int, sigma: int, mode: str,
               rs: ResourceSet) -> SymbolicInequality:
    """Add ``sigma * e_rid(t)`` using the power ("p") or energy ("e") row."""
    r = _res(rs)[rid]
    coeffs = dict(f.coeffs)
    key = e_sym(rid, t)
    coeffs[key] = coeffs.get(key, 0) + sigma
    lo_r, hi_r = _range(r, t, mode)
    m, M = _scaled(Fraction(sigma), lo_r, hi_r)
    if mode == "p":
        prev = e_sym(rid, t - 1)
        coeffs[prev] = coeffs.get(prev, 0) - sigma
    return SymbolicInequality(coeffs, f.lower + m, f.upper + M)


def remove(f: SymbolicInequality, rid: str, t: int, mode: str, rs: ResourceSet) -> SymbolicInequality:
    """Cancel the ``e_rid(t)`` term using the power or energy row."""
    r = _res(rs)[rid]
    key = e_sym(rid, t)
    c = f.coeffs.get(key, Fraction(0))
    if not c:
        raise SetPreconditionError(f"no e_{rid}({t}) term to remove")
    coeffs = dict(f.coeffs)
    del coeffs[key]
    lo_r, hi_r = _range(r, t, mode)
    m, M = _scaled(c, lo_r, hi_r)
    if mode == "p":
        prev = e_sym(rid, t - 1)
        coeffs[prev] = coeffs.get(prev, 0) + c
    return SymbolicInequality(coeffs, f.lower - M, f.upper - m)


def complete_aggregate(f: SymbolicInequality, t: int, rs: ResourceSet) -> SymbolicInequality:
    """Replace ``sigma * sum_{i in N} e_i(t)`` by ``sigma * E(t)``."""
    es = f.energy_set(t)
    if set(es) != set(rs.ids) or len(set(es.values())) != 1:
        raise SetPreconditionError("interval symbols do not form a full uniform sum")
    c = next(iter(es.values()))
    coeffs = {s: v for s, v in f.coeffs.items() if not (s[0] == "e" and s[2] == t)}
    coeffs[E_sym(t)] = coeffs.get(E_sym(t), 0) + c
    return SymbolicInequality(coeffs, f.lower, f.upper)


def _ids(S: Iterable[str]) -> list[str]:
    return sorted(S)


def _present(f: SymbolicInequality, X, t: int) -> int:
    es = f.energy_set(t)
    if set(es) != set(X):
        raise SetPreconditionError(f"interval-{t} symbols are {sorted(es)}, expected {sorted(X)}")
    sigma = f.sign_at(t)
    if sigma is None or not f.uniform_unit(t):
        raise SetPreconditionError(f"interval-{t} coefficients are not a uniform +-1")
    return sigma


def apply_SA(f: SymbolicInequality, X, Y, t: int, rs: ResourceSet, *, sign: int = 1) -> SymbolicInequality:
    """Supplement all: complete ``e_X(t)`` to ``E(t)``; power rows for ``Y``, energy rows for the rest.

    With ``X`` empty there is no sign to inherit and ``sign`` is used; with
    ``X = N`` only the aggregate is formed.
    """
    N = set(rs.ids)
    X, Y = set(X), set(Y)
    if not X <= N:
        raise SetPreconditionError("X must be a set of fleet resources")
    if not Y <= N - X:
        raise SetPreconditionError("SA needs Y within N - X")
    if X:
        sigma = _present(f, X, t)
    else:
        if f.energy_set(t):
            raise SetPreconditionError(f"X is empty but interval-{t} symbols are present")
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        sigma = sign
    g = f
    for rid in _ids(N - X):
        g = supplement(g, rid, t, sigma, "p" if rid in Y else "e", rs)
    g = complete_aggregate(g, t, rs)
    if "b1-sign" in _MUTANTS and sigma > 0 and Y:
        coeffs = dict(g.coeffs)
        for rid in Y:  # e_Y(t-1) enters with +sigma instead of -sigma
            key = e_sym(rid, t - 1)
            coeffs[key] = coeffs.get(key, 0) + 2 * sigma
        g = SymbolicInequality(coeffs, g.lower, g.upper)
    return g


def apply_RA(f: SymbolicInequality, X, Y, t: int, rs: ResourceSet) -> SymbolicInequality:
    """Remove all: cancel ``e_X(t)``; power rows for ``Y``, energy rows for ``X - Y``."""
    X, Y = set(X), set(Y)
    if not X or not X <= set(rs.ids):
        raise SetPreconditionError("RA needs a nonempty X of fleet resources")
    if not Y <= X:
        raise SetPreconditionError("RA needs Y within X")
    _present(f, X, t)
    g = f
    for rid in _ids(X):
        g = remove(g, rid, t, "p" if rid in Y else "e", rs)
    return g


def apply_SP(f: SymbolicInequality, X, target, t: int, rs: ResourceSet, power=()) -> SymbolicInequality:
    """Supplement part: extend ``e_X(t)`` to ``e_target(t)``; power rows for ``power``."""
    N = set(rs.ids)
    X, target, power = set(X), set(target), set(power)
    if not (X < target < N):
        raise SetPreconditionError("SP needs X strictly inside target strictly inside N")
    if not power <= target - X:
        raise SetPreconditionError("power set must lie in target - X")
    sigma = _present(f, X, t)
    g = f
    for rid in _ids(target - X):
        g = supplement(g, rid, t, sigma, "p" if rid in power else "e", rs)
    return g


def apply_RP(f: SymbolicInequality, X, target, t: int, rs: ResourceSet, power=()) -> SymbolicInequality:
    """Remove part: shrink ``e_X(t)`` to the nonempty ``e_target(t)``; power rows for ``power``."""
    X, target, power = set(X), set(target), set(power)
    if not target or not target < X:
        raise SetPreconditionError("RP needs a nonempty target strictly inside X")
    if not power <= X - target:
        raise SetPreconditionError("power set must lie in X - target")
    _present(f, X, t)
    g = f
    for rid in _ids(X - target):
        g = remove(g, rid, t, "p" if rid in power else "e", rs)
    return g


def energy_rows(rs: ResourceSet, t: int, ids=None) -> list[Row]:
    """``e_lo(t) <= e_i(t) <= e_hi(t)`` for the chosen resources (none at ``t = 0``)."""
    if t <= 0:
        return []
    out = []
    for r in rs:
        if ids is None or r.id in ids:
            out.append(ge({energy_var(r.id, t): 1}, r.e_lo[t - 1]))
            out.append(le({energy_var(r.id, t): 1}, r.e_hi[t - 1]))
    return out
