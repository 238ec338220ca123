"""Individual storage-like resources: bounds, hypothesis checks, repair, I/O.

A resource over ``T`` intervals is described by per-interval power bounds
``p_lo[t] <= e(t) - e(t-1) <= p_hi[t]`` and energy bounds
``e_lo[t] <= e(t) <= e_hi[t]`` with a fixed initial energy ``e(0) = e0``.
Power bounds are energy-per-interval quantities (the interval length is
folded in at ingestion).

Index convention: Python lists are 0-based, interval ``t`` (1-based) lives at
position ``t - 1``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .linear import LinearSystem, Row, ge, le
from .rational import format_rational, parse_rational


class ParseError(ValueError):
    """Malformed resource document."""


class HypothesisError(ValueError):
    """A resource violates one of the three bound-consistency hypotheses."""

    def __init__(self, resource_id: str, violations: Sequence["Violation"]):
        self.resource_id = resource_id
        self.violations = tuple(violations)
        first = self.violations[0]
        super().__init__(f"resource {resource_id!r}: {first}")


class EmptyResourceError(ValueError):
    """The trajectory set of a resource is empty."""

    def __init__(self, resource_id: str, t: int):
        self.resource_id = resource_id
        self.t = t
        super().__init__(f"resource {resource_id!r} has no feasible trajectory (bounds cross at t={t})")


@dataclass(frozen=True)
class Violation:
    hypothesis: int
    t: int
    lhs: Fraction
    rhs: Fraction
    detail: str

    def __str__(self) -> str:
        return (f"Hypo {self.hypothesis} violated at t={self.t}: {self.detail} "
                f"({format_rational(self.lhs)} > {format_rational(self.rhs)})")


@dataclass(frozen=True)
class ValidationReport:
    resource_id: str
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def _fracs(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class FlexResource:
    """One resource; bounds are stored in absolute energy units."""

    id: str
    p_lo: tuple[Fraction, ...]
    p_hi: tuple[Fraction, ...]
    e_lo: tuple[Fraction, ...]
    e_hi: tuple[Fraction, ...]
    e0: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("p_lo", "p_hi", "e_lo", "e_hi"):
            object.__setattr__(self, name, _fracs(getattr(self, name)))
        object.__setattr__(self, "e0", Fraction(self.e0))
        T = len(self.p_lo)
        if T == 0:
            raise ValueError(f"resource {self.id!r}: horizon must be positive")
        for name in ("p_hi", "e_lo", "e_hi"):
            if len(getattr(self, name)) != T:
                raise ValueError(f"resource {self.id!r}: {name} has length "
                                 f"{len(getattr(self, name))}, expected {T}")

    @property
    def T(self) -> int:
        return len(self.p_lo)

    @cached_property
    def norm_e_lo(self) -> tuple[Fraction, ...]:
        """Energy lower bounds shifted so that the initial energy is 0."""
        return tuple(v - self.e0 for v in self.e_lo)

    @cached_property
    def norm_e_hi(self) -> tuple[Fraction, ...]:
        return tuple(v - self.e0 for v in self.e_hi)

    def scaled(self, lam) -> "FlexResource":
        lam = Fraction(lam)
        if lam <= 0:
            raise ValueError("scale factor must be positive")
        return FlexResource(
            self.id,
            [lam * v for v in self.p_lo], [lam * v for v in self.p_hi],
            [lam * v for v in self.e_lo], [lam * v for v in self.e_hi],
            lam * self.e0,
        )


def validate_hypotheses(r: FlexResource) -> ValidationReport:
    """All hypothesis violations of ``r``, in interval order."""
    out: list[Violation] = []
    lo_prev = hi_prev = r.e0
    for k in range(r.T):
        t = k + 1
        pl, ph, el, eh = r.p_lo[k], r.p_hi[k], r.e_lo[k], r.e_hi[k]
        if pl > ph:
            out.append(Violation(1, t, pl, ph, "p_lo > p_hi"))
        if el > eh:
            out.append(Violation(1, t, el, eh, "e_lo > e_hi"))
        dlo, dhi = el - lo_prev, eh - hi_prev
        if pl > dlo:
            out.append(Violation(2, t, pl, dlo, "p_lo > e_lo(t)-e_lo(t-1)"))
        if dlo > ph:
            out.append(Violation(2, t, dlo, ph, "e_lo(t)-e_lo(t-1) > p_hi"))
        if pl > dhi:
            out.append(Violation(2, t, pl, dhi, "p_lo > e_hi(t)-e_hi(t-1)"))
        if dhi > ph:
            out.append(Violation(2, t, dhi, ph, "e_hi(t)-e_hi(t-1) > p_hi"))
        if lo_prev + ph > eh:
            out.append(Violation(3, t, lo_prev + ph, eh, "e_lo(t-1)+p_hi > e_hi(t)"))
        if el > hi_prev + pl:
            out.append(Violation(3, t, el, hi_prev + pl, "e_lo(t) > e_hi(t-1)+p_lo"))
        lo_prev, hi_prev = el, eh
    return ValidationReport(r.id, tuple(out))


def require_valid(r: FlexResource) -> FlexResource:
    report = validate_hypotheses(r)
    if not report.ok:
        raise HypothesisError(r.id, report.violations)
    return r


def tighten_bounds(r: FlexResource) -> FlexResource:
    """Smallest repair of ``r`` that satisfies all hypotheses.

    Energy envelopes are pulled in by forward and backward reachability
    passes, and power bounds are clipped to what the envelopes allow.  Each
    step only removes bound values no trajectory can attain, so the set of
    feasible trajectories is unchanged.  Iterates to a fixed point.
    """
    T = r.T
    pl, ph = list(r.p_lo), list(r.p_hi)
    el, eh = list(r.e_lo), list(r.e_hi)
    e0 = r.e0

    def lo(k):  # energy lower bound at interval k (1-based), with k=0 -> e0
        return e0 if k == 0 else el[k - 1]

    def hi(k):
        return e0 if k == 0 else eh[k - 1]

    def check(k):
        i = k - 1
        if el[i] > eh[i] or pl[i] > ph[i]:
            raise EmptyResourceError(r.id, k)

    changed = True
    while changed:
        changed = False
        for k in range(1, T + 1):
            i = k - 1
            nh = min(eh[i], hi(k - 1) + ph[i])
            nl = max(el[i], lo(k - 1) + pl[i])
            if (nh, nl) != (eh[i], el[i]):
                eh[i], el[i] = nh, nl
                changed = True
            check(k)
        for k in range(T, 0, -1):
            i = k - 1
            if k == 1:
                if e0 > eh[0] - pl[0] or e0 < el[0] - ph[0]:
                    raise EmptyResourceError(r.id, 1)
                continue
            nh = min(eh[i - 1], eh[i] - pl[i])
            nl = max(el[i - 1], el[i] - ph[i])
            if (nh, nl) != (eh[i - 1], el[i - 1]):
                eh[i - 1], el[i - 1] = nh, nl
                changed = True
            check(k - 1)
        for k in range(1, T + 1):
            i = k - 1
            nph = min(ph[i], hi(k) - lo(k - 1))
            npl = max(pl[i], lo(k) - hi(k - 1))
            if (nph, npl) != (ph[i], pl[i]):
                ph[i], pl[i] = nph, npl
                changed = True
            check(k)
    return FlexResource(r.id, pl, ph, el, eh, e0)


def from_generator(p_lo: Sequence, p_hi: Sequence, id: str = "gen") -> FlexResource:
    """A power-only resource whose energy envelopes are the cumulative power sums."""
    p_lo, p_hi = _fracs(p_lo), _fracs(p_hi)
    if len(p_lo) != len(p_hi):
        raise ValueError("p_lo and p_hi differ in length")
    for t, (a, b) in enumerate(zip(p_lo, p_hi), 1):
        if a > b:
            raise ValueError(f"p_lo > p_hi at t={t}")
    e_lo, e_hi = [], []
    acc_lo = acc_hi = Fraction(0)
    for a, b in zip(p_lo, p_hi):
        acc_lo += a
        acc_hi += b
        e_lo.append(acc_lo)
        e_hi.append(acc_hi)
    return FlexResource(id, p_lo, p_hi, e_lo, e_hi)


def energy_var(rid: str, t: int) -> str:
    return f"e[{rid}]({t})"


def individual_polytope(r: FlexResource, namespace: str | None = None) -> LinearSystem:
    """The ``4T`` bound rows of ``r`` over variables ``e[id](1..T)``.

    ``e(0)`` is replaced by the constant ``e0``.  Duplicate rows are kept.
    """
    rid = r.id if namespace is None else namespace
    names = tuple(energy_var(rid, t) for t in range(1, r.T + 1))
    rows: list[Row] = []
    for k in range(r.T):
        cur = names[k]
        if k == 0:
            rows.append(ge({cur: 1}, r.p_lo[0] + r.e0))
            rows.append(le({cur: 1}, r.p_hi[0] + r.e0))
        else:
            prev = names[k - 1]
            rows.append(ge({cur: 1, prev: -1}, r.p_lo[k]))
            rows.append(le({cur: 1, prev: -1}, r.p_hi[k]))
        rows.append(ge({cur: 1}, r.e_lo[k]))
        rows.append(le({cur: 1}, r.e_hi[k]))
    return LinearSystem(names, tuple(rows))


@dataclass(frozen=True)
class ResourceSet:
    resources: tuple[FlexResource, ...] = ()
    horizon: int | None = None

    def __post_init__(self):
        res = tuple(self.resources)
        object.__setattr__(self, "resources", res)
        horizons = {r.T for r in res}
        if len(horizons) > 1:
            raise ValueError(f"resources disagree on the horizon: {sorted(horizons)}")
        if res:
            T = res[0].T
            if self.horizon is not None and self.horizon != T:
                raise ValueError(f"horizon {self.horizon} does not match resources ({T})")
            object.__setattr__(self, "horizon", T)
        elif self.horizon is None:
            object.__setattr__(self, "horizon", 0)
        ids = [r.id for r in res]
        if len(set(ids)) != len(ids):
            raise ValueError("resource ids are not unique")
        for r in res:
            require_valid(r)

    @property
    def T(self) -> int:
        return self.horizon

    @property
    def N(self) -> int:
        return len(self.resources)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.resources)

    @property
    def e0(self) -> Fraction:
        return sum((r.e0 for r in self.resources), Fraction(0))

    def __iter__(self):
        return iter(self.resources)

    def __len__(self) -> int:
        return len(self.resources)


# ---------------------------------------------------------------- documents

_FIELDS = ("p_min", "p_max", "e_min", "e_max")


def _num(value, where: str) -> Fraction:
    try:
        return parse_rational(value)
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None


def _build(rid, e0, cols, dt) -> FlexResource:
    pmin, pmax, emin, emax = cols
    lengths = {len(c) for c in cols}
    if len(lengths) != 1:
        raise ParseError(f"resource {rid!r}: bound vectors differ in length")
    if not pmin:
        raise ParseError(f"resource {rid!r}: empty horizon")
    return FlexResource(rid, [dt * v for v in pmin], [dt * v for v in pmax], emin, emax, e0)


def _decode(document: bytes | str) -> str:
    if isinstance(document, bytes):
        try:
            return document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"document is not UTF-8: {exc}") from None
    return document


def read_resources(document: bytes | str, format: str = "json") -> tuple[FlexResource, ...]:
    """Resources as written, without any hypothesis check.

    Ids must be unique and horizons must agree.
    """
    text = _decode(document)
    if format == "json":
        res = _parse_json(text)
    elif format == "csv":
        res = _parse_csv(text)
    else:
        raise ParseError(f"unknown format {format!r}")
    ids = [r.id for r in res]
    if len(set(ids)) != len(ids):
        raise ParseError("resource ids are not unique")
    if len({r.T for r in res}) > 1:
        raise ParseError(f"resources disagree on the horizon: {sorted({r.T for r in res})}")
    return tuple(res)


def parse_resources(document: bytes | str, format: str = "json", *, tighten: bool = False) -> ResourceSet:
    """Read a resource document.

    JSON: ``{"dt": "...", "resources": [{"id", "e0"?, "p_min", "p_max",
    "e_min", "e_max"}]}``.  CSV: one row per ``(id, t)`` with columns
    ``id,t,p_min,p_max,e_min,e_max`` and optional ``dt`` and ``e0`` columns.
    Every number is a string parsed exactly.  Resources that violate a
    hypothesis raise :class:`HypothesisError` unless ``tighten`` is set.
    """
    raw = read_resources(document, format)
    return ResourceSet(tuple(tighten_bounds(r) if tighten else require_valid(r) for r in raw))


def _parse_json(text: str) -> list[FlexResource]:
    def no_float(s):
        raise ParseError(f"bare JSON number {s}: numbers must be strings")
    try:
        doc = json.loads(text, parse_float=no_float, parse_int=no_float)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("resources"), list):
        raise ParseError('expected an object with a "resources" list')
    dt = _num(doc.get("dt", "1"), "dt")
    if dt <= 0:
        raise ParseError("dt must be positive")
    out = []
    for n, item in enumerate(doc["resources"]):
        if not isinstance(item, dict) or not isinstance(item.get("id"), str):
            raise ParseError(f"resource #{n}: missing string id")
        rid = item["id"]
        cols = []
        for f in _FIELDS:
            vals = item.get(f)
            if not isinstance(vals, list):
                raise ParseError(f"resource {rid!r}: {f} must be a list")
            cols.append([_num(v, f"resource {rid!r} {f}") for v in vals])
        e0 = _num(item.get("e0", "0"), f"resource {rid!r} e0")
        out.append(_build(rid, e0, cols, dt))
    return out


def _parse_csv(text: str) -> list[FlexResource]:
    reader = csv.DictReader(io.StringIO(text))
    need = {"id", "t", *_FIELDS}
    if reader.fieldnames is None or not need <= set(reader.fieldnames):
        raise ParseError(f"CSV needs columns {sorted(need)}")
    rows: dict[str, dict[int, dict]] = {}
    e0s: dict[str, Fraction] = {}
    dts = set()
    for line, rec in enumerate(reader, 2):
        rid = (rec["id"] or "").strip()
        if not rid:
            raise ParseError(f"line {line}: empty id")
        try:
            t = int(rec["t"])
        except (TypeError, ValueError):
            raise ParseError(f"line {line}: bad interval index {rec['t']!r}") from None
        if t in rows.setdefault(rid, {}):
            raise ParseError(f"line {line}: duplicate ({rid}, {t})")
        rows[rid][t] = {f: _num(rec[f], f"line {line} {f}") for f in _FIELDS}
        if rec.get("e0") not in (None, ""):
            e0 = _num(rec["e0"], f"line {line} e0")
            if e0s.setdefault(rid, e0) != e0:
                raise ParseError(f"line {line}: conflicting e0 for {rid!r}")
        if rec.get("dt") not in (None, ""):
            dts.add(_num(rec["dt"], f"line {line} dt"))
    if len(dts) > 1:
        raise ParseError("conflicting dt values")
    dt = dts.pop() if dts else Fraction(1)
    if dt <= 0:
        raise ParseError("dt must be positive")
    out = []
    for rid, by_t in rows.items():
        if sorted(by_t) != list(range(1, len(by_t) + 1)):
            raise ParseError(f"resource {rid!r}: intervals must be 1..T without gaps")
        cols = [[by_t[t][f] for t in sorted(by_t)] for f in _FIELDS]
        out.append(_build(rid, e0s.get(rid, Fraction(0)), cols, dt))
    return out


def serialize_resources(rs: ResourceSet | Iterable[FlexResource], format: str = "json") -> str:
    """Write resources with ``dt = 1`` (power bounds already folded)."""
    res = list(rs)
    if format == "json":
        doc = {"dt": "1", "resources": [
            {
                "id": r.id,
                "e0": format_rational(r.e0),
                "p_min": [format_rational(v) for v in r.p_lo],
                "p_max": [format_rational(v) for v in r.p_hi],
                "e_min": [format_rational(v) for v in r.e_lo],
                "e_max": [format_rational(v) for v in r.e_hi],
            } for r in res
        ]}
        return json.dumps(doc, indent=2) + "\n"
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "t", *_FIELDS, "e0"])
        for r in res:
            for k in range(r.T):
                w.writerow([r.id, k + 1, *(format_rational(v) for v in
                                           (r.p_lo[k], r.p_hi[k], r.e_lo[k], r.e_hi[k])),
                            format_rational(r.e0)])
        return buf.getvalue()
    raise ValueError(f"unknown format {format!r}")
