"""The aggregate feasible region model and its services.

A model over horizon ``T`` keeps, for each nonempty interval subset ``S'``
(in Gray order), bounds ``lo <= sum_{tau in S'} P(tau) <= hi`` on the
aggregate power increments ``P(tau) = E(tau) - E(tau-1)``, where
``E(0) = e0`` is the fleet's total initial energy.  Bounds are sums of
per-resource support values, so models of disjoint fleets add.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from ..flex import FlexResource, ResourceSet, energy_var, individual_polytope, require_valid
from ..fme import aggregate_var
from ..linear import LinearSystem, OPTIMAL, eq, feasible, ge, le
from ..rational import format_rational, parse_rational
from .directions import DirectionIndex, gray_masks, mask_of, subset_of
from .kernel import hypotheses_hold, scale_bounds, subset_supports

_SAFE = 1 << 62


class ModelError(ValueError):
    """Incompatible models or a malformed model document."""


def _rescale(arr: np.ndarray, factor: int) -> np.ndarray:
    if factor == 1:
        return arr
    if arr.dtype != object:
        peak = int(np.abs(arr).max()) if arr.size else 0
        if (peak + 1) * factor * max(arr.shape[1], 1) < _SAFE:
            return arr * factor
    return arr.astype(object) * factor


def _fractions(scaled, denom: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(v), denom) for v in scaled)


@dataclass(frozen=True)
class Contributions:
    """Per-resource bounds, integer arrays of shape ``(directions, N)`` over ``denom``."""

    ids: tuple[str, ...]
    denom: int
    lo: np.ndarray
    hi: np.ndarray
    e0s: tuple[Fraction, ...] = ()

    def __post_init__(self):
        if not self.e0s:
            object.__setattr__(self, "e0s", tuple(Fraction(0) for _ in self.ids))

    def e0_of(self, rid: str) -> Fraction:
        return self.e0s[self.ids.index(rid)]

    def of(self, rid: str) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
        j = self.ids.index(rid)
        return _fractions(self.lo[:, j], self.denom), _fractions(self.hi[:, j], self.denom)

    def combine(self, other: "Contributions") -> "Contributions":
        denom = np.lcm(self.denom, other.denom).item()
        fa, fb = denom // self.denom, denom // other.denom
        a_lo, a_hi = _rescale(self.lo, fa), _rescale(self.hi, fa)
        b_lo, b_hi = _rescale(other.lo, fb), _rescale(other.hi, fb)
        if object in (a_lo.dtype, b_lo.dtype):
            a_lo, a_hi, b_lo, b_hi = (x.astype(object) for x in (a_lo, a_hi, b_lo, b_hi))
        return Contributions(self.ids + other.ids, denom,
                             np.hstack((a_lo, b_lo)), np.hstack((a_hi, b_hi)),
                             self.e0s + other.e0s)

    def without(self, rid: str) -> "Contributions":
        j = self.ids.index(rid)
        keep = [k for k in range(len(self.ids)) if k != j]
        return Contributions(tuple(self.ids[k] for k in keep), self.denom,
                             self.lo[:, keep], self.hi[:, keep],
                             tuple(self.e0s[k] for k in keep))

    def totals(self) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
        lo = self.lo.sum(axis=1) if self.ids else np.zeros(self.lo.shape[0], dtype=np.int64)
        hi = self.hi.sum(axis=1) if self.ids else np.zeros(self.hi.shape[0], dtype=np.int64)
        return _fractions(lo, self.denom), _fractions(hi, self.denom)


@dataclass(frozen=True)
class AfrModel:
    T: int
    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]
    resources: tuple[str, ...] = ()
    e0: Fraction = Fraction(0)
    contributions: Contributions | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        D = (1 << self.T) - 1 if self.T > 0 else 0
        if len(self.lo) != D or len(self.hi) != D:
            raise ModelError(f"expected {D} directions for T={self.T}")
        for k, (a, b) in enumerate(zip(self.lo, self.hi)):
            if a > b:
                raise ModelError(f"direction {subset_of(self.masks[k])}: lo > hi")

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(gray_masks(self.T)) if self.T > 0 else ()

    @cached_property
    def directions(self) -> tuple[DirectionIndex, ...]:
        return tuple(DirectionIndex(self.T, m) for m in self.masks)

    @cached_property
    def _position(self) -> dict[int, int]:
        return {m: k for k, m in enumerate(self.masks)}

    def bounds(self, subset) -> tuple[Fraction, Fraction]:
        k = self._position[mask_of(subset)]
        return self.lo[k], self.hi[k]

    @property
    def N(self) -> int:
        return len(self.resources)

    @property
    def inequality_count(self) -> int:
        return 2 * len(self.lo)


# ------------------------------------------------------------------ build

def build_afr(rs: ResourceSet, threads: int = 1, keep_contributions: bool = True) -> AfrModel:
    """Exact aggregate model of ``rs``.

    Each bound is the sum over resources of that resource's support value in
    the direction.  ``threads`` splits the subset space across workers; the
    result is identical for every value.
    """
    T = rs.T
    if T == 0:
        return AfrModel(0, (), (), rs.ids, rs.e0)
    order = np.array(gray_masks(T))
    b = scale_bounds(rs.resources, T)
    for r, ok in zip(rs, hypotheses_hold(b)):
        if not ok:
            require_valid(r)  # raises with the full report
    if rs.N:
        lo_all, hi_all = subset_supports(b, threads)
        lo_all, hi_all = lo_all[order], hi_all[order]
    else:
        lo_all = np.zeros((len(order), 0), dtype=np.int64)
        hi_all = np.zeros((len(order), 0), dtype=np.int64)
    contrib = Contributions(rs.ids, b.denom, lo_all, hi_all, tuple(r.e0 for r in rs))
    lo, hi = contrib.totals()
    return AfrModel(T, lo, hi, rs.ids, rs.e0, contrib if keep_contributions else None)


def merge(a: AfrModel, b: AfrModel) -> AfrModel:
    """Model of the union of two disjoint fleets: bounds add."""
    if a.T != b.T:
        raise ModelError(f"horizon mismatch: {a.T} vs {b.T}")
    clash = set(a.resources) & set(b.resources)
    if clash:
        raise ModelError(f"resource ids in both models: {sorted(clash)}")
    contrib = None
    if a.contributions is not None and b.contributions is not None:
        contrib = a.contributions.combine(b.contributions)
    return AfrModel(
        a.T,
        tuple(x + y for x, y in zip(a.lo, b.lo)),
        tuple(x + y for x, y in zip(a.hi, b.hi)),
        a.resources + b.resources,
        a.e0 + b.e0,
        contrib,
    )


def empty_model(T: int) -> AfrModel:
    return build_afr(ResourceSet((), T))


def add_resource(a: AfrModel, r: FlexResource) -> AfrModel:
    """Add one resource's support values to every bound (``O(2^T)`` updates)."""
    return merge(a, build_afr(ResourceSet((r,))))


def remove_resource(a: AfrModel, rid: str) -> AfrModel:
    """Subtract a resource's recorded contribution."""
    if a.contributions is None:
        raise ModelError("model carries no per-resource contributions")
    if rid not in a.resources:
        raise ModelError(f"unknown resource {rid!r}")
    c_lo, c_hi = a.contributions.of(rid)
    rest = a.contributions.without(rid)
    return AfrModel(
        a.T,
        tuple(x - y for x, y in zip(a.lo, c_lo)),
        tuple(x - y for x, y in zip(a.hi, c_hi)),
        tuple(i for i in a.resources if i != rid),
        a.e0 - a.contributions.e0_of(rid),
        rest,
    )


# ------------------------------------------------------------- queries

@dataclass(frozen=True)
class RowViolation:
    subset: tuple[int, ...]
    side: str
    value: Fraction
    bound: Fraction

    def __str__(self) -> str:
        rel = "<" if self.side == "lower" else ">"
        return (f"S={{{','.join(map(str, self.subset))}}} {self.side}: "
                f"{format_rational(self.value)} {rel} {format_rational(self.bound)}")


@dataclass(frozen=True)
class Membership:
    violations: tuple[RowViolation, ...]

    @property
    def inside(self) -> bool:
        return not self.violations


def _increments(a: AfrModel, E: Sequence) -> list[Fraction]:
    if len(E) != a.T:
        raise ValueError(f"profile has {len(E)} entries, expected {a.T}")
    E = [Fraction(v) for v in E]
    prev = a.e0
    out = []
    for v in E:
        out.append(v - prev)
        prev = v
    return out


def check_membership(a: AfrModel, E: Sequence) -> Membership:
    """Test every direction's subset sum of increments against its bounds."""
    P = _increments(a, E)
    bad = []
    for k, m in enumerate(a.masks):
        val = sum((P[tau - 1] for tau in subset_of(m)), Fraction(0))
        if val < a.lo[k]:
            bad.append(RowViolation(subset_of(m), "lower", val, a.lo[k]))
        if val > a.hi[k]:
            bad.append(RowViolation(subset_of(m), "upper", val, a.hi[k]))
    return Membership(tuple(bad))


@dataclass(frozen=True)
class Disaggregation:
    feasible: bool
    allocations: dict[str, tuple[Fraction, ...]] | None = None


def disaggregate(rs: ResourceSet, E: Sequence) -> Disaggregation:
    """Split an aggregate energy profile into per-resource trajectories.

    Solves the joint bound system with ``sum_i e_i(t) = E(t)`` fixed; the
    first basic feasible solution found is returned.  ``E`` is absolute
    (``E(0)`` is the total initial energy).
    """
    if len(E) != rs.T:
        raise ValueError(f"profile has {len(E)} entries, expected {rs.T}")
    E = [Fraction(v) for v in E]
    variables: list[str] = []
    rows = []
    for r in rs:
        poly = individual_polytope(r)
        variables.extend(poly.variables)
        rows.extend(poly.rows)
    if not rs.N:
        ok = all(v == 0 for v in E)
        return Disaggregation(ok, {} if ok else None)
    for t in range(1, rs.T + 1):
        rows.append(eq({energy_var(r.id, t): 1 for r in rs}, E[t - 1]))
    out = feasible(LinearSystem(tuple(variables), tuple(rows)))
    if out.status != OPTIMAL:
        return Disaggregation(False)
    w = out.witness
    return Disaggregation(True, {
        r.id: tuple(w[energy_var(r.id, t)] for t in range(1, rs.T + 1)) for r in rs
    })


def direction_coefficients(subset) -> dict[int, int]:
    """``sum_{tau in S} (E(tau) - E(tau-1))`` as coefficients of ``E(0..T)``."""
    coeffs: dict[int, int] = {}
    for tau in subset:
        coeffs[tau] = coeffs.get(tau, 0) + 1
        coeffs[tau - 1] = coeffs.get(tau - 1, 0) - 1
    return {k: v for k, v in coeffs.items() if v}


def afr_as_system(a: AfrModel) -> LinearSystem:
    """Two rows per direction over ``E(1..T)``; ``E(0)`` is moved to the constant side."""
    names = tuple(aggregate_var(t) for t in range(1, a.T + 1))
    rows = []
    for k, m in enumerate(a.masks):
        coeffs = direction_coefficients(subset_of(m))
        shift = -coeffs.pop(0, 0) * a.e0
        c = {aggregate_var(tau): Fraction(v) for tau, v in coeffs.items()}
        rows.append(ge(c, a.lo[k] + shift))
        rows.append(le(c, a.hi[k] + shift))
    return LinearSystem(names, tuple(rows))


# ------------------------------------------------------------ documents

def model_to_json(a: AfrModel, *, contributions: bool = False, stats: Mapping | None = None) -> str:
    doc: dict = {"T": a.T}
    if a.e0:
        doc["E0"] = format_rational(a.e0)
    doc["constraints"] = [
        {"S": list(subset_of(m)), "lo": format_rational(l), "hi": format_rational(h)}
        for m, l, h in zip(a.masks, a.lo, a.hi)
    ]
    doc["resources"] = list(a.resources)
    if contributions:
        if a.contributions is None:
            raise ModelError("model carries no per-resource contributions")
        block = {}
        for rid in a.resources:
            lo, hi = a.contributions.of(rid)
            block[rid] = {"e0": format_rational(a.contributions.e0_of(rid)),
                          "lo": [format_rational(v) for v in lo],
                          "hi": [format_rational(v) for v in hi]}
        doc["contributions"] = block
    if stats is not None:
        doc["stats"] = dict(stats)
    return json.dumps(doc, indent=1) + "\n"


def model_to_csv(a: AfrModel) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["S", "lo", "hi"])
    for m, l, h in zip(a.masks, a.lo, a.hi):
        w.writerow([";".join(map(str, subset_of(m))), format_rational(l), format_rational(h)])
    return buf.getvalue()


def _rat(v, where) -> Fraction:
    try:
        return parse_rational(v)
    except ValueError as exc:
        raise ModelError(f"{where}: {exc}") from None


def model_from_json(text: str | bytes) -> AfrModel:
    """Read a model document; constraints may come in any order."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("T"), int) or doc["T"] < 0:
        raise ModelError('expected an object with integer "T"')
    T = doc["T"]
    cons = doc.get("constraints")
    if not isinstance(cons, list):
        raise ModelError('"constraints" must be a list')
    masks = gray_masks(T) if T else []
    pos = {m: k for k, m in enumerate(masks)}
    lo: list = [None] * len(masks)
    hi: list = [None] * len(masks)
    order = []
    for n, c in enumerate(cons):
        S = c.get("S") if isinstance(c, dict) else None
        if not isinstance(S, list) or not S or not all(isinstance(x, int) and 1 <= x <= T for x in S) \
                or len(set(S)) != len(S):
            raise ModelError(f"constraint #{n}: S must be a nonempty subset of 1..{T}")
        m = mask_of(S)
        k = pos[m]
        if lo[k] is not None:
            raise ModelError(f"constraint #{n}: duplicate direction {sorted(S)}")
        lo[k] = _rat(c.get("lo"), f"constraint #{n} lo")
        hi[k] = _rat(c.get("hi"), f"constraint #{n} hi")
        order.append(k)
    if any(v is None for v in lo):
        raise ModelError(f"document lists {len(cons)} directions, expected {len(masks)}")
    resources = doc.get("resources", [])
    if not isinstance(resources, list) or not all(isinstance(x, str) for x in resources):
        raise ModelError('"resources" must be a list of ids')
    resources = tuple(resources)
    e0 = _rat(doc.get("E0", "0"), "E0")
    contrib = None
    block = doc.get("contributions")
    if block is not None:
        if not isinstance(block, dict) or set(block) != set(resources):
            raise ModelError("contributions must cover exactly the listed resources")
        fr_lo = [[None] * len(masks) for _ in resources]
        fr_hi = [[None] * len(masks) for _ in resources]
        denom = 1
        for j, rid in enumerate(resources):
            entry = block[rid]
            if not isinstance(entry, dict) or len(entry.get("lo", ())) != len(cons) \
                    or len(entry.get("hi", ())) != len(cons):
                raise ModelError(f"contributions of {rid!r} do not match the constraints")
            for n, k in enumerate(order):
                fr_lo[j][k] = _rat(entry["lo"][n], f"contribution {rid!r}")
                fr_hi[j][k] = _rat(entry["hi"][n], f"contribution {rid!r}")
                denom = np.lcm(denom, np.lcm(fr_lo[j][k].denominator, fr_hi[j][k].denominator)).item()
        arr_lo = np.array([[int(fr_lo[j][k] * denom) for j in range(len(resources))]
                           for k in range(len(masks))], dtype=object).reshape(len(masks), len(resources))
        arr_hi = np.array([[int(fr_hi[j][k] * denom) for j in range(len(resources))]
                           for k in range(len(masks))], dtype=object).reshape(len(masks), len(resources))
        e0s = tuple(_rat(block[rid].get("e0", "0"), f"contribution {rid!r} e0") for rid in resources)
        if sum(e0s, Fraction(0)) != e0:
            raise ModelError("contribution e0 values do not add up to E0")
        contrib = Contributions(resources, denom, arr_lo, arr_hi, e0s)
        if contrib.totals() != (tuple(lo), tuple(hi)):
            raise ModelError("contributions do not add up to the bounds")
    return AfrModel(T, tuple(lo), tuple(hi), resources, e0, contrib)


def models_identical(a: AfrModel, b: AfrModel) -> bool:
    """Same horizon, bounds, resource ids and initial energy (order of ids ignored)."""
    return (a.T == b.T and a.lo == b.lo and a.hi == b.hi and a.e0 == b.e0
            and sorted(a.resources) == sorted(b.resources))
