"""Per-resource support values ``max / min sum_{tau in S} P(tau)``.

Three evaluators are provided:

* ``support_*_lp``: the LP over the resource's bound rows (ground truth);
* ``support_*_greedy``: a saturating trajectory, O(T);
* ``support_*_closed``: the public O(T) evaluator (the greedy, guarded by
  a hypothesis check).

``two_candidate_form`` evaluates the min-of-two-candidates expression under
any of the index readings in :func:`all_variants`.  The calibration sweep
found no reading that equals the LP on every direction (the best one misses
subsets whose window has an interior energy bound that binds), so it is kept
for calibration and comparison only.

All values are in normalized energy coordinates (``e(0) = 0``); the
initial energy cancels out of any sum of power increments.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..flex import FlexResource, HypothesisError, energy_var, individual_polytope, validate_hypotheses
from ..linear import OPTIMAL, optimize
from .directions import DirectionIndex, mask_of


class InfeasibleResourceError(ValueError):
    pass


def _increment_objective(r: FlexResource, subset) -> dict[str, Fraction]:
    obj: dict[str, Fraction] = {}
    for tau in subset:
        obj[energy_var(r.id, tau)] = obj.get(energy_var(r.id, tau), 0) + 1
        if tau > 1:
            obj[energy_var(r.id, tau - 1)] = obj.get(energy_var(r.id, tau - 1), 0) - 1
    return obj


def _support_lp(r: FlexResource, subset, sense: str) -> Fraction:
    subset = sorted(set(subset))
    if not subset or subset[0] < 1 or subset[-1] > r.T:
        raise ValueError(f"subset must be a nonempty subset of 1..{r.T}")
    out = optimize(individual_polytope(r), _increment_objective(r, subset), sense)
    if out.status != OPTIMAL:
        raise InfeasibleResourceError(f"resource {r.id!r}: LP is {out.status}")
    # e(0) is the constant e0 and enters with coefficient -1 when 1 in S
    return out.value - (r.e0 if subset[0] == 1 else 0)


def support_upper_lp(r: FlexResource, subset) -> Fraction:
    return _support_lp(r, subset, "max")


def support_lower_lp(r: FlexResource, subset) -> Fraction:
    return _support_lp(r, subset, "min")


def _greedy(r: FlexResource, mask: int, upper: bool) -> Fraction:
    lo_e, hi_e = r.norm_e_lo, r.norm_e_hi
    e = Fraction(0)
    total = Fraction(0)
    for k in range(r.T):
        inside = (mask >> k) & 1
        push_up = inside if upper else not inside
        target = e + (r.p_hi[k] if push_up else r.p_lo[k])
        nxt = min(max(target, lo_e[k]), hi_e[k])
        if inside:
            total += nxt - e
        e = nxt
    return total


def support_upper_greedy(r: FlexResource, subset) -> Fraction:
    """Drive ``p_hi`` inside ``S`` and ``p_lo`` outside, clipping to the envelope."""
    return _greedy(r, mask_of(subset), True)


def support_lower_greedy(r: FlexResource, subset) -> Fraction:
    return _greedy(r, mask_of(subset), False)


@dataclass(frozen=True)
class Variant:
    """One reading of the index conventions of the closed form.

    ``s_offset``: anchor interval is ``T - g + s_offset``.
    ``end_plus`` / ``end_minus``: the slice ``[g : q - 1]`` or ``[g : q]``
    used in the branch labelled +1 / -1.
    ``labels``: ``"last-bit"`` labels a path +1 iff ``u(q) = 1``; ``"parity"``
    labels it +1 iff ``u`` has an even number of switches, which is the
    opposite assignment.
    """

    s_offset: int
    end_plus: int
    end_minus: int
    labels: str

    def label(self, d: DirectionIndex) -> int:
        plus = d.u[-1] == 1
        if self.labels == "parity":
            plus = not plus
        return 1 if plus else -1

    def __str__(self) -> str:
        return (f"s=T-g+{self.s_offset}, +:[g:q{self.end_plus - 1:+d}], "
                f"-:[g:q{self.end_minus - 1:+d}], labels={self.labels}")


def all_variants() -> list[Variant]:
    return [Variant(s, ep, em, lab)
            for s in (0, 1) for ep in (0, 1) for em in (0, 1)
            for lab in ("last-bit", "parity")]


# fewest mismatches in the calibration sweep; not exact, see module docstring
BEST_VARIANT = Variant(s_offset=1, end_plus=0, end_minus=0, labels="last-bit")


def two_candidates(r: FlexResource, d: DirectionIndex, upper: bool,
                   variant: Variant = BEST_VARIANT) -> tuple[Fraction, Fraction]:
    """The energy-anchored and the power-anchored candidate under ``variant``.

    ``end = 0`` selects the slice ``[g : q-1]`` (intervals ``T-g+1`` down to
    ``t+2``), ``end = 1`` the slice ``[g : q]`` (down to ``t+1``).
    """
    T, t, g = d.T, d.t, d.g
    sel = set(d.window)

    def e_at(bounds, tau):
        return Fraction(0) if tau <= 0 else bounds[tau - 1]

    if upper:
        e_anchor, e_other, p_in, p_out = r.norm_e_hi, r.norm_e_lo, r.p_hi, r.p_lo
    else:
        e_anchor, e_other, p_in, p_out = r.norm_e_lo, r.norm_e_hi, r.p_lo, r.p_hi
    s = T - g + variant.s_offset
    label = variant.label(d)
    end = variant.end_plus if label == 1 else variant.end_minus
    last = t + 2 - end  # slice covers intervals s_top down to `last`
    top = T - g + 1
    rng = range(last, top + 1)
    slack = sum((p_out[tau - 1] for tau in rng if tau not in sel), Fraction(0))
    push = sum((p_in[tau - 1] for tau in rng if tau in sel), Fraction(0))
    if label == 1:
        first = e_at(e_anchor, s) - slack
        second = push + e_at(e_anchor, t + 1)
    else:
        first = e_at(e_anchor, s) - e_at(e_other, t + 1) - slack
        second = push
    return first, second


def two_candidate_form(r: FlexResource, d: DirectionIndex, upper: bool, variant: Variant = BEST_VARIANT) -> Fraction:
    """The tighter of the two candidates."""
    pick = min if upper else max
    return pick(*two_candidates(r, d, upper, variant))


def _require_hypotheses(r: FlexResource) -> None:
    report = validate_hypotheses(r)
    if not report.ok:
        raise HypothesisError(r.id, report.violations)


def support_upper_closed(r: FlexResource, d: DirectionIndex) -> Fraction:
    """O(T) upper support; refuses resources that break a hypothesis."""
    _require_hypotheses(r)
    return _greedy(r, d.mask, True)


def support_lower_closed(r: FlexResource, d: DirectionIndex) -> Fraction:
    _require_hypotheses(r)
    return _greedy(r, d.mask, False)
