"""Select the index convention of the closed form against the LP oracle.

Every :class:`~afrkit.afr.support.Variant` is evaluated on every direction
of a sweep of random resources; the variants whose upper and lower values
match the LP everywhere survive.  The greedy evaluator is swept alongside
as the fallback.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..instances import random_resource
from .directions import enumerate_directions
from .support import (Variant, all_variants, support_lower_greedy, support_lower_lp,
                      support_upper_greedy, support_upper_lp, two_candidate_form)


@dataclass
class CalibrationResult:
    survivors: list[Variant]
    mismatches: dict[Variant, int] = field(default_factory=dict)
    cases: int = 0
    greedy_mismatches: int = 0

    @property
    def unique(self) -> Variant | None:
        return self.survivors[0] if len(self.survivors) == 1 else None


def calibrate(max_T: int = 5, per_T: int = 100, seed: int = 0,
              variants: list[Variant] | None = None) -> CalibrationResult:
    variants = list(variants or all_variants())
    bad = {v: 0 for v in variants}
    rng = random.Random(seed)
    cases = 0
    greedy_bad = 0
    for T in range(1, max_T + 1):
        dirs = enumerate_directions(T)
        for n in range(per_T):
            r = random_resource(rng, T, f"c{T}_{n}")
            for d in dirs:
                hi = support_upper_lp(r, d.subset)
                lo = support_lower_lp(r, d.subset)
                cases += 1
                if support_upper_greedy(r, d.subset) != hi or support_lower_greedy(r, d.subset) != lo:
                    greedy_bad += 1
                for v in variants:
                    if two_candidate_form(r, d, True, v) != hi or two_candidate_form(r, d, False, v) != lo:
                        bad[v] += 1
    survivors = [v for v in variants if bad[v] == 0]
    return CalibrationResult(survivors, bad, cases, greedy_bad)
