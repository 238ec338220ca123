"""Seeded random hypothesis-valid resources for tests, checks and benchmarks."""

from __future__ import annotations

import random
from fractions import Fraction

from .flex import EmptyResourceError, FlexResource, ResourceSet, from_generator, tighten_bounds


def _frac(rng: random.Random, lo: int, hi: int, max_den: int) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(lo * den, hi * den), den)


def random_resource(rng: random.Random, T: int, id: str = "r", max_den: int = 8,
                    e0: bool = False) -> FlexResource:
    """Draw raw bounds and repair them; retries until the trajectory set is nonempty."""
    while True:
        if rng.random() < 0.1:
            pl = [_frac(rng, -2, 1, max_den) for _ in range(T)]
            ph = [a + _frac(rng, 0, 2, max_den) for a in pl]
            r = from_generator(pl, ph, id)
            if e0:
                shift = _frac(rng, -2, 2, max_den)
                r = FlexResource(id, r.p_lo, r.p_hi, [v + shift for v in r.e_lo],
                                 [v + shift for v in r.e_hi], shift)
            return r
        pl = [_frac(rng, -2, 1, max_den) for _ in range(T)]
        ph = [a + _frac(rng, 0, 3, max_den) for a in pl]
        el = [_frac(rng, -3, 1, max_den) for _ in range(T)]
        eh = [a + _frac(rng, 0, 4, max_den) for a in el]
        start = _frac(rng, -1, 1, max_den) if e0 else Fraction(0)
        el = [v + start for v in el]
        eh = [v + start for v in eh]
        try:
            return tighten_bounds(FlexResource(id, pl, ph, el, eh, start))
        except EmptyResourceError:
            continue


def random_resource_set(rng: random.Random, N: int, T: int, max_den: int = 8,
                        e0: bool = False) -> ResourceSet:
    return ResourceSet(tuple(random_resource(rng, T, f"r{i}", max_den, e0) for i in range(N)), T)


def synthetic_fleet(N: int, T: int, seed: int = 0) -> ResourceSet:
    """Larger fleets for benchmarking; small denominators keep arithmetic cheap."""
    rng = random.Random(seed)
    return random_resource_set(rng, N, T, max_den=4)
