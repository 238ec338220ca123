"""Acceptance gate: one test per criterion, each recording a one-line verdict.

The verdicts are printed in the terminal summary (see conftest.py) and also
when this file is run directly with ``python3 tests/test_acceptance.py``.
"""

import itertools
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from afrkit.afr.calibration import calibrate
from afrkit.afr.directions import enumerate_directions
from afrkit.afr.model import (
    add_resource,
    afr_as_system,
    build_afr,
    check_membership,
    disaggregate,
    empty_model,
    merge,
    model_from_json,
    model_to_json,
    models_identical,
)
from afrkit.afr.support import BEST_VARIANT, support_lower_closed, support_lower_lp, \
    support_upper_closed, support_upper_lp
from afrkit.bench import exp2_fit_r2, linear_fit_r2, time_build
from afrkit.flex import ResourceSet, from_generator
from afrkit.fme import aggregate_projection_oracle
from afrkit.instances import random_resource, random_resource_set
from afrkit.linear import sample_vertex, system_equivalent
from afrkit.theorems.checks import CHECKS, DEFAULT_SIZES, run_suite

RESULTS: dict[int, str] = {}


@contextmanager
def criterion(n, title):
    detail = {}
    try:
        yield detail
    except BaseException:
        RESULTS[n] = f"[FAIL] {n}. {title} {_fmt(detail)}"
        raise
    RESULTS[n] = f"[PASS] {n}. {title} {_fmt(detail)}"


def _fmt(detail):
    return "(" + ", ".join(f"{k}={v}" for k, v in detail.items()) + ")" if detail else ""


def random_trajectory(r, rng, den=16):
    """Forward random walk through the per-interval feasible window."""
    prev, out = r.e0, []
    for t in range(len(r.p_lo)):
        lo = max(r.e_lo[t], prev + r.p_lo[t])
        hi = min(r.e_hi[t], prev + r.p_hi[t])
        assert lo <= hi, "window closed on a hypothesis-valid resource"
        pick = rng.random()
        if pick < 0.2:
            v = lo
        elif pick < 0.4:
            v = hi
        else:
            v = lo + (hi - lo) * Fraction(rng.randint(0, den), den)
        out.append(v)
        prev = v
    return out


def test_c1_oracle_equality():
    grid = list(itertools.product((1, 2, 3), (1, 2, 3, 4)))
    rng = random.Random(101)
    with criterion(1, "oracle equality on 50 instances") as d:
        bad = 0
        t0 = time.perf_counter()
        for k in range(50):
            N, T = grid[k % len(grid)]
            rs = random_resource_set(rng, N, T, max_den=8, e0=True)
            bad += not system_equivalent(afr_as_system(build_afr(rs)), aggregate_projection_oracle(rs))
        d.update(mismatches=bad, seconds=round(time.perf_counter() - t0, 1))
        assert bad == 0


def test_c2_constraint_count():
    rng = random.Random(202)
    with criterion(2, "2(2^T-1) inequalities for T=1..12") as d:
        wrong = []
        for T in range(1, 13):
            rs = random_resource_set(rng, 3, T, max_den=4)
            model = build_afr(rs, keep_contributions=False)
            emitted = 2 * len(model_from_json(model_to_json(model)).lo)
            if not (model.inequality_count == emitted == 2 * (2 ** T - 1)):
                wrong.append(T)
        d.update(wrong=wrong)
        assert not wrong


def test_c3_closed_form_calibration():
    with criterion(3, "closed form equals LP, all directions x 100 resources, T<=5") as d:
        rng = random.Random(303)
        cases = bad = 0
        for T in range(1, 6):
            dirs = enumerate_directions(T)
            for n in range(100):
                r = random_resource(rng, T, f"a{T}_{n}", e0=True)
                for di in dirs:
                    cases += 1
                    if support_upper_closed(r, di) != support_upper_lp(r, di.subset) \
                            or support_lower_closed(r, di) != support_lower_lp(r, di.subset):
                        bad += 1
        sweep = calibrate(5, 100, 0)
        d.update(cases=cases, mismatches=bad, two_candidate_best=sweep.mismatches[BEST_VARIANT],
                 two_candidate_survivors=len(sweep.survivors))
        assert bad == 0 and sweep.greedy_mismatches == 0


def test_c4_soundness_sampling():
    rng = random.Random(404)
    sizes = [(10, 8), (10, 3), (5, 6), (3, 8), (1, 8), (7, 5)]
    with criterion(4, "1000 feasible aggregates per instance inside the model") as d:
        outside = 0
        for N, T in sizes:
            rs = random_resource_set(rng, N, T, e0=True)
            model = build_afr(rs, keep_contributions=False)
            for _ in range(1000):
                trajs = [random_trajectory(r, rng) for r in rs]
                E = [sum(col) for col in zip(*trajs)]
                outside += not check_membership(model, E).inside
        d.update(instances=len(sizes), samples=1000 * len(sizes), violations=outside)
        assert outside == 0


def test_c5_completeness():
    rng = random.Random(505)
    sizes = [(2, 2), (2, 3), (3, 3), (2, 4), (3, 4)]
    with criterion(5, "200 model vertices per instance disaggregate") as d:
        failures = 0
        for N, T in sizes:
            rs = random_resource_set(rng, N, T, e0=True)
            system = afr_as_system(build_afr(rs))
            for _ in range(200):
                w = sample_vertex(system, {v: rng.choice((-1, 1)) for v in system.variables})
                E = [w[f"E({t})"] for t in range(1, T + 1)]
                out = disaggregate(rs, E)
                if not out.feasible:
                    failures += 1
                    continue
                for t in range(T):
                    assert sum(traj[t] for traj in out.allocations.values()) == E[t]
        d.update(instances=len(sizes), vertices=200 * len(sizes), failures=failures)
        assert failures == 0


def test_c6_theorem_suites():
    names = [c for c in CHECKS if c.startswith(("method1", "theorem"))]
    with criterion(6, "theorem suites, 100 seeds each") as d:
        recs = run_suite(100, DEFAULT_SIZES, names)
        bad = sorted({r.check for r in recs if not r.passed})
        d.update(checks=len(names), runs=len(recs), failing=bad)
        assert len(recs) == 100 * len(names) and not bad


def test_c7_merge_algebra():
    rng = random.Random(707)
    with criterion(7, "merge and add chains reproduce direct builds on 50 partitions") as d:
        bad = 0
        for _ in range(50):
            N, T = rng.randint(2, 8), rng.randint(1, 5)
            rs = random_resource_set(rng, N, T, e0=True)
            direct = build_afr(rs)
            parts = [[] for _ in range(rng.randint(2, N))]
            for r in rs:
                parts[rng.randrange(len(parts))].append(r)
            parts = [p for p in parts if p]
            merged = build_afr(ResourceSet(tuple(parts[0]), T))
            for p in parts[1:]:
                merged = merge(merged, build_afr(ResourceSet(tuple(p), T)))
            chain = empty_model(T)
            for r in rng.sample(list(rs), N):
                chain = add_resource(chain, r)
            bad += not (models_identical(merged, direct) and models_identical(chain, direct))
        d.update(mismatches=bad)
        assert bad == 0


def test_c8_scaling():
    with criterion(8, "build time linear in N and c*2^T in T; N=1000,T=12 under 60 s") as d:
        Ns = [100, 200, 400, 800]
        by_n = [time_build(N, 10, repeats=5).seconds for N in Ns]
        Ts = list(range(8, 15))
        by_t = [time_build(100, T, repeats=5).seconds for T in Ts]
        big = time_build(1000, 12, repeats=1)
        r2_n, r2_t = linear_fit_r2(Ns, by_n), exp2_fit_r2(Ts, by_t)
        d.update(r2_linear_N=round(r2_n, 4), r2_exp2_T=round(r2_t, 4), big_seconds=round(big.seconds, 2))
        assert r2_n >= 0.95 and r2_t >= 0.95 and big.seconds <= 60
        assert big.rows == 2 * (2 ** 12 - 1)


def test_c9_generator_fleets():
    rng = random.Random(909)
    with criterion(9, "generator fleets: singleton bounds are power sums") as d:
        bad = fleets = 0
        for _ in range(40):
            N, T = rng.randint(1, 6), rng.randint(1, 6)
            gens = []
            for i in range(N):
                pl = [Fraction(rng.randint(-8, 4), rng.randint(1, 4)) for _ in range(T)]
                ph = [a + Fraction(rng.randint(0, 8), rng.randint(1, 4)) for a in pl]
                gens.append(from_generator(pl, ph, f"g{i}"))
            model = build_afr(ResourceSet(tuple(gens)))
            fleets += 1
            for t in range(1, T + 1):
                want = (sum(g.p_lo[t - 1] for g in gens), sum(g.p_hi[t - 1] for g in gens))
                bad += model.bounds((t,)) != want
        d.update(fleets=fleets, mismatches=bad)
        assert bad == 0


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
