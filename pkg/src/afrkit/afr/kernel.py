"""Batched support evaluation over every subset at once.

The greedy support trajectory for a subset only depends, up to interval
``k``, on which of the intervals ``1..k`` are selected.  Walking the binary
decision tree level by level therefore shares every prefix: level ``k``
holds ``2^k`` states per resource and each node costs O(1), for
``O(N * 2^T)`` in total.  States are stored as integers over a common
denominator so the arrays stay exact.

Array row ``m`` at the end holds the subset with bit mask ``m``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import lcm
from typing import Sequence

import numpy as np

from ..flex import FlexResource

_INT64_BUDGET = 1 << 62


@dataclass(frozen=True)
class ScaledBounds:
    """Bounds of several resources as integer arrays of shape ``(T, N)``."""

    denom: int
    p_lo: np.ndarray
    p_hi: np.ndarray
    e_lo: np.ndarray
    e_hi: np.ndarray


def scale_bounds(resources: Sequence[FlexResource], T: int) -> ScaledBounds:
    """Integer bound arrays over one common denominator (energies relative to ``e0``)."""
    denom = 1
    for r in resources:
        for vec in (r.p_lo, r.p_hi, r.e_lo, r.e_hi):
            for v in vec:
                denom = lcm(denom, v.denominator)
        denom = lcm(denom, r.e0.denominator)

    def ints(vec, shift=0):
        return [v.numerator * (denom // v.denominator) - shift for v in vec]

    cols = {"p_lo": [], "p_hi": [], "e_lo": [], "e_hi": []}
    for r in resources:
        z = r.e0.numerator * (denom // r.e0.denominator)
        cols["p_lo"].append(ints(r.p_lo))
        cols["p_hi"].append(ints(r.p_hi))
        cols["e_lo"].append(ints(r.e_lo, z))
        cols["e_hi"].append(ints(r.e_hi, z))
    biggest = max((abs(x) for c in cols.values() for row in c for x in row), default=0)
    # states stay within the envelopes; totals are sums of at most T steps,
    # and the caller adds up at most N of them
    bound = (biggest + 1) * 2 * (T + 1) * max(len(resources), 1)
    dtype = np.int64 if bound < _INT64_BUDGET else object

    def arr(name):
        if not resources:
            return np.zeros((T, 0), dtype=dtype)
        return np.array(cols[name], dtype=dtype).T.reshape(T, len(resources))

    return ScaledBounds(denom, arr("p_lo"), arr("p_hi"), arr("e_lo"), arr("e_hi"))


def hypotheses_hold(b: ScaledBounds) -> np.ndarray:
    """Per-resource flag: every bound-ordering, envelope-rate and reachability
    condition holds (same conditions as ``validate_hypotheses``)."""
    T, N = b.p_lo.shape
    zero = np.zeros((1, N), dtype=b.p_lo.dtype)
    lo_prev = np.concatenate((zero, b.e_lo[:-1]))
    hi_prev = np.concatenate((zero, b.e_hi[:-1]))
    dlo, dhi = b.e_lo - lo_prev, b.e_hi - hi_prev
    ok = ((b.p_lo <= b.p_hi) & (b.e_lo <= b.e_hi)
          & (b.p_lo <= dlo) & (dlo <= b.p_hi) & (b.p_lo <= dhi) & (dhi <= b.p_hi)
          & (lo_prev + b.p_hi <= b.e_hi) & (b.e_lo <= hi_prev + b.p_lo))
    return ok.all(axis=0)


def _walk(b: ScaledBounds, prefix: int, depth: int, upper: bool) -> np.ndarray:
    """Totals for all masks whose low ``depth`` bits equal ``prefix``.

    Row ``m`` of the result is the subset ``prefix | (m << depth)``.
    """
    T, N = b.p_lo.shape
    dtype = b.p_lo.dtype
    e = np.zeros((1, N), dtype=dtype)
    total = np.zeros((1, N), dtype=dtype)
    push_in, push_out = (b.p_hi, b.p_lo) if upper else (b.p_lo, b.p_hi)
    for k in range(depth):
        inside = (prefix >> k) & 1
        nxt = np.minimum(np.maximum(e + (push_in[k] if inside else push_out[k]), b.e_lo[k]), b.e_hi[k])
        if inside:
            total = total + (nxt - e)
        e = nxt
    for k in range(depth, T):
        e_out = np.minimum(np.maximum(e + push_out[k], b.e_lo[k]), b.e_hi[k])
        e_in = np.minimum(np.maximum(e + push_in[k], b.e_lo[k]), b.e_hi[k])
        total = np.concatenate((total, total + (e_in - e)))
        e = np.concatenate((e_out, e_in))
    return total


def subset_supports(b: ScaledBounds, threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """``(lo, hi)`` arrays of shape ``(2^T, N)``, scaled by ``b.denom``.

    Row 0 (the empty subset) is all zeros.  With ``threads > 1`` the subsets
    are split by their lowest bits into independent subtrees; the assembled
    result does not depend on ``threads``.
    """
    T, N = b.p_lo.shape
    depth = 0
    while (1 << depth) < max(threads, 1) and depth < T:
        depth += 1
    prefixes = range(1 << depth)
    lo = np.empty((1 << T, N), dtype=b.p_lo.dtype)
    hi = np.empty((1 << T, N), dtype=b.p_lo.dtype)

    def task(prefix):
        return prefix, _walk(b, prefix, depth, False), _walk(b, prefix, depth, True)

    if depth == 0:
        results = [task(0)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(task, prefixes))
    for prefix, lo_part, hi_part in results:
        lo[prefix::1 << depth] = lo_part
        hi[prefix::1 << depth] = hi_part
    return lo, hi
