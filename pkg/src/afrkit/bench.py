"""Build-time measurements and the two growth fits used to judge them."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .afr.model import build_afr
from .instances import synthetic_fleet


@dataclass(frozen=True)
class Timing:
    N: int
    T: int
    seconds: float
    rows: int

    @property
    def per_direction(self) -> float:
        return self.seconds / (2 ** self.T - 1)


def time_build(N: int, T: int, *, repeats: int = 3, threads: int = 1, seed: int = 0) -> Timing:
    """Best-of-``repeats`` wall time of one build on a synthetic fleet."""
    rs = synthetic_fleet(N, T, seed)
    best = float("inf")
    rows = 0
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        model = build_afr(rs, threads=threads, keep_contributions=False)
        best = min(best, time.perf_counter() - t0)
        rows = model.inequality_count
    return Timing(N, T, best, rows)


def _r2(y: np.ndarray, fitted: np.ndarray) -> float:
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot


def linear_fit_r2(x: Sequence[float], y: Sequence[float]) -> float:
    """R^2 of the least-squares line ``y = a + b x``."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    b, a = np.polyfit(x, y, 1)
    return _r2(y, a + b * x)


def exp2_fit_r2(T: Sequence[int], y: Sequence[float]) -> float:
    """R^2 on log scale of ``y = c * 2^T`` (only ``c`` is fitted)."""
    T, logy = np.asarray(T, float), np.log(np.asarray(y, float))
    logc = float(np.mean(logy - T * np.log(2)))
    return _r2(logy, logc + T * np.log(2))
