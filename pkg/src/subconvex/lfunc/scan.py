"""Parameter calculators and the growth-exponent scan on the critical line."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .afe import central_value
from .gamma import GammaFactorSpec
from .series import RankinSelbergSeries, partial_sum_S

__all__ = ["ScanParameters", "scan_parameters", "ScanRow", "ScanResult", "exponent_scan", "scan_lengths",
           "DEFAULT_T_GRID"]

DEFAULT_T_GRID = (50.0, 100.0, 200.0, 350.0, 500.0)


@dataclass(frozen=True)
class ScanParameters:
    t: float
    N: float
    K: float
    Q: float
    M0: float
    N0: float


def scan_parameters(t: float, N: float) -> ScanParameters:
    """K = t^{3/4}, Q = sqrt(N/K) and the ranges M0, N0 at q = Q."""
    if t < 10:
        raise ValueError("t must be >= 10")
    if N > t ** 2.05:
        raise ValueError("N must be <= t^2.05")
    K = t ** 0.75
    Q = math.sqrt(N / K)
    return ScanParameters(t=t, N=N, K=K, Q=Q, M0=(Q * t) ** 2 / N + K, N0=(Q * K) ** 2 / N + K)


def scan_lengths(t: float, n_max: int) -> list[int]:
    """Dyadic N = 2^j with N <= t^2/2 and 2N <= n_max."""
    cap = min(t * t / 2, n_max / 2)
    out, N = [], 1
    while N <= cap:
        out.append(N)
        N *= 2
    return out


@dataclass(frozen=True)
class ScanRow:
    t: float
    sup_ratio: float
    sup_at: int
    abs_L: float
    consistency_gap: float
    runtime_ms: int


@dataclass(frozen=True)
class ScanResult:
    rows: tuple[ScanRow, ...]
    slope: float
    intercept: float


def _row(t: float, series: RankinSelbergSeries, gf: GammaFactorSpec, residue: float, check: bool) -> ScanRow:
    start = time.perf_counter()
    ratios = [(abs(partial_sum_S(N, t, series)) / math.sqrt(N), N) for N in scan_lengths(t, series.n_max)]
    sup, at = max(ratios)
    cv = central_value(t, series, gf, residue) if check else central_value(t, series, gf, residue, alternative=None)
    ms = int(round((time.perf_counter() - start) * 1000))
    return ScanRow(t=t, sup_ratio=sup, sup_at=at, abs_L=abs(cv.value), consistency_gap=cv.consistency_gap,
                   runtime_ms=ms)


def exponent_scan(t_grid, series: RankinSelbergSeries, gf: GammaFactorSpec, residue: float = 0.0,
                  workers: int = 1, check: bool = False) -> ScanResult:
    """Least-squares slope of log|L(1/2+it)| against log t plus per-t sup_N |S(N)|/sqrt(N)."""
    t_grid = [float(t) for t in t_grid]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(lambda t: _row(t, series, gf, residue, check), t_grid))
    else:
        rows = [_row(t, series, gf, residue, check) for t in t_grid]
    x = np.log([r.t for r in rows])
    y = np.log([r.abs_L for r in rows])
    slope, intercept = np.polyfit(x, y, 1)
    return ScanResult(rows=tuple(rows), slope=float(slope), intercept=float(intercept))
