"""Bessel functions J_n, Y_0 and K_0 for real arguments.

Three regimes for J_n: the power series near the origin, Miller's
backward recurrence in the transition zone, and the Hankel expansion
once its smallest term drops below double precision.  Every public
function accepts a scalar or an array and returns the same shape.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = ["bessel_j", "bessel_y0", "bessel_k0", "hankel_threshold", "MAX_ORDER", "MAX_ARG"]

MAX_ORDER = 64
MAX_ARG = 1.0e5
EULER_GAMMA = 0.57721566490153286061
_TINY_TERM = 1e-17
_RESCALE = 1e250


def _as_array(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return np.atleast_1d(arr), arr.ndim == 0


def _restore(values: np.ndarray, scalar: bool):
    return float(values[0]) if scalar else values


# ---------------------------------------------------------------------------
# regime 1: power series
# ---------------------------------------------------------------------------

def _series_j(n: int, x: np.ndarray) -> np.ndarray:
    # valid where (x/2)^2 <= n + 1, so the terms decay from the start
    half = x / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        log_lead = n * np.log(half) - math.lgamma(n + 1)
    lead = np.where(x > 0, np.exp(log_lead), 1.0 if n == 0 else 0.0)
    term = np.ones_like(x)
    total = np.ones_like(x)
    h2 = half * half
    for k in range(1, 80):
        term = -term * h2 / (k * (k + n))
        total = total + term
        if np.all(np.abs(term) <= 1e-18 * np.abs(total)):
            break
    return lead * total


# ---------------------------------------------------------------------------
# regime 2: Miller backward recurrence
# ---------------------------------------------------------------------------

def _miller(n: int, x: np.ndarray, want_y0: bool = False):
    """J_n(x) (and optionally J_0 plus the Neumann sum for Y_0) for x > 0."""
    top = max(n, float(np.max(x)))
    start = int(top + 30 + 4 * math.sqrt(top))
    start += start % 2
    f_next = np.zeros_like(x)
    f_cur = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)
    neumann = np.zeros_like(x)
    target = np.zeros_like(x)
    two_over_x = 2.0 / x
    for m in range(start, 0, -1):
        f_prev = m * two_over_x * f_cur - f_next
        f_next, f_cur = f_cur, f_prev
        order = m - 1
        if order == n:
            target = f_cur.copy()
        if order > 0 and order % 2 == 0:
            norm += 2.0 * f_cur
            if want_y0:
                k = order // 2
                neumann += (-1) ** k * f_cur / k
        big = np.abs(f_cur) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            f_cur *= scale
            f_next *= scale
            norm *= scale
            neumann *= scale
            target *= scale
    norm += f_cur  # J_0 term
    jn = target / norm
    if not want_y0:
        return jn
    return jn, f_cur / norm, neumann / norm


# ---------------------------------------------------------------------------
# regime 3: Hankel asymptotics
# ---------------------------------------------------------------------------

def _hankel_terms(n: int, x: float) -> list[float]:
    mu = 4.0 * n * n
    terms = [1.0]
    t = 1.0
    for k in range(1, 200):
        t *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        terms.append(abs(t))
        if abs(t) < _TINY_TERM or (k > 2 * n + 4 and terms[-1] > terms[-2]):
            break
    return terms


@lru_cache(maxsize=None)
def hankel_threshold(n: int) -> float:
    """Smallest x (on a 1/8 grid) where the Hankel series for order n reaches 1e-17."""
    def ok(x: float) -> bool:
        # the series must reach 1e-17 without any term large enough to cancel
        terms = _hankel_terms(n, x)
        return terms[-1] < _TINY_TERM and max(terms[1:]) <= 0.5

    lo, hi = 1.0, 16.0
    while not ok(hi):
        lo, hi = hi, hi * 2
    while hi - lo > 0.125:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _hankel_pq(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mu = 4.0 * n * n
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, 200):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if k % 2 == 1:
            q += term if k % 4 == 1 else -term
        else:
            p += -term if k % 4 == 2 else term
        if np.all(np.abs(term) < _TINY_TERM):
            break
    return p, q


def _hankel_j(n: int, x: np.ndarray) -> np.ndarray:
    p, q = _hankel_pq(n, x)
    chi = x - (0.5 * n + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _hankel_y(n: int, x: np.ndarray) -> np.ndarray:
    p, q = _hankel_pq(n, x)
    chi = x - (0.5 * n + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.sin(chi) + q * np.cos(chi))


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def _check_domain(order: int, x: np.ndarray, strict_positive: bool) -> None:
    if not (0 <= order <= MAX_ORDER):
        raise ValueError(f"order {order} outside 0..{MAX_ORDER}")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite Bessel argument")
    if strict_positive and np.any(x <= 0):
        raise ValueError("argument must be > 0")
    if np.any(x < 0):
        raise ValueError("argument must be >= 0")
    if np.any(x > MAX_ARG):
        raise ValueError(f"argument exceeds {MAX_ARG:g}")


def _miller_binned(n: int, x: np.ndarray, want_y0: bool):
    # keep the recurrence start close to each argument
    out = [np.empty_like(x) for _ in range(3 if want_y0 else 1)]
    edges = [0.0, 8.0, 32.0, 128.0, 512.0, 2048.0, 8192.0, np.inf]
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (x > lo) & (x <= hi)
        if np.any(sel):
            res = _miller(n, x[sel], want_y0)
            if want_y0:
                for o, r in zip(out, res):
                    o[sel] = r
            else:
                out[0][sel] = res
    return out if want_y0 else out[0]


def bessel_j(order: int, x):
    """Bessel function of the first kind J_order(x), x >= 0."""
    order = int(order)
    xs, scalar = _as_array(x)
    _check_domain(order, xs, strict_positive=False)
    out = np.empty_like(xs)
    near = xs <= 2.0 * math.sqrt(order + 1.0)
    far = xs >= hankel_threshold(order)
    mid = ~near & ~far
    if np.any(near):
        out[near] = _series_j(order, xs[near])
    if np.any(far):
        out[far] = _hankel_j(order, xs[far])
    if np.any(mid):
        out[mid] = _miller_binned(order, xs[mid], want_y0=False)
    return _restore(out, scalar)


def bessel_y0(x):
    """Bessel function of the second kind Y_0(x), x > 0."""
    xs, scalar = _as_array(x)
    _check_domain(0, xs, strict_positive=True)
    out = np.empty_like(xs)
    far = xs >= hankel_threshold(0)
    if np.any(far):
        out[far] = _hankel_y(0, xs[far])
    near = ~far
    if np.any(near):
        xn = xs[near]
        _, j0, neumann = _miller_binned(0, xn, want_y0=True)
        out[near] = (2.0 / math.pi) * ((np.log(xn / 2.0) + EULER_GAMMA) * j0 - 2.0 * neumann)
    return _restore(out, scalar)


def _k0_scaled(x: np.ndarray) -> np.ndarray:
    # e^x K_0(x) = int_0^inf exp(-x (cosh t - 1)) dt, trapezoid in t = c s;
    # c shrinks the step to the Gaussian width 1/sqrt(x) for large x
    h = 0.125
    c = np.minimum(1.0, 4.0 / np.sqrt(x))
    s_max = float(np.max(np.arccosh(1.0 + 745.0 / x) / c))
    s = np.arange(0.0, s_max + h, h)
    w = np.full(s.shape, h)
    w[0] = h / 2
    t = np.outer(c, s)
    return c * (np.exp(-x[:, None] * (np.cosh(t) - 1.0)) @ w)


def bessel_k0(x):
    """Modified Bessel function K_0(x), x > 0.  Underflows to 0 past x ~ 745."""
    xs, scalar = _as_array(x)
    _check_domain(0, xs, strict_positive=True)
    out = np.empty_like(xs)
    for chunk in np.array_split(np.arange(xs.size), max(1, xs.size // 4096)):
        sub = xs[chunk]
        out[chunk] = _k0_scaled(sub) * np.exp(-sub)
    return _restore(out, scalar)
