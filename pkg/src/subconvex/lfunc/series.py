"""Rankin-Selberg Dirichlet series: coefficients, partial sums and Euler products."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..arith import CuspFormData, MultiplicativeSequence
from ..numerics.bump import SmoothBump
from .zeta import zeta

__all__ = [
    "RankinSelbergSeries",
    "partial_sum_S",
    "primes_up_to",
    "satake_parameters",
    "euler_product",
    "EulerCheck",
    "euler_product_check",
    "dirichlet_value",
]

Coefficients = CuspFormData | MultiplicativeSequence


def _fsum_complex(values: np.ndarray) -> complex:
    return complex(math.fsum(values.real), math.fsum(values.imag))


@dataclass(frozen=True)
class RankinSelbergSeries:
    """L(s, f x g) = zeta(2s) sum lambda_f(n) lambda_g(n) n^{-s} = sum b_n n^{-s}."""

    f: Coefficients
    g: Coefficients
    _products: np.ndarray | None = field(default=None, repr=False, compare=False)
    _b: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def n_max(self) -> int:
        return min(self.f.n_max, self.g.n_max)

    @property
    def products(self) -> np.ndarray:
        """lambda_f(n) lambda_g(n), index 0 unused."""
        if self._products is None:
            n = self.n_max
            prod = np.asarray(self.f.lam[: n + 1]) * np.asarray(self.g.lam[: n + 1])
            prod[0] = 0.0
            prod.setflags(write=False)
            object.__setattr__(self, "_products", prod)
        return self._products

    def product_at(self, n: int) -> float:
        """On-demand recomputation, for checking the cache."""
        if not 1 <= n <= self.n_max:
            raise IndexError(f"index {n} outside 1..{self.n_max}")
        return float(self.f.lam[n]) * float(self.g.lam[n])

    @property
    def coefficients(self) -> np.ndarray:
        """b_n = sum_{m^2 | n} lambda_f lambda_g (n/m^2), including the zeta(2s) factor."""
        if self._b is None:
            p = self.products
            b = p.copy()
            m = 2
            while m * m <= self.n_max:
                sq = m * m
                b[sq::sq] += p[1: self.n_max // sq + 1]
                m += 1
            b.setflags(write=False)
            object.__setattr__(self, "_b", b)
        return self._b

    @staticmethod
    def zeta2s_factor(s: complex) -> complex:
        return zeta(2 * complex(s))

    def truncated(self, n_max: int) -> "RankinSelbergSeries":
        if n_max > self.n_max:
            raise IndexError("cannot extend a coefficient table by truncation")
        return RankinSelbergSeries(_Table(self.f.lam[: n_max + 1]), _Table(self.g.lam[: n_max + 1]))


@dataclass(frozen=True)
class _Table:
    lam: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.lam) - 1


def _window_terms(prod: np.ndarray, lo: int, hi: int, t: float, N: int, window) -> np.ndarray:
    n = np.arange(lo, hi, dtype=float)
    terms = prod[lo:hi] * np.exp(-1j * t * np.log(n))
    if window is not None:
        terms = terms * window(n / N)
    return terms


def partial_sum_S(N: int, t: float, series: RankinSelbergSeries, window: SmoothBump | None = None,
                  workers: int = 1, block: int = 65536) -> complex:
    """sum_{N <= n <= 2N} lambda_f(n) lambda_g(n) n^{-it} W(n/N).

    ``window=None`` is the sharp cutoff.  Terms are produced blockwise
    (optionally on threads) and reduced once with an exactly rounded sum,
    so the result does not depend on the block size or worker count.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if 2 * N > series.n_max:
        raise IndexError(f"2N = {2 * N} exceeds coefficient table n_max = {series.n_max}")
    prod = series.products
    edges = list(range(N, 2 * N + 1, block)) + [2 * N + 1]
    jobs = [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda ab: _window_terms(prod, ab[0], ab[1], t, N, window), jobs))
    else:
        parts = [_window_terms(prod, a, b, t, N, window) for a, b in jobs]
    return _fsum_complex(np.concatenate(parts))


def primes_up_to(n: int) -> np.ndarray:
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(math.isqrt(n)) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)


def satake_parameters(lam_p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Roots of X^2 - lambda(p) X + 1 (level 1, trivial character)."""
    lam_p = np.asarray(lam_p, dtype=complex)
    disc = np.sqrt(lam_p * lam_p - 4)
    return (lam_p + disc) / 2, (lam_p - disc) / 2


def euler_product(series: RankinSelbergSeries, s: complex, P: int,
                  g_satake: tuple[np.ndarray, np.ndarray] | None = None) -> complex:
    """prod_{p <= P} prod_{i,j} (1 - alpha_i(p) beta_j(p) p^{-s})^{-1}.

    ``g_satake`` overrides the second form's parameters (e.g. (1, 1) for the
    divisor function); by default they come from lambda_g(p).
    """
    if P > series.n_max:
        raise IndexError(f"P = {P} exceeds coefficient table n_max = {series.n_max}")
    p = primes_up_to(P)
    a1, a2 = satake_parameters(np.asarray(series.f.lam)[p])
    if g_satake is None:
        b1, b2 = satake_parameters(np.asarray(series.g.lam)[p])
    else:
        b1, b2 = (np.broadcast_to(np.asarray(v, dtype=complex), p.shape) for v in g_satake)
    x = np.exp(-complex(s) * np.log(p.astype(float)))
    log_terms = np.zeros(p.shape, dtype=complex)
    for a in (a1, a2):
        for b in (b1, b2):
            log_terms -= np.log1p(-a * b * x)
    return complex(np.exp(_fsum_complex(log_terms)))


def dirichlet_value(series: RankinSelbergSeries, s: complex, n_max: int | None = None) -> complex:
    """sum_{n <= n_max} b_n n^{-s} (zeta(2s) factor included through b_n)."""
    n_max = series.n_max if n_max is None else n_max
    b = series.coefficients[1: n_max + 1]
    n = np.arange(1, n_max + 1, dtype=float)
    return _fsum_complex(b * np.exp(-complex(s) * np.log(n)))


@dataclass(frozen=True)
class EulerCheck:
    dirichlet: complex
    euler: complex
    gap: float
    tol: float

    @property
    def converged(self) -> bool:
        return self.gap <= self.tol


def euler_product_check(series: RankinSelbergSeries, s: complex, P: int, tol: float = 1e-6,
                        g_satake=None) -> EulerCheck:
    """Truncated Dirichlet side versus truncated Euler side, with the achieved gap."""
    if complex(s).real < 1.5:
        raise ValueError("Re s must be >= 1.5")
    d = dirichlet_value(series, s)
    e = euler_product(series, s, P, g_satake)
    return EulerCheck(dirichlet=d, euler=e, gap=abs(d - e) / abs(e), tol=tol)
