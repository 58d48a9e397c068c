"""Riemann zeta by Euler-Maclaurin summation."""

from __future__ import annotations

import math

import numpy as np

__all__ = ["zeta"]

# B_{2k} / (2k)!
_B2K = [1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510, 43867 / 798, -174611 / 330,
        854513 / 138, -236364091 / 2730]
_TERMS = [b / math.factorial(2 * k + 2) for k, b in enumerate(_B2K)]


def zeta(s: complex, terms: int = 12) -> complex:
    """zeta(s) for s != 1; accurate to ~1e-13 relative for |Im s| <= 1e4, Re s >= 0."""
    s = complex(s)
    if s == 1:
        raise ValueError("zeta has a pole at s = 1")
    N = int(max(20, abs(s.imag) / 2 + 20))
    n = np.arange(1, N, dtype=float)
    head = np.exp(-s * np.log(n))
    val = complex(math.fsum(head.real), math.fsum(head.imag))
    val += N ** (1 - s) / (s - 1) + 0.5 * N ** (-s)
    # rising factorial s (s+1) ... (s+2k-2) times N^{-s-2k+1}
    rising = s
    power = N ** (-s - 1)
    for k in range(terms):
        val += _TERMS[k] * rising * power
        rising *= (s + 2 * k + 1) * (s + 2 * k + 2)
        power /= N * N
    return val
