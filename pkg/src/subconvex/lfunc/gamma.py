"""Log-Gamma (Lanczos and Stirling) and the Rankin-Selberg gamma factor."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["log_gamma", "stirling_log_gamma", "GammaFactorSpec"]

# Lanczos coefficients, g = 7, n = 9
_G = 7.0
_COEF = np.array([
    0.99999999999980993, 676.5203681218851, -1259.1392167224028,
    771.32342877765313, -176.61502916214059, 12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)

# B_{2k} / (2k (2k-1)) for the Stirling series
_STIRLING = [1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188, -691 / 360360, 1 / 156, -3617 / 122400]


def _lanczos(z: np.ndarray) -> np.ndarray:
    z = z - 1.0
    acc = np.full(z.shape, _COEF[0], dtype=complex)
    for k in range(1, len(_COEF)):
        acc = acc + _COEF[k] / (z + k)
    t = z + _G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(acc)


def log_gamma(z):
    """log Gamma(z) for complex z (any branch; use differences or exp)."""
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty(arr.shape, dtype=complex)
    right = arr.real >= 0.5
    out[right] = _lanczos(arr[right])
    if np.any(~right):
        w = arr[~right]
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        out[~right] = math.log(math.pi) - np.log(np.sin(np.pi * w)) - _lanczos(1.0 - w)
    return complex(out[0]) if np.ndim(z) == 0 else out


def stirling_log_gamma(z: complex, shift: int = 20) -> complex:
    """Stirling series after shifting Re z upward by ``shift`` with the recurrence."""
    z = complex(z)
    acc = 0j
    for _ in range(shift):
        acc -= cmath.log(z)
        z += 1
    val = (z - 0.5) * cmath.log(z) - z + _HALF_LOG_2PI
    zp = z
    for c in _STIRLING:
        val += c / zp
        zp *= z * z
    return val + acc


@dataclass(frozen=True)
class GammaFactorSpec:
    """Gamma factor of L(s, f x g) for level-1 data.

    ``case = "holomorphic"``: Gamma(s + |k-k'|/2) Gamma(s + (k+k')/2 - 1).
    ``case = "other"`` with spectral parameter r (r = 0 for the divisor
    function): Gamma(s + (k-1)/2 + ir) Gamma(s + (k-1)/2 - ir).
    The completed function carries (4 pi^2)^{-s}.
    """

    k: int = 12
    k2: int = 12
    case: str = "holomorphic"
    r: float = 0.0

    def __post_init__(self):
        if self.case not in ("holomorphic", "other"):
            raise ValueError(f"unknown gamma factor case {self.case!r}")

    @property
    def shifts(self) -> tuple[complex, complex]:
        if self.case == "holomorphic":
            return abs(self.k - self.k2) / 2, (self.k + self.k2) / 2 - 1
        return (self.k - 1) / 2 + 1j * self.r, (self.k - 1) / 2 - 1j * self.r

    def log_gamma_fg(self, s):
        a, b = self.shifts
        s = np.asarray(s, dtype=complex)
        return log_gamma(s + a) + log_gamma(s + b)

    def log_completed(self, s):
        """log of (4 pi^2)^{-s} Gamma_{f,g}(s)."""
        return self.log_gamma_fg(s) - np.asarray(s, dtype=complex) * math.log(4 * math.pi ** 2)

    def stirling_log_abs(self, s: complex) -> float:
        a, b = self.shifts
        return (stirling_log_gamma(s + a) + stirling_log_gamma(s + b)).real
