"""Smoothed approximate functional equation on the critical line.

For Lambda(s) = gamma(s) L(s) = Lambda(1-s) with gamma(s) = (4 pi^2)^{-s}
Gamma_{f,g}(s) and simple poles at s = 0, 1 (residue R at s = 1),

    L(s) = sum b_n n^{-s} V_s(n/X) + gamma(1-s)/gamma(s) sum b_n n^{s-1} W_{1-s}(nX)
           - R [G_X(1-s)/(1-s) + G_X(-s)/s] / gamma(s),

    V_s(y) = (1/2 pi i) int_(c) y^{-w} G(w) gamma(s+w)/gamma(s) dw/w,
    W_z(y) = same with G(-w),   G_X(w) = G(w) X^w.

G(w) = exp(w^2/A - i beta w) with beta = pi sign(t); the linear term
cancels the exponential growth of gamma(s+w)/gamma(s) along the contour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gamma import GammaFactorSpec
from .series import RankinSelbergSeries

__all__ = ["Smoothing", "SMOOTHING_CONTOUR", "SMOOTHING_DYADIC", "afe_value", "solve_residue",
           "central_value", "CentralValue", "dyadic_partition"]

_DECAY = 40.0  # target: weights below e^{-40} are dropped


@dataclass(frozen=True)
class Smoothing:
    """AFE weight G(w) = exp(w^2/A - i beta w) X^w and the assembly style."""

    A: float = 16.0
    X: float = 1.0
    c: float = 1.0
    dyadic: bool = False
    label: str = "contour"


SMOOTHING_CONTOUR = Smoothing(A=16.0, X=1.0, dyadic=False, label="contour")
SMOOTHING_DYADIC = Smoothing(A=20.0, X=0.8, dyadic=True, label="dyadic")


def _beta(t: float) -> float:
    return math.pi * float(np.sign(t))


def _log_G(w: np.ndarray, sm: Smoothing, beta: float, dual: bool) -> np.ndarray:
    ww = -w if dual else w
    logx = -math.log(sm.X) if dual else math.log(sm.X)
    return ww * ww / sm.A - 1j * beta * ww + w * logx


_SIGMA = np.linspace(0.25, 80.0, 2000)


def _length(s: complex, X: float, A: float, gf: GammaFactorSpec) -> float:
    """Cutoff beyond which the AFE weight is below e^{-40}.

    Asymptotically gamma(s+w)/gamma(s) ~ T^{2 Re w} and V_s(y) ~ exp(-A log(y/(X T^2))^2 / 4).
    For small |s| the gamma ratio grows factorially instead, so the saddle bound
    min_sigma y^{-sigma} e^{sigma^2/A} |gamma(s+sigma)/gamma(s)| is also imposed.
    """
    T2 = abs(s + 0.5) * abs(s + 11.5) / (4 * math.pi ** 2)
    asymptotic = X * max(T2, 1.0) * math.exp(math.sqrt(4 * _DECAY / A)) * 1.5
    growth = (gf.log_completed(s + _SIGMA) - gf.log_completed(s)).real
    saddle = X * math.exp(float(np.min((_SIGMA * _SIGMA / A + growth + _DECAY) / _SIGMA)))
    return max(asymptotic, saddle)


def _nodes(sm: Smoothing, log_ymax: float) -> tuple[np.ndarray, float]:
    v_max = math.sqrt(_DECAY * sm.A) + 2.0
    # aliasing of y^{-iv} at spacing 2 pi/h must stay e^{-40} below the pole at w = 0
    h = 2 * math.pi / (log_ymax + _DECAY / sm.c + 5.0)
    k = int(math.ceil(v_max / h))
    return sm.c + 1j * h * np.arange(-k, k + 1), h


def dyadic_partition(n: np.ndarray, j: int) -> np.ndarray:
    """phi_j(n) = Phi(log2 n - j) - Phi(log2 n - j - 1); sum over j is 1 for n >= 1."""
    x = np.log2(n) - j
    return _step(x) - _step(x - 1.0)


def _psi(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def _step(x: np.ndarray) -> np.ndarray:
    # smooth, 0 for x <= 0 and 1 for x >= 1
    a = _psi(x)
    return a / (a + _psi(1.0 - x))


def _fsum_complex(values: np.ndarray) -> complex:
    return complex(math.fsum(values.real), math.fsum(values.imag))


def _weights(s: complex, n: np.ndarray, sm: Smoothing, gf: GammaFactorSpec, beta: float, dual: bool) -> np.ndarray:
    """V_s(n/X) (or W_s(nX) when ``dual``) by the trapezoid rule on Re w = c.

    The X^{+-w} factor lives in G_X, so the kernel is applied to n^{-w}.
    """
    w, h = _nodes(sm, math.log(max(float(np.max(n)), 1.0)))
    lg = gf.log_completed(s + w) - gf.log_completed(s)
    kern = np.exp(_log_G(w, sm, beta, dual) + lg) / w * (h / (2 * math.pi))
    out = np.empty(n.size, dtype=complex)
    logn = np.log(n)
    for lo in range(0, n.size, 4096):
        out[lo:lo + 4096] = np.exp(-np.outer(logn[lo:lo + 4096], w)) @ kern
    return out


def _sum_side(series: RankinSelbergSeries, z: complex, sm: Smoothing, gf: GammaFactorSpec,
              beta: float, dual: bool) -> complex:
    X = 1.0 / sm.X if dual else sm.X
    n_cut = int(math.ceil(_length(z, X, sm.A, gf)))
    if n_cut > series.n_max:
        raise IndexError(f"AFE needs coefficients to {n_cut}, table has {series.n_max}")
    n = np.arange(1, n_cut + 1, dtype=float)
    b = series.coefficients[1: n_cut + 1]
    base = b * np.exp(-z * np.log(n))
    if not sm.dyadic:
        # contour first: Dirichlet polynomial at every node, then the w-integral
        w, h = _nodes(sm, math.log(n_cut))
        lg = gf.log_completed(z + w) - gf.log_completed(z)
        kern = np.exp(_log_G(w, sm, beta, dual) + lg) / w * (h / (2 * math.pi))
        logn = np.log(n)
        dvals = np.zeros(w.size, dtype=complex)
        for lo in range(0, n.size, 4096):
            dvals += np.exp(-np.outer(w, logn[lo:lo + 4096])) @ base[lo:lo + 4096]
        return _fsum_complex(dvals * kern)
    # weights first, then a dyadic partition of unity in n
    vals = base * _weights(z, n, sm, gf, beta, dual)
    total = []
    for j in range(-1, int(math.log2(n_cut)) + 2):
        phi = dyadic_partition(n, j)
        if np.any(phi):
            total.append(_fsum_complex(vals * phi))
    return _fsum_complex(np.array(total))


def afe_value(s: complex, series: RankinSelbergSeries, gf: GammaFactorSpec, sm: Smoothing,
              residue: float = 0.0) -> tuple[complex, complex]:
    """(L(s) without the pole terms, coefficient of R), so L(s) = first - R * second.

    Shifting the contour from Re w = c to Re w = -c must cross the poles at
    w = -s and w = 1 - s and no pole of the gamma factor, so c > max(|Re s|, |1 - Re s|).
    """
    s = complex(s)
    if not sm.c > max(abs(s.real), abs(1.0 - s.real)):
        raise ValueError(f"contour abscissa c = {sm.c} too small for Re s = {s.real}")
    beta = _beta(s.imag)
    first = _sum_side(series, s, sm, gf, beta, dual=False)
    z = 1.0 - s
    ratio = np.exp(gf.log_completed(z) - gf.log_completed(s))
    second = _sum_side(series, z, sm, gf, beta, dual=True)
    main = first + complex(ratio) * second

    def log_GX(w):
        return w * w / sm.A - 1j * beta * w + w * math.log(sm.X)

    # log domain: G_X(1-s) is tiny exactly where 1/gamma(s) is huge
    lg = complex(gf.log_completed(s))
    pole = np.exp(log_GX(1 - s) - lg) / (1 - s) + np.exp(log_GX(-s) - lg) / s
    return complex(main), complex(pole)


def solve_residue(series: RankinSelbergSeries, gf: GammaFactorSpec,
                  pair: tuple[Smoothing, Smoothing] = (SMOOTHING_CONTOUR, SMOOTHING_DYADIC)) -> float:
    """Residue of Lambda at s = 1 from two smoothings at s = 1/2 (both must give the same L)."""
    m1, p1 = afe_value(0.5, series, gf, pair[0])
    m2, p2 = afe_value(0.5, series, gf, pair[1])
    return ((m1 - m2) / (p1 - p2)).real


@dataclass(frozen=True)
class CentralValue:
    t: float
    value: complex
    alternative: complex
    consistency_gap: float

    @property
    def stable(self) -> bool:
        return self.consistency_gap <= 1e-3


def central_value(t: float, series: RankinSelbergSeries, gf: GammaFactorSpec, residue: float = 0.0,
                  smoothing: Smoothing = SMOOTHING_CONTOUR,
                  alternative: Smoothing | None = SMOOTHING_DYADIC) -> CentralValue:
    """L(1/2 + it) with a second smoothing as a self-consistency check."""
    s = 0.5 + 1j * t
    m, p = afe_value(s, series, gf, smoothing)
    value = m - residue * p
    if alternative is None:
        return CentralValue(t, value, value, 0.0)
    m2, p2 = afe_value(s, series, gf, alternative)
    alt = m2 - residue * p2
    return CentralValue(t, value, alt, abs(value - alt) / abs(value))
