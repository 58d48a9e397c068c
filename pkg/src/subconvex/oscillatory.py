"""Exponential-integral certificates and the phase analysis of the main argument.

The second-derivative certificate: if |f''| >= r on [a, b], g/f' is
monotone on each interval where f' keeps its sign and |g| <= M, then
|int_a^b g e(f)| <= 8M/sqrt(r).

The main-term integrals, with omega a bump on [1, 2]:

    I(n, q, nu)  = int omega(x) x^{-i nu} e(Nux/(qQ) + 2 sqrt(nNx)/q) dx
    curly I(m,n) = int omega(x) x^{-it} e(2 sqrt(mNx)/q + 2 sqrt(nN(x+y1))/q) dx

After x = y^2 the second phase is P(y) = -(t/pi) log y + (2 sqrt(mN)/q) y
+ s (2 sqrt(nN)/q) sqrt(y^2 + y1), s = +1 by default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .numerics.bump import SmoothBump
from .numerics.quadrature import integrate

__all__ = [
    "CertificateError",
    "PhaseProfile",
    "Certificate",
    "second_derivative_certificate",
    "random_certified_profile",
    "default_omega",
    "eval_I",
    "PaperPhase",
    "CurlyIResult",
    "eval_curly_I",
    "curly_I_batch",
    "stationary_points",
    "kernel_I_k",
    "DiagonalResult",
    "diagonal_threshold",
    "diagonal_constraint_check",
    "stationary_m",
    "stationary_M0",
    "decay_onset",
    "DIAGONAL_CONSTANT",
    "u_split_ratio",
]

Fn = Callable[[np.ndarray], np.ndarray]
ENVELOPE = 10.0
EPS = 0.05
# separation constant for the k = 0 kernel to fall below 1e-6 (measured onset is 30..44)
DIAGONAL_CONSTANT = 50.0


class CertificateError(ValueError):
    """A precondition of the second-derivative bound failed on the sample grid."""


def default_omega() -> SmoothBump:
    return SmoothBump(center=1.5, width=0.5)


# ---------------------------------------------------------------------------
# second-derivative certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseProfile:
    f: Fn
    g: Fn
    a: float
    b: float
    fp: Fn
    fpp: Fn
    M: float
    r: float | None = None  # certified lower bound for |f''|, if known analytically


@dataclass(frozen=True)
class Certificate:
    bound: float
    measured: float
    r: float
    M: float
    quadrature_error: float

    @property
    def holds(self) -> bool:
        return self.measured <= self.bound


def _monotone_on_sign_pieces(ratio: np.ndarray, sign: np.ndarray) -> bool:
    # split wherever f' changes sign and test each piece separately
    cuts = np.flatnonzero(np.diff(sign) != 0) + 1
    for piece in np.split(np.arange(ratio.size), cuts):
        if piece.size < 3:
            continue
        d = np.diff(ratio[piece])
        scale = np.max(np.abs(ratio[piece]))
        tol = 1e-12 * scale
        if not (np.all(d >= -tol) or np.all(d <= tol)):
            return False
    return True


def second_derivative_certificate(p: PhaseProfile, samples: int = 4001, tol: float = 1e-12) -> Certificate:
    """Bound 8M/sqrt(r) and the measured |int g e(f)|, with preconditions checked."""
    x = np.linspace(p.a, p.b, samples)
    fpp = np.asarray(p.fpp(x), dtype=float)
    if np.any(fpp > 0) and np.any(fpp < 0) or np.any(fpp == 0):
        raise CertificateError("f'' changes sign or vanishes on the sample grid")
    r_sampled = float(np.min(np.abs(fpp)))
    r = r_sampled if p.r is None else min(p.r, r_sampled)
    if not r > 0:
        raise CertificateError("f'' lower bound is not positive")
    g = np.asarray(p.g(x), dtype=float)
    if np.max(np.abs(g)) > p.M * (1 + 1e-12):
        raise CertificateError("|g| exceeds the declared M")
    fp = np.asarray(p.fp(x), dtype=float)
    keep = np.abs(fp) > 1e-9 * np.max(np.abs(fp))
    if not _monotone_on_sign_pieces(g[keep] / fp[keep], np.sign(fp[keep])):
        raise CertificateError("g/f' is not monotone on a sign piece of f'")
    res = integrate(p.g, p.f, (p.a, p.b), tol=tol)
    # quadrature error is added, never subtracted
    measured = abs(res.value) + res.error_estimate
    return Certificate(bound=8.0 * p.M / math.sqrt(r), measured=measured, r=r, M=p.M,
                       quadrature_error=res.error_estimate)


def random_certified_profile(rng: np.random.Generator) -> PhaseProfile:
    """One random phase from a family with an analytic lower bound on |f''|."""
    family = int(rng.integers(0, 3))
    a = float(rng.uniform(0.2, 3.0))
    b = a + float(rng.uniform(0.3, 4.0))
    sign = 1.0 if rng.random() < 0.5 else -1.0
    if family == 0:
        # cubic with f'' = 2 c2 + 6 c3 x, positive on [a, b]
        c3 = float(rng.uniform(-1.0, 1.0)) * 10 ** rng.uniform(-1, 1.5)
        c1 = float(rng.uniform(-50, 50))
        lo = min(6 * c3 * a, 6 * c3 * b)
        c2 = 0.5 * (float(10 ** rng.uniform(-1, 3)) - lo)
        f = lambda x: sign * (c1 * x + c2 * x ** 2 + c3 * x ** 3)
        fp = lambda x: sign * (c1 + 2 * c2 * x + 3 * c3 * x ** 2)
        fpp = lambda x: sign * (2 * c2 + 6 * c3 * x)
        r = min(2 * c2 + 6 * c3 * a, 2 * c2 + 6 * c3 * b)
    elif family == 1:
        # A x log x, f'' = A / x
        A = float(10 ** rng.uniform(-0.5, 3))
        c1 = float(rng.uniform(-20, 20))
        f = lambda x: sign * (A * x * np.log(x) + c1 * x)
        fp = lambda x: sign * (A * (np.log(x) + 1) + c1)
        fpp = lambda x: sign * A / x
        r = A / b
    else:
        # A exp(x/L), f'' = A/L^2 exp(x/L)
        A = float(10 ** rng.uniform(-0.5, 2.5))
        L = float(rng.uniform(0.5, 3.0))
        c1 = float(rng.uniform(-20, 20))
        f = lambda x: sign * (A * np.exp(x / L) + c1 * x)
        fp = lambda x: sign * (A / L * np.exp(x / L) + c1)
        fpp = lambda x: sign * A / L ** 2 * np.exp(x / L)
        r = A / L ** 2 * math.exp(a / L)
    M = float(10 ** rng.uniform(-1, 1))
    amp_kind = int(rng.integers(0, 3))
    if amp_kind == 0:
        g = lambda x: np.full_like(np.asarray(x, dtype=float), M)
    elif amp_kind == 1:
        g = lambda x: M * (np.asarray(x) - a) / (b - a)
    else:
        g = lambda x: -M * np.exp(-(np.asarray(x) - a))
    return PhaseProfile(f=f, g=g, a=a, b=b, fp=fp, fpp=fpp, M=M, r=r)


# ---------------------------------------------------------------------------
# the integral I(n, q, nu)
# ---------------------------------------------------------------------------

def eval_I(n: float, q: int, nu: float, u: float, N: float, omega: SmoothBump, Q: float,
           tol: float = 1e-11) -> complex:
    """int omega(x) x^{-i nu} e(N u x/(qQ) + 2 sqrt(nNx)/q) dx."""
    lo, hi = omega.support
    if lo < 0:
        raise ValueError("omega must be supported in [0, inf)")

    def phase(x):
        return -nu * np.log(x) / (2 * math.pi) + N * u * x / (q * Q) + 2 * np.sqrt(n * N * x) / q

    return integrate(omega, phase, (max(lo, 1e-300), hi), tol=tol).value


# ---------------------------------------------------------------------------
# curly I and the phase P
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PaperPhase:
    t: float
    N: float
    q: int
    m: float
    n: float
    y1: float
    K: float
    sign: int = 1

    @property
    def Q(self) -> float:
        return math.sqrt(self.N / self.K)

    @property
    def M0(self) -> float:
        return (self.q * self.t) ** 2 / self.N + self.K

    @property
    def N0(self) -> float:
        return (self.q * self.K) ** 2 / self.N + self.K

    @property
    def y1_scale(self) -> float:
        return self.q / (self.Q * self.K)

    def with_(self, **kw) -> "PaperPhase":
        vals = {k: getattr(self, k) for k in ("t", "N", "q", "m", "n", "y1", "K", "sign")}
        vals.update(kw)
        return PaperPhase(**vals)

    def P(self, y):
        y = np.asarray(y, dtype=float)
        return (-(self.t / math.pi) * np.log(y) + 2 * math.sqrt(self.m * self.N) / self.q * y
                + self.sign * 2 * math.sqrt(self.n * self.N) / self.q * np.sqrt(y * y + self.y1))

    def P1(self, y):
        y = np.asarray(y, dtype=float)
        return (-self.t / (math.pi * y) + 2 * math.sqrt(self.m * self.N) / self.q
                + self.sign * 2 * math.sqrt(self.n * self.N) / self.q * y / np.sqrt(y * y + self.y1))

    def P2(self, y):
        y = np.asarray(y, dtype=float)
        return (self.t / (math.pi * y * y)
                + self.sign * 2 * math.sqrt(self.n * self.N) / self.q * self.y1 / (y * y + self.y1) ** 1.5)

    def phase_x(self, x):
        """Phase of curly I in the x variable (cycles)."""
        x = np.asarray(x, dtype=float)
        return (-self.t * np.log(x) / (2 * math.pi) + 2 * np.sqrt(self.m * self.N * x) / self.q
                + self.sign * 2 * np.sqrt(self.n * self.N * (x + self.y1)) / self.q)


@dataclass(frozen=True)
class CurlyIResult:
    value: complex
    error_estimate: float
    stationary_points: tuple[float, ...]
    min_abs_P2: float


def stationary_points(p: PaperPhase, y_lo: float, y_hi: float, grid: int = 257) -> tuple[float, ...]:
    """Roots of P' in [y_lo, y_hi] by bracketing on a grid and safeguarded bisection."""
    y = np.linspace(y_lo, y_hi, grid)
    vals = p.P1(y)
    roots = []
    for i in range(grid - 1):
        a, b = y[i], y[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0:
            roots.append(float(a))
            continue
        if fa * fb > 0:
            continue
        for _ in range(200):
            mid = 0.5 * (a + b)
            fm = float(p.P1(mid))
            if fa * fm <= 0:
                b, fb = mid, fm
            else:
                a, fa = mid, fm
            if b - a < 1e-15 * max(1.0, abs(mid)):
                break
        roots.append(0.5 * (a + b))
    return tuple(roots)


def eval_curly_I(p: PaperPhase, omega: SmoothBump | None = None, tol: float = 1e-11,
                 samples: int = 4001) -> CurlyIResult:
    omega = default_omega() if omega is None else omega
    lo, hi = omega.support
    if p.y1 < 0 and lo + p.y1 <= 0:
        raise ValueError("x + y1 must stay positive on the support of omega")
    res = integrate(omega, p.phase_x, (lo, hi), tol=tol)
    y_lo, y_hi = math.sqrt(lo), math.sqrt(hi)
    # omega vanishes at both ends, so P'' is sampled on the open support
    y = np.linspace(y_lo, y_hi, samples + 2)[1:-1]
    return CurlyIResult(
        value=res.value,
        error_estimate=res.error_estimate,
        stationary_points=stationary_points(p, y_lo, y_hi),
        min_abs_P2=float(np.min(np.abs(p.P2(y)))),
    )


def curly_I_batch(p: PaperPhase, m_values: np.ndarray, omega: SmoothBump | None = None) -> np.ndarray:
    """curly I(m, p.n; q) for many m at once by the trapezoid rule on supp(omega).

    omega and all its derivatives vanish at the ends, so the trapezoid rule
    is spectrally accurate once the node spacing resolves the phase.
    """
    omega = default_omega() if omega is None else omega
    lo, hi = omega.support
    m_values = np.atleast_1d(np.asarray(m_values, dtype=float))
    slope = (p.t / (2 * math.pi * lo) + math.sqrt(float(np.max(m_values)) * p.N / lo) / p.q
             + math.sqrt(p.n * p.N / (lo + p.y1)) / p.q)
    n_nodes = 512 + int(math.ceil(4 * (hi - lo) * slope))
    h = (hi - lo) / n_nodes
    x = lo + h * np.arange(1, n_nodes)
    base = omega(x) * h * np.exp(2j * math.pi * (-p.t * np.log(x) / (2 * math.pi)
                                                  + p.sign * 2 * np.sqrt(p.n * p.N * (x + p.y1)) / p.q))
    out = np.empty(m_values.size, dtype=complex)
    sq = np.sqrt(x)
    for lo_i in range(0, m_values.size, 256):
        chunk = m_values[lo_i:lo_i + 256]
        out[lo_i:lo_i + 256] = np.exp(2j * math.pi * np.outer(2 * np.sqrt(chunk * p.N) / p.q, sq)) @ base
    return out


def stationary_m(t: float, N: float, q: float, y0: float = 1.2, fraction: float = 1.0) -> float:
    """m placing the stationary point of the m-term against -(t/pi) log y at y0.

    ``fraction`` < 1 leaves the rest of t/(pi y0) for the n-term.
    """
    return (fraction * q * t / (2 * math.pi * y0)) ** 2 / N


# ---------------------------------------------------------------------------
# Cauchy-Poisson kernels
# ---------------------------------------------------------------------------

def kernel_I_k(k: int, n1: float, n2: float, p: PaperPhase, d: int, M0: float,
               omega: SmoothBump | None = None, z_weight: SmoothBump | None = None) -> complex:
    """int w(z) e(k M0 z/d) curly I(M0 z, n1) conj(curly I(M0 z, n2)) dz."""
    if p.q % d != 0:
        raise ValueError(f"d = {d} must divide q = {p.q}")
    omega = default_omega() if omega is None else omega
    zw = default_omega() if z_weight is None else z_weight
    z_lo, z_hi = zw.support
    # the product of the two integrals varies slowly in z; the twist sets the node count
    freq = abs(k) * M0 / d + 2 * p.t + 2 * math.sqrt(M0 * p.N) / p.q * 0.05
    n_nodes = 512 + int(math.ceil(4 * (z_hi - z_lo) * freq))
    h = (z_hi - z_lo) / n_nodes
    z = z_lo + h * np.arange(1, n_nodes)
    i1 = curly_I_batch(p.with_(n=n1), M0 * z, omega)
    i2 = i1 if n2 == n1 else curly_I_batch(p.with_(n=n2), M0 * z, omega)
    vals = zw(z) * h * np.exp(2j * math.pi * k * M0 * z / d) * i1 * np.conj(i2)
    return complex(math.fsum(vals.real), math.fsum(vals.imag))


@dataclass(frozen=True)
class DiagonalResult:
    ok: bool
    threshold: float
    kernel: complex
    separation: float


def stationary_M0(p: PaperPhase, n: float, y0: float = 1.2, spread: float = 1.5) -> float:
    """M0 such that m = M0 z, z in [1, 2], moves a stationary point of P across supp(omega).

    With the n-term on the minus branch, P'(y0) = 0 needs
    2 sqrt(mN)/q = t/(pi y0) + 2 sqrt(nN)/q y0/sqrt(y0^2 + y1) (approximately).
    """
    c = p.t / (math.pi * y0) - p.sign * 2 * math.sqrt(n * p.N) / p.q
    if c <= 0:
        raise ValueError("no stationary point for this n on the chosen branch")
    return (c * p.q / 2) ** 2 / p.N / spread


def diagonal_threshold(p: PaperPhase, constant: float = DIAGONAL_CONSTANT, eps: float = EPS) -> float:
    """constant * t^eps * q sqrt(N0) / sqrt(N)."""
    return constant * p.t ** eps * p.q * math.sqrt(p.N0) / math.sqrt(p.N)


def diagonal_constraint_check(n1: float, n2: float, p: PaperPhase, M0: float,
                              constant: float = DIAGONAL_CONSTANT, negligible: float = 1e-6,
                              omega: SmoothBump | None = None) -> DiagonalResult:
    """True iff |n1 - n2| <= threshold or the k = 0 kernel is negligible."""
    thr = diagonal_threshold(p, constant)
    kern = kernel_I_k(0, n1, n2, p, 1, M0, omega)
    sep = abs(n1 - n2)
    return DiagonalResult(ok=bool(sep <= thr or abs(kern) <= negligible), threshold=thr, kernel=kern,
                          separation=sep)


def decay_onset(n1: float, p: PaperPhase, M0: float, negligible: float = 1e-6,
                max_separation: int = 4096, omega: SmoothBump | None = None) -> int:
    """Smallest integer separation D with |kernel(0, n1, n1 + D)| <= negligible.

    Doubling then bisection; assumes the decay is essentially monotone past the onset.
    """
    def small(D: int) -> bool:
        return abs(kernel_I_k(0, n1, n1 + D, p, 1, M0, omega)) <= negligible

    if small(0):
        return 0
    hi = 1
    while not small(hi):
        hi *= 2
        if hi > max_separation:
            raise RuntimeError("kernel did not decay within max_separation")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if small(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# u-integral split
# ---------------------------------------------------------------------------

def u_split_ratio(scheme, q: int, lam: float, u_max: float = 4.0) -> tuple[float, float]:
    """|int 1 e(lam u) du| and |int h(q,u) e(lam u) du| over |u| <= u_max.

    ``scheme`` is a delta scheme providing h(q, u) = g(q, u) - 1.
    """
    one = integrate(lambda u: np.ones_like(u), lambda u: lam * u, (-u_max, u_max), tol=1e-12).value
    hpart = integrate(lambda u: scheme.h(q, u), lambda u: lam * u, (-u_max, u_max), tol=1e-10).value
    return abs(one), abs(hpart)
