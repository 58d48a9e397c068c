"""Two-sided Voronoi and Poisson summation.

Voronoi, level 1, weight k, (a, q) = 1, a abar = 1 mod q:

    sum_n lam(n) e(an/q) V(n/X)
        = (X/q) sum_n lam(n) e(-abar n/q) F(nX/q^2),
    F(z) = 2 pi i^k int V(y) J_{k-1}(4 pi sqrt(zy)) dy.

Divisor function: a main term (X/q) int V(y) (log(yX) + 2 gamma - 2 log q) dy
plus the dual sums with -2 pi Y_0 (twist e(-abar n/q)) and 4 K_0 (twist
e(+abar n/q)) kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np

from .arith import CuspFormData, MultiplicativeSequence
from .numerics.bessel import EULER_GAMMA, bessel_j, bessel_k0, bessel_y0
from .numerics.bump import BumpSum, SmoothBump

__all__ = [
    "VoronoiCase",
    "VoronoiResult",
    "PoissonCase",
    "voronoi_lhs",
    "voronoi_rhs",
    "voronoi_rhs_detail",
    "voronoi_gap",
    "bessel_transform",
    "poisson_two_sided",
    "dual_truncation_profile",
    "truncation_threshold",
    "default_voronoi_bump",
    "default_poisson_bump",
    "modular_inverse",
]

Kernel = Literal["J", "Y0", "K0"]


def default_voronoi_bump() -> SmoothBump:
    return SmoothBump(center=2.5, width=2.0, sharpness=25.0)


def default_poisson_bump() -> SmoothBump:
    return SmoothBump(center=4.0, width=3.0, sharpness=4.0)


def modular_inverse(a: int, q: int) -> int:
    """abar with a abar = 1 mod q, by the extended Euclidean algorithm."""
    if q == 1:
        return 0
    r0, r1, s0, s1 = a % q, q, 1, 0
    while r1:
        k = r0 // r1
        r0, r1 = r1, r0 - k * r1
        s0, s1 = s1, s0 - k * s1
    if r0 != 1:
        raise ValueError(f"{a} is not invertible mod {q}")
    return s0 % q


def _e(x) -> np.ndarray:
    return np.exp(2j * math.pi * np.asarray(x, dtype=float))


@dataclass(frozen=True)
class VoronoiCase:
    coefficients: CuspFormData | MultiplicativeSequence
    a: int
    q: int
    X: float
    V: SmoothBump | BumpSum

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if math.gcd(self.a, self.q) != 1:
            raise ValueError(f"gcd(a, q) = gcd({self.a}, {self.q}) != 1")
        if self.a == 0 and self.q != 1:
            raise ValueError("a = 0 is only allowed for q = 1")
        if self.V.support[0] <= 0:
            raise ValueError("V must be supported in (0, inf)")
        if not self.X > 0:
            raise ValueError("X must be positive")

    @property
    def is_divisor(self) -> bool:
        return isinstance(self.coefficients, MultiplicativeSequence)

    @property
    def abar(self) -> int:
        return modular_inverse(self.a, self.q)


@dataclass(frozen=True)
class VoronoiResult:
    value: complex
    main_term: float
    dual_plus: complex
    dual_minus: complex
    dual_cutoff: int
    tail_bound: float


def voronoi_lhs(case: VoronoiCase) -> complex:
    lo, hi = case.V.support
    n_lo = max(1, int(math.ceil(lo * case.X)))
    n_hi = int(math.floor(hi * case.X))
    if n_hi < n_lo:
        return 0j
    lam = np.asarray(case.coefficients.lam)
    if n_hi > len(lam) - 1:
        raise IndexError(f"coefficient table ends at {len(lam) - 1}, need {n_hi}")
    n = np.arange(n_lo, n_hi + 1)
    terms = lam[n] * _e(case.a * n / case.q) * case.V(n / case.X)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def bessel_transform(V, kind: Kernel, z, order: int = 11, argument: str = "4pi_sqrt") -> np.ndarray:
    """int V(y) B(c(zy)) dy for B in {J_order, Y_0, K_0}, vectorized in z >= 0.

    ``argument`` selects c(zy) = 4 pi sqrt(zy) or the alternative
    sqrt(4 pi zy); only the first satisfies the summation formula.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    lo, hi = V.support
    half = 0.5 * (hi - lo)
    out = np.empty(z.size)
    order_idx = np.argsort(z, kind="stable")
    for start in range(0, z.size, 128):
        idx = order_idx[start:start + 128]
        zc = z[idx]
        f_max = math.sqrt(float(zc.max()) / lo)  # oscillation frequency of the kernel in y
        n_nodes = 512 + int(math.ceil(8 * half * f_max))
        h = (hi - lo) / n_nodes
        y = lo + h * np.arange(1, n_nodes)
        wv = V(y) * h
        if argument == "4pi_sqrt":
            arg = 4 * math.pi * np.sqrt(np.outer(zc, y))
        elif argument == "sqrt_4pi":
            arg = np.sqrt(4 * math.pi * np.outer(zc, y))
        else:
            raise ValueError(f"unknown Bessel argument convention {argument!r}")
        if kind == "J":
            vals = bessel_j(order, arg.ravel())
        elif kind == "Y0":
            vals = bessel_y0(arg.ravel())
        elif kind == "K0":
            # K_0(x) < e^{-x}; past x = 60 the transform is below 1e-26
            vals = np.zeros(arg.size)
            live = arg.ravel() < 60.0
            if np.any(live):
                vals[live] = bessel_k0(arg.ravel()[live])
        else:
            raise ValueError(f"unknown kernel {kind!r}")
        out[idx] = vals.reshape(arg.shape) @ wv
    return out


@lru_cache(maxsize=256)
def _kernel_table(V, kind: str, order: int, argument: str, z_step: float, n_cut: int) -> np.ndarray:
    # kernels depend on (q, X) only through z = n X/q^2, so they are shared by all residues a
    table = bessel_transform(V, kind, z_step * np.arange(1, n_cut + 1), order=order, argument=argument)
    table.flags.writeable = False
    return table


def _auto_cutoff(case: VoronoiCase, omega_target: float = 160.0) -> int:
    # dual terms die once the kernel frequency w sqrt(z/y) beats the bump's Fourier decay
    lo, hi = case.V.support
    half = 0.5 * (hi - lo)
    z_star = hi * (omega_target / (2 * math.pi * half)) ** 2
    return max(16, int(math.ceil(z_star * case.q ** 2 / case.X)))


def voronoi_rhs_detail(
    case: VoronoiCase,
    dual_cutoff: int | None = None,
    include_main: bool = True,
    dual_sign: int = -1,
    argument: str = "4pi_sqrt",
    tail_tol: float = 1e-10,
) -> VoronoiResult:
    """Right side of the Voronoi formula with its pieces.

    ``dual_sign`` = -1 gives the twist e(-abar n/q) on the J / Y_0 branch
    (the correct convention); +1 is kept only to show that it fails.
    """
    n_cut = _auto_cutoff(case) if dual_cutoff is None else int(dual_cutoff)
    lam = np.asarray(case.coefficients.lam)
    if n_cut > len(lam) - 1:
        raise IndexError(f"dual sum needs coefficients up to {n_cut}, table ends at {len(lam) - 1}")
    n = np.arange(1, n_cut + 1)
    scale = case.X / case.q
    twist = _e(dual_sign * case.abar * n / case.q)
    lam_n = lam[n]

    if case.is_divisor:
        z_step = case.X / case.q ** 2
        f_plus = -2 * math.pi * _kernel_table(case.V, "Y0", 0, argument, z_step, n_cut)
        f_minus = 4.0 * _kernel_table(case.V, "K0", 0, argument, z_step, n_cut)
        plus_terms = scale * lam_n * twist * f_plus
        minus_terms = scale * lam_n * np.conj(twist) * f_minus
        main = 0.0
        if include_main:
            shift = 2 * EULER_GAMMA - 2 * math.log(case.q)
            main = scale * case.V.moment(lambda y: np.log(y * case.X) + shift)
    else:
        k = case.coefficients.weight
        ik = 1j ** k
        f_plus = 2 * math.pi * _kernel_table(case.V, "J", k - 1, argument, case.X / case.q ** 2, n_cut)
        plus_terms = scale * lam_n * twist * ik * f_plus
        minus_terms = np.zeros(n.size, dtype=complex)  # F_- vanishes for holomorphic forms
        main = 0.0

    # achieved tail: largest kernel value over the last tenth of the dual range
    tail_start = max(0, int(0.9 * n.size))
    kernels = np.abs(f_plus) + (np.abs(f_minus) if case.is_divisor else 0.0)
    tail = float(scale * np.max(kernels[tail_start:]) * max(1.0, float(np.max(np.abs(lam_n)))))
    if dual_cutoff is None and tail > tail_tol:
        raise RuntimeError(f"dual kernel has not decayed at n = {n_cut}: tail bound {tail:.3e}")
    plus = complex(math.fsum(plus_terms.real), math.fsum(plus_terms.imag))
    minus = complex(math.fsum(minus_terms.real), math.fsum(minus_terms.imag))
    total = complex(math.fsum([main, plus.real, minus.real]), math.fsum([plus.imag, minus.imag]))
    return VoronoiResult(total, main, plus, minus, n_cut, tail)


def voronoi_rhs(case: VoronoiCase, dual_cutoff: int | None = None) -> complex:
    return voronoi_rhs_detail(case, dual_cutoff).value


def voronoi_gap(case: VoronoiCase, lhs: complex, rhs: complex, floor: float = 1e-6) -> float:
    """|lhs - rhs| relative to |lhs|, floored at ``floor`` times the absolute term mass.

    Smooth sums of cusp-form coefficients can be far smaller than their
    individual terms, where a plain relative gap only measures rounding.
    """
    lo, hi = case.V.support
    n = np.arange(max(1, int(math.ceil(lo * case.X))), int(math.floor(hi * case.X)) + 1)
    mass = float(np.sum(np.abs(np.asarray(case.coefficients.lam)[n]) * case.V(n / case.X)))
    return abs(lhs - rhs) / max(abs(lhs), floor * mass)


# ---------------------------------------------------------------------------
# Poisson
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoissonCase:
    W: SmoothBump | BumpSum
    a: int
    q: int
    X: float

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if not self.X > 0:
            raise ValueError("X must be positive")


def _dual_range(case: PoissonCase, omega_target: float = 400.0) -> int:
    lo, hi = case.W.support
    xi_cut = omega_target / (math.pi * (hi - lo))
    return int(math.ceil(xi_cut * case.q / case.X)) + 1


def poisson_two_sided(case: PoissonCase) -> tuple[complex, complex]:
    """Direct sum of e(an/q) W(n/X) and its dual over residues alpha mod q."""
    lo, hi = case.W.support
    n = np.arange(int(math.floor(lo * case.X)), int(math.ceil(hi * case.X)) + 1)
    lhs_terms = _e(case.a * n / case.q) * case.W(n / case.X)
    lhs = complex(math.fsum(lhs_terms.real), math.fsum(lhs_terms.imag))

    m_max = _dual_range(case)
    m = np.arange(-m_max, m_max + 1)
    w_hat = case.W.fourier(m * case.X / case.q)
    alpha = np.arange(case.q)
    char = _e(np.outer(case.a + m, alpha) / case.q).sum(axis=1)
    rhs_terms = (case.X / case.q) * char * w_hat
    rhs = complex(math.fsum(rhs_terms.real), math.fsum(rhs_terms.imag))
    return lhs, rhs


def truncation_threshold(q: int, X: float, constant: float = 10.0, eps: float = 0.05) -> float:
    """Dual index beyond which terms must be negligible: constant (q/X) (qX)^eps."""
    return constant * q / X * (q * X) ** eps


def dual_truncation_profile(case: PoissonCase, m_max: int | None = None) -> list[tuple[int, float]]:
    """(m, (X/q) |W-hat(mX/q)|) for |m| <= m_max."""
    if m_max is None:
        m_max = _dual_range(case)
    m = np.arange(-m_max, m_max + 1)
    mags = (case.X / case.q) * np.abs(case.W.fourier(m * case.X / case.q))
    return [(int(mi), float(v)) for mi, v in zip(m, mags)]
