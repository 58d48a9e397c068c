"""Delta-symbol expansion with moduli q <= Q = 2 sqrt(M), plus conductor lowering.

Construction.  Let w be a bump on [C, 2C], C = sqrt(M), with
sum_{r>=1} w(r) = 1.  Pairing the divisors d and |n|/d gives, for every
integer n,

    delta(n) = sum_q sum*_{a mod q} e(an/q) Delta_q(n),
    Delta_q(u) = sum_r (qr)^{-1} [w(qr) - w(|u|/(qr))].

Multiplying by a cutoff phi(u/2M) (phi = 1 on [-1, 1], 0 off [-2, 2])
and Fourier-inverting in u at scale qQ yields

    delta(n) = sum_q (1/(qQ)) R_q(n) int g(q, x) e(nx/(qQ)) dx,
    g(q, x) = int Delta_q(u) phi(u/2M) e(-ux/(qQ)) du,

valid for |n| <= 2M, with R_q the Ramanujan sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arith import CuspFormData, ramanujan_sum_formula
from .numerics.bump import SmoothBump
from .numerics.quadrature import integrate

__all__ = [
    "smooth_cutoff",
    "DeltaScheme",
    "build_scheme",
    "default_x_cutoff",
    "delta_eval",
    "delta_eval_via_g",
    "g_envelope_constants",
    "g_decay_constant",
    "default_conductor_bump",
    "circle_conductor_bump",
    "ConductorKernel",
    "conductor_kernel_eval",
    "circle_method_identity",
    "dyadic_blocks",
]

DEFAULT_X_EXPONENT = 0.75
CIRCLE_X_CUTOFF = 64.0


def _psi(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_cutoff(v) -> np.ndarray:
    """C-infinity even function, 1 on [-1, 1] and 0 outside [-2, 2]."""
    t = 2.0 - np.abs(np.asarray(v, dtype=float))
    a, b = _psi(t), _psi(1.0 - t)
    return a / (a + b)


@dataclass
class DeltaScheme:
    """State of the expansion for range |n| <= 2M.

    The u-grid caches Delta_q(u) phi(u/2M) on a uniform trapezoid grid;
    every integrand in u is smooth and compactly supported, so the
    trapezoid rule converges spectrally.
    """

    M: int
    Q: float
    C: float
    w: SmoothBump
    step: float
    envelope: tuple[float, float] = (float("nan"), 2.0)
    _profiles: dict = field(default_factory=dict, repr=False)

    @property
    def q_max(self) -> int:
        return int(math.floor(self.Q))

    @property
    def u_grid(self) -> np.ndarray:
        half = int(math.ceil(4 * self.M / self.step))
        return self.step * np.arange(-half, half + 1)

    def delta_q(self, q: int, u) -> np.ndarray:
        """Delta_q(u), vectorized in u."""
        u = np.abs(np.asarray(u, dtype=float))
        lo_w, hi_w = self.w.support
        eps_q = self._eps(q)
        out = np.full(u.shape, eps_q)
        r_top = int(math.floor(float(np.max(u, initial=0.0)) / (q * lo_w))) + 1
        for r in range(1, r_top + 1):
            out -= self.w(u / (q * r)) / (q * r)
        return out

    def _eps(self, q: int) -> float:
        lo_w, hi_w = self.w.support
        r = np.arange(max(1, int(lo_w // q)), int(hi_w // q) + 2)
        return math.fsum(self.w(q * r) / (q * r))

    def profile(self, q: int) -> np.ndarray:
        """Delta_q(u) phi(u/2M) on ``u_grid``."""
        if q not in self._profiles:
            u = self.u_grid
            self._profiles[q] = self.delta_q(q, u) * smooth_cutoff(u / (2.0 * self.M))
        return self._profiles[q]

    def g(self, q: int, x) -> np.ndarray:
        """g(q, x) = int Delta_q(u) phi(u/2M) e(-ux/(qQ)) du (real, even in x)."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        u = self.u_grid
        prof = self.profile(q) * self.step
        out = np.empty(xs.shape)
        for lo in range(0, xs.size, 64):
            chunk = xs[lo:lo + 64]
            out[lo:lo + 64] = np.cos(2 * math.pi * np.outer(chunk, u) / (q * self.Q)) @ prof
        return float(out[0]) if np.ndim(x) == 0 else out

    def h(self, q: int, x) -> np.ndarray:
        return self.g(q, x) - 1.0


def build_scheme(M: int, sharpness: float = 1.0, nodes_per_c: int = 256) -> DeltaScheme:
    """Scheme for |n| <= 2M with Q = 2 sqrt(M) and w on [sqrt(M), 2 sqrt(M)]."""
    if M < 4:
        raise ValueError("M must be >= 4")
    C = math.sqrt(M)
    Q = 2.0 * C
    raw = SmoothBump(center=1.5 * C, width=0.5 * C, sharpness=sharpness)
    r = np.arange(int(C), int(2 * C) + 2)
    total = math.fsum(raw(r))
    w = SmoothBump(raw.center, raw.width, raw.height / total, sharpness)
    scheme = DeltaScheme(M=M, Q=Q, C=C, w=w, step=C / nodes_per_c)
    scheme.envelope = g_envelope_constants(scheme)
    return scheme


def default_x_cutoff(M: int, exponent: float = DEFAULT_X_EXPONENT) -> float:
    return float(M) ** exponent


def _check_range(n: int, scheme: DeltaScheme) -> None:
    if abs(n) > 2 * scheme.M:
        raise ValueError(f"|n| = {abs(n)} exceeds the validity range 2M = {2 * scheme.M}")


def delta_eval(n, scheme: DeltaScheme, x_cutoff: float | None = None):
    """Right side of the expansion with the x-integral truncated to |x| <= x_cutoff.

    The x-integral is done in closed form: int_{-X}^{X} e((n-u)x/(qQ)) dx
    is a sinc kernel, leaving a smooth u-integral on the cached grid.
    Accepts an integer or an array of integers.
    """
    ns = np.atleast_1d(np.asarray(n, dtype=np.int64))
    for v in ns:
        _check_range(int(v), scheme)
    X = default_x_cutoff(scheme.M) if x_cutoff is None else float(x_cutoff)
    u = scheme.u_grid
    terms = np.zeros((scheme.q_max, ns.size))
    for q in range(1, scheme.q_max + 1):
        beta = X / (q * scheme.Q)
        rq = np.array([ramanujan_sum_formula(q, int(v)) for v in ns], dtype=float)
        if not np.any(rq):
            continue
        diff = ns[:, None] - u[None, :]
        # sin(2 pi beta d)/(pi d) = 2 beta sinc(2 beta d)
        kernel = 2.0 * beta * np.sinc(2.0 * beta * diff)
        terms[q - 1] = rq * (kernel @ scheme.profile(q)) * scheme.step
    # fixed-order compensated reduction over q
    out = np.array([math.fsum(terms[:, j]) for j in range(ns.size)])
    return float(out[0]) if np.ndim(n) == 0 else out


def delta_eval_via_g(n: int, scheme: DeltaScheme, x_cutoff: float, tol: float = 1e-10) -> complex:
    """Same truncated expansion, integrating the tabulated g(q, x) numerically in x."""
    _check_range(n, scheme)
    total = []
    for q in range(1, scheme.q_max + 1):
        rq = ramanujan_sum_formula(q, n)
        if rq == 0:
            continue
        res = integrate(lambda x, q=q: scheme.g(q, x), lambda x, q=q: n * x / (q * scheme.Q),
                        (-x_cutoff, x_cutoff), tol=tol)
        total.append(rq * res.value / (q * scheme.Q))
    return complex(math.fsum(v.real for v in total), math.fsum(v.imag for v in total))


def g_envelope_constants(scheme: DeltaScheme, A: float = 2.0, x_max: float = 4.0, samples: int = 33):
    """Smallest C with |h(q,x)| <= C (q/Q + |x|)^A / (qQ) on the grid q <= Q, |x| <= x_max."""
    xs = np.linspace(0.0, x_max, samples)
    worst = 0.0
    for q in range(1, scheme.q_max + 1):
        h = np.abs(scheme.h(q, xs))
        env = (q / scheme.Q + xs) ** A / (q * scheme.Q)
        worst = max(worst, float(np.max(h / env)))
    return worst, A


def g_decay_constant(scheme: DeltaScheme, A: float = 2.0, x_max: float = 32.0, samples: int = 249) -> float:
    """Smallest C' with |g(q,x)| <= C' |x|^{-A} on the grid q <= Q, 1 <= |x| <= x_max."""
    xs = np.linspace(1.0, x_max, samples)
    return max(float(np.max(np.abs(scheme.g(q, xs)) * xs ** A)) for q in range(1, scheme.q_max + 1))


# ---------------------------------------------------------------------------
# conductor lowering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConductorKernel:
    """(1/K) int V(nu/K) (m/n)^{i nu} d nu, i.e. V-hat(-K log(m/n) / 2 pi)."""

    N: float
    K: float
    V: SmoothBump

    def __post_init__(self):
        if not self.K < self.N:
            raise ValueError("conductor kernel needs K < N")

    @property
    def mass(self) -> float:
        return self.V.integral()

    @property
    def abs_mass(self) -> float:
        return self.V.integral()  # V >= 0


def conductor_kernel_eval(m, n, kernel: ConductorKernel):
    """int V(v) e(v K log(m/n) / 2 pi) dv for m, n >= 1 (vectorized)."""
    m_arr = np.asarray(m, dtype=float)
    n_arr = np.asarray(n, dtype=float)
    if np.any(m_arr < 1) or np.any(n_arr < 1):
        raise ValueError("m and n must be >= 1")
    xi = -kernel.K * np.log(m_arr / n_arr) / (2 * math.pi)
    return kernel.V.fourier(xi)


# ---------------------------------------------------------------------------
# end-to-end circle-method identity
# ---------------------------------------------------------------------------

def dyadic_blocks(Q: float) -> list[tuple[int, int]]:
    """Moduli 1..floor(Q) split into blocks C < q <= 2C with C = Q/2, Q/4, ...

    The first block is [1, 1]; the number of blocks is at most log2(Q) + 2.
    """
    q_max = int(math.floor(Q))
    blocks = []
    hi = q_max
    while hi >= 1:
        lo = hi // 2 + 1
        blocks.append((lo, hi))
        hi = lo - 1
    return blocks[::-1]


def circle_method_identity(N: int, K: float, t: float, f: CuspFormData, g_seq, V: SmoothBump | None = None,
                           x_cutoff: float | None = None, scheme: DeltaScheme | None = None):
    """Direct S(N) against its reconstruction through the delta expansion.

    S(N) = sum_{n, m in [N, 2N]} lam_f(n) lam_g(m) m^{-it} k(m, n) [n = m] where
    k is the conductor kernel (1 on the diagonal up to the mass of V).  The
    reconstruction replaces [n = m] by the truncated expansion in moduli
    q <= Q = sqrt(N/K) with M = N/(4K), assembled over dyadic q-blocks.
    Returns (direct, reconstructed, blocks).
    """
    lam_f = np.asarray(f.lam)
    lam_g = np.asarray(g_seq.lam if hasattr(g_seq, "lam") else g_seq)
    if 2 * N > len(lam_f) - 1 or 2 * N > len(lam_g) - 1:
        raise IndexError("coefficient tables do not cover [N, 2N]")
    if V is None:
        V = circle_conductor_bump()
    Q = math.sqrt(N / K)
    M = int(round(Q * Q / 4.0))
    if scheme is None:
        scheme = build_scheme(max(M, 4))
    idx = np.arange(N, 2 * N + 1)
    a_n = lam_f[idx]
    b_m = lam_g[idx] * np.exp(-1j * t * np.log(idx.astype(float)))
    kern = ConductorKernel(N=N, K=K, V=V)

    direct = complex(math.fsum((a_n * b_m).real), math.fsum((a_n * b_m).imag))

    # B(d) = sum_{n - m = d} a_n b_m k(m, n)
    n_mat, m_mat = np.meshgrid(idx, idx, indexing="ij")
    k_mat = conductor_kernel_eval(m_mat.ravel(), n_mat.ravel(), kern).reshape(n_mat.shape) / kern.mass
    weights = a_n[:, None] * b_m[None, :] * k_mat
    d_vals = (n_mat - m_mat).ravel()
    offsets = np.arange(-N, N + 1)
    B = np.zeros(offsets.size, dtype=complex)
    np.add.at(B, d_vals + N, weights.ravel())
    live = np.abs(B) > 0
    live &= np.abs(offsets) <= 2 * scheme.M
    dropped = float(np.sum(np.abs(B[~live]))) if np.any(~live) else 0.0
    d_live = offsets[live]
    X = CIRCLE_X_CUTOFF if x_cutoff is None else x_cutoff

    block_sums = []
    for lo, hi in dyadic_blocks(scheme.Q):
        dvals = _delta_block(d_live, scheme, X, lo, hi)
        block_sums.append(complex(np.sum(B[live] * dvals)))
    recon = complex(math.fsum(v.real for v in block_sums), math.fsum(v.imag for v in block_sums))
    return direct, recon, {"blocks": len(block_sums), "dropped_mass": dropped, "M": scheme.M, "Q": scheme.Q}


def _delta_block(ns: np.ndarray, scheme: DeltaScheme, X: float, q_lo: int, q_hi: int) -> np.ndarray:
    u = scheme.u_grid
    out = np.zeros(ns.size)
    for q in range(q_lo, min(q_hi, scheme.q_max) + 1):
        beta = X / (q * scheme.Q)
        rq = np.array([ramanujan_sum_formula(q, int(v)) for v in ns], dtype=float)
        kernel = 2.0 * beta * np.sinc(2.0 * beta * (ns[:, None] - u[None, :]))
        out += rq * (kernel @ scheme.profile(q)) * scheme.step
    return out


def default_conductor_bump() -> SmoothBump:
    """Unit-mass V for the conductor-lowering kernel checks."""
    return SmoothBump(center=0.0, width=20.0, sharpness=10.0).normalized()


def circle_conductor_bump() -> SmoothBump:
    """Wider V so the kernel is negligible beyond the expansion range 2M = N/(2K)."""
    return SmoothBump(center=0.0, width=300.0, sharpness=4.0).normalized()
