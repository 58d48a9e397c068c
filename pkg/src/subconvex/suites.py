"""Verification suites shared by the command line and the acceptance tests.

Each suite runs one module's contracts on its default grid and returns a
``SuiteResult`` with one row per case.  Tolerances come from
``DEFAULT_TOLERANCES`` and may be overridden by name.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import arith, delta, oscillatory as osc, summation
from .lfunc import (DEFAULT_T_GRID, SMOOTHING_CONTOUR, SMOOTHING_DYADIC, GammaFactorSpec, RankinSelbergSeries,
                    central_value, euler_product_check, exponent_scan, solve_residue)

__all__ = ["DEFAULT_TOLERANCES", "SuiteResult", "SUITES", "run_suite", "coefficient_table", "conductor_rows",
           "certificate_rows", "phase_rows", "kernel_rows", "u_split_rows"]

DEFAULT_TOLERANCES: dict[str, float] = {
    "delta_abs": 1e-2,
    "circle_rel": 1e-3,
    "conductor_tail": 1e-8,
    "conductor_floor": 0.5,
    "voronoi_rel": 1e-6,
    "main_term_break": 1e-2,
    "poisson_abs": 1e-8,
    "poisson_survivor": 1e-8,
    "osc_envelope": 10.0,
    "osc_slope": -0.4,
    "kernel_tail": 1e-6,
    "kernel_envelope": 10.0,
    "diagonal_negligible": 1e-6,
    "diagonal_constant": osc.DIAGONAL_CONSTANT,
    "euler_rel": 1e-6,
    "afe_rel": 1e-4,
    "scan_envelope": 10.0,
    "scan_slope": 1.0,
}


@dataclass
class SuiteResult:
    name: str
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    wall_ms: int = 0

    def add(self, case: str, value: float, bound: float, ok: bool, gap: float | None = None, **params) -> None:
        row = {"case": case, **params, "value": value, "bound": bound, "pass": bool(ok)}
        if gap is not None:
            row["gap"] = gap
        self.rows.append(row)

    @property
    def passes(self) -> int:
        return sum(r["pass"] for r in self.rows)

    @property
    def failures(self) -> int:
        return len(self.rows) - self.passes

    @property
    def ok(self) -> bool:
        return self.failures == 0 and bool(self.rows)

    @property
    def max_gap(self) -> float:
        gaps = [r["gap"] for r in self.rows if "gap" in r]
        return max(gaps) if gaps else 0.0

    def record(self) -> dict:
        return {"suite": self.name, "cases": len(self.rows), "passes": self.passes, "failures": self.failures,
                "max_gap": self.max_gap, "wall_ms": self.wall_ms}


def _pmap(fn, items, workers: int):
    items = list(items)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


@lru_cache(maxsize=4)
def coefficient_table(n_max: int) -> arith.CuspFormData:
    return arith.generate_delta_coefficients(n_max)


# ---------------------------------------------------------------------------
# arith
# ---------------------------------------------------------------------------

def suite_coeffs(cfg: dict, tol: dict) -> SuiteResult:
    res = SuiteResult("coeffs")
    n_max = int(cfg.get("n_max", 100_000))
    f = coefficient_table(n_max)
    lam = np.asarray(f.lam)
    d = arith.divisor_counts(n_max)
    viol = int(np.sum(np.abs(lam[1:]) > d[1:]))
    res.add("deligne", float(np.max(np.abs(lam[1:]) / d[1:])), 1.0, viol == 0, n_max=n_max)

    hecke_limit = min(int(cfg.get("hecke_limit", 10_000)), n_max)
    bad = checked = 0
    for m in range(1, hecke_limit + 1):
        for n in range(m, hecke_limit // m + 1):
            g = math.gcd(m, n)
            if g == 1 or _same_prime_power(m, n):
                checked += 1
                bad += not arith.hecke_relation_check(f, m, n)
    res.add("hecke", float(bad), 0.0, bad == 0, pairs=checked, limit=hecke_limit)

    q_max = int(cfg.get("ramanujan_q", 500))
    m_max = int(cfg.get("ramanujan_m", 500))
    m_vals = np.arange(-m_max, m_max + 1)
    mismatches = 0
    for q in range(1, q_max + 1):
        direct = arith.ramanujan_sum_direct(q, m_vals)
        formula = np.array([arith.ramanujan_sum_formula(q, int(m)) for m in m_vals])
        rounded = np.rint(direct.real)
        mismatches += int(np.sum((rounded != formula) | (np.abs(direct - rounded) > 1e-6)))
    res.add("ramanujan", float(mismatches), 0.0, mismatches == 0, q_max=q_max, m_max=m_max)
    return res


def _same_prime_power(m: int, n: int) -> bool:
    mn = m * n
    p = 2
    while p * p <= mn and mn % p:
        p += 1
    if mn % p:
        p = mn
    while mn % p == 0:
        mn //= p
    return mn == 1


# ---------------------------------------------------------------------------
# delta
# ---------------------------------------------------------------------------

def suite_delta(cfg: dict, tol: dict) -> SuiteResult:
    res = SuiteResult("delta-check")
    bands = {}
    for M in cfg.get("M_list", [25, 50, 100, 400]):
        M = int(M)
        scheme = delta.build_scheme(M)
        span = min(100, 2 * scheme.M)
        ns = np.arange(-span, span + 1)
        vals = delta.delta_eval(ns, scheme)
        err = np.abs(vals - (ns == 0))
        bands[M] = float(np.max(err))
        # the absolute contract is stated at M = 50; other M feed the monotone band check
        bound = tol["delta_abs"] if M == 50 else math.inf
        for n, v, e in zip(ns, vals, err):
            res.add("delta", float(v), bound, bool(e <= bound), gap=float(e), M=M, n=int(n))
    seq = [bands[M] for M in sorted(bands) if M in (25, 100, 400)]
    if len(seq) >= 2:
        mono = all(a > b for a, b in zip(seq, seq[1:]))
        res.add("delta_monotone", seq[-1], seq[0], mono)

    # second route for delta at a few n (closed-form sinc vs quadrature of g)
    scheme = delta.build_scheme(25)
    X = delta.default_x_cutoff(25)
    for n in (0, 1, 7):
        a = delta.delta_eval(n, scheme)
        b = delta.delta_eval_via_g(n, scheme, X).real
        res.add("delta_two_routes", abs(a - b), 1e-8, abs(a - b) <= 1e-8, gap=abs(a - b), n=n)

    conductor_rows(res, tol)
    return res


def conductor_rows(res: SuiteResult, tol: dict, N: int = 10_000, K: float = 100.0, n0: int = 15_000) -> None:
    """Kernel tail for |m - n| >= 10 N/K and floor for |m - n| <= N/(10K), around n = n0."""
    kern = delta.ConductorKernel(N=N, K=K, V=delta.default_conductor_bump())
    gap_far, gap_near = int(math.ceil(10 * N / K)), int(N / (10 * K))
    far = np.concatenate([np.arange(n0 + gap_far, 2 * n0 + 1), np.arange(max(1, n0 // 2), n0 - gap_far + 1)])
    near = np.arange(n0 - gap_near, n0 + gap_near + 1)
    tail = float(np.max(np.abs(delta.conductor_kernel_eval(far, n0, kern))))
    floor = float(np.min(np.abs(delta.conductor_kernel_eval(near, n0, kern)))) / kern.abs_mass
    res.add("conductor_tail", tail, tol["conductor_tail"], tail <= tol["conductor_tail"], gap=tail, N=N, K=K)
    res.add("conductor_near", floor, tol["conductor_floor"], floor >= tol["conductor_floor"], N=N, K=K)


def suite_circle(cfg: dict, tol: dict) -> SuiteResult:
    res = SuiteResult("circle-identity")
    cases = cfg.get("circle_cases", [(64, 4, 10.0), (256, 8, 25.0)])
    f = coefficient_table(max(2 * int(c[0]) for c in cases) + 1)
    for N, K, t in cases:
        direct, recon, info = delta.circle_method_identity(int(N), float(K), float(t), f, f)
        gap = abs(direct - recon) / abs(direct)
        res.add("circle", gap, tol["circle_rel"], gap <= tol["circle_rel"], gap=gap, N=int(N), K=float(K), t=float(t),
                direct_re=direct.real, direct_im=direct.imag)
    return res


# ---------------------------------------------------------------------------
# summation
# ---------------------------------------------------------------------------

def suite_voronoi(cfg: dict, tol: dict, workers: int = 1) -> SuiteResult:
    res = SuiteResult("voronoi-check")
    V = summation.default_voronoi_bump()
    f = coefficient_table(20_000)
    div = arith.divisor_sequence(20_000)
    cases = []
    for coeffs in (f, div):
        for q in cfg.get("q_list", [1, 2, 3, 5, 7]):
            units = [0] if q == 1 else [a for a in range(1, q) if math.gcd(a, q) == 1]
            for a in units:
                for X in cfg.get("X_list", [5.0, 20.0, 100.0]):
                    cases.append(summation.VoronoiCase(coeffs, a, int(q), float(X), V))

    def run(case):
        lhs = summation.voronoi_lhs(case)
        full = summation.voronoi_rhs_detail(case)
        gap = summation.voronoi_gap(case, lhs, full.value)
        no_main = math.nan
        if case.is_divisor:
            no_main = summation.voronoi_gap(case, lhs, full.value - full.main_term)
        return case, lhs, full.value, gap, no_main

    worst_break = 0.0
    for case, lhs, rhs, gap, no_main in _pmap(run, cases, workers):
        label = "divisor" if case.is_divisor else "delta"
        res.add("voronoi", gap, tol["voronoi_rel"], gap <= tol["voronoi_rel"], gap=gap, form=label, q=case.q, a=case.a,
                X=case.X, lhs_re=lhs.real, lhs_im=lhs.imag, rhs_re=rhs.real, rhs_im=rhs.imag)
        if case.is_divisor:
            worst_break = max(worst_break, no_main)
    res.add("main_term_live", worst_break, tol["main_term_break"], worst_break >= tol["main_term_break"])
    return res


def suite_poisson(cfg: dict, tol: dict, workers: int = 1) -> SuiteResult:
    res = SuiteResult("poisson-check")
    W = summation.default_poisson_bump()
    cases = [summation.PoissonCase(W, a, q, float(X)) for q in range(1, 9) for X in (10.0, 50.0, 200.0)
             for a in range(q)]

    def run(case):
        lhs, rhs = summation.poisson_two_sided(case)
        return case, lhs, rhs

    for case, lhs, rhs in _pmap(run, cases, workers):
        gap = abs(lhs - rhs)
        res.add("poisson", gap, tol["poisson_abs"], gap <= tol["poisson_abs"], gap=gap, q=case.q, a=case.a, X=case.X,
                lhs_re=lhs.real, lhs_im=lhs.imag, rhs_re=rhs.real, rhs_im=rhs.imag)

    # dual truncation: terms with |m| >= 10 (q/X) (qX)^0.05 must be negligible
    for q, X in ((1, 100.0), (50, 1.0), (8, 10.0), (3, 50.0)):
        prof = summation.dual_truncation_profile(summation.PoissonCase(W, 0, q, X))
        live = [m for m, v in prof if v > tol["poisson_survivor"]]
        reach = max(abs(m) for m in live)
        limit = summation.truncation_threshold(q, X)
        ok = reach < limit and ((q, X) != (1, 100.0) or live == [0])
        res.add("truncation", float(reach), limit, ok, q=q, X=X, survivors=len(live))
    return res


# ---------------------------------------------------------------------------
# oscillatory
# ---------------------------------------------------------------------------

def suite_osc(cfg: dict, tol: dict, seed: int = 0) -> SuiteResult:
    res = SuiteResult("osc-check")
    certificate_rows(res, cfg, tol, seed)
    phase_rows(res, cfg, tol)
    kernel_rows(res, cfg, tol)
    u_split_rows(res, cfg, tol)
    return res


def certificate_rows(res: SuiteResult, cfg: dict, tol: dict, seed: int = 0) -> None:
    """Second-derivative certificates on random certified phases."""
    rng = np.random.default_rng(seed)
    issued = 0
    while issued < int(cfg.get("certificates", 200)):
        try:
            c = osc.second_derivative_certificate(osc.random_certified_profile(rng))
        except osc.CertificateError:
            continue
        issued += 1
        res.add("certificate", c.measured, c.bound, c.holds, r=c.r, M=c.M)


def phase_rows(res: SuiteResult, cfg: dict, tol: dict) -> None:
    """curly I and min |P''| on the admissible grid, plus the t-scaling slope."""
    t = float(cfg.get("osc_t", 200.0))
    env = tol["osc_envelope"]
    K, N = t ** 0.75, t * t
    Q = math.sqrt(N / K)
    for qf in (0.5, 0.75, 1.0):
        q = int(round(qf * Q))
        base = osc.PaperPhase(t, N, q, 0.0, 0.0, 0.0, K)
        ms = sorted({round(x) for x in (osc.stationary_m(t, N, q), osc.stationary_m(t, N, q, fraction=0.75),
                                        base.M0 / 4, base.M0 / 2, base.M0)})
        ns = sorted({1, round(base.N0 / 4), round(base.N0 / 2), round(base.N0)})
        for m in ms:
            for n in ns:
                for y1 in (0.0, base.y1_scale):
                    r = osc.eval_curly_I(base.with_(m=m, n=n, y1=y1))
                    size = abs(r.value) + r.error_estimate
                    res.add("curly_I", size, env / math.sqrt(t), size <= env / math.sqrt(t), q=q, m=m, n=n, y1=y1)
                    res.add("P2_floor", r.min_abs_P2, t / (2 * math.pi), r.min_abs_P2 >= t / (2 * math.pi),
                            q=q, m=m, n=n, y1=y1)

    # t-scaling at fixed relative positions
    ts = (100.0, 200.0, 400.0)
    sizes = []
    for tt in ts:
        KK, NN = tt ** 0.75, tt * tt
        q = int(round(math.sqrt(NN / KK) / 2))
        p = osc.PaperPhase(tt, NN, q, osc.stationary_m(tt, NN, q, fraction=0.75),
                           osc.stationary_m(tt, NN, q, fraction=0.25), 0.0, KK)
        sizes.append(abs(osc.eval_curly_I(p).value))
    slope = float(np.polyfit(np.log(ts), np.log(sizes), 1)[0])
    res.add("t_slope", slope, tol["osc_slope"], slope <= tol["osc_slope"])


def u_split_rows(res: SuiteResult, cfg: dict, tol: dict) -> None:
    """u-split saving at small q, where the h-envelope factor (q/Q + |x|)^A is small."""
    scheme = delta.build_scheme(100)
    for q in range(1, max(1, scheme.q_max // 10) + 1):
        for lam in (0.0, 0.05, 0.1):
            one, hpart = osc.u_split_ratio(scheme, q, lam, u_max=1.0)
            ratio = one / hpart
            res.add("u_split", ratio, q * scheme.Q / 10, ratio >= q * scheme.Q / 10, q=q, lam=lam)


def kernel_rows(res: SuiteResult, cfg: dict, tol: dict) -> None:
    """k-truncation tails, off-diagonal envelope and the diagonal constraint."""
    t = float(cfg.get("osc_t", 200.0))
    K, N = t ** 0.75, t * t
    Q = math.sqrt(N / K)
    for qf in (0.25, 0.5, 1.0):
        q = int(round(qf * Q))
        p = osc.PaperPhase(t, N, q, 0.0, 0.0, 0.0, K, sign=-1)
        p = p.with_(y1=p.y1_scale)
        n1 = int(round(p.N0 / 2))
        M0 = osc.stationary_M0(p, n1)
        divisors = sorted({1, q} | {d for d in range(2, q) if q % d == 0 and d * d <= q})
        for d in divisors[:3]:
            k_cut = 10 * t * d / M0
            for k in (math.ceil(k_cut), math.ceil(2 * k_cut)):
                v = abs(osc.kernel_I_k(k, n1, n1, p, d, M0))
                res.add("kernel_tail", v, tol["kernel_tail"], v <= tol["kernel_tail"], q=q, d=d, k=k)
            for k in sorted({1, 2, max(1, math.floor(4 * t * d / M0))}):
                v = abs(osc.kernel_I_k(k, n1, n1, p, d, M0))
                bound = tol["kernel_envelope"] / t * math.sqrt(d / (k * M0))
                res.add("kernel_envelope", v, bound, v <= bound, q=q, d=d, k=k)
        thr = osc.diagonal_threshold(p, tol["diagonal_constant"])
        for D in sorted({0, 1, round(thr / 2), math.ceil(thr), math.ceil(2 * thr), math.ceil(4 * thr),
                         math.ceil(100 * thr)}):
            r = osc.diagonal_constraint_check(n1, n1 + D, p, M0, constant=tol["diagonal_constant"],
                                              negligible=tol["diagonal_negligible"])
            res.add("diagonal", abs(r.kernel), r.threshold, r.ok, q=q, separation=D)
            if D == 0:
                res.add("diagonal_zero", abs(r.kernel), 10 / t, abs(r.kernel) <= 10 / t, q=q)


# ---------------------------------------------------------------------------
# lfunc
# ---------------------------------------------------------------------------

@lru_cache(maxsize=3)
def _series(n_max: int, g_form: str = "delta") -> RankinSelbergSeries:
    f = coefficient_table(n_max)
    if g_form == "delta":
        return RankinSelbergSeries(f, f)
    if g_form == "divisor":
        return RankinSelbergSeries(f, arith.divisor_sequence(n_max))
    raise ValueError(f"unknown form {g_form!r}; choose delta or divisor")


def suite_lvalue(cfg: dict, tol: dict) -> SuiteResult:
    res = SuiteResult("lvalue")
    g_form = str(cfg.get("g_form", "delta"))
    divisor = g_form == "divisor"
    gf = GammaFactorSpec(case="other") if divisor else GammaFactorSpec()
    euler_nmax = int(cfg.get("euler_n_max", 2_000_000))
    P = int(cfg.get("euler_P", 500_000))
    chk = euler_product_check(_series(euler_nmax, g_form), 2.0, P, tol=tol["euler_rel"],
                              g_satake=(1, 1) if divisor else None)
    res.add("euler_s2", chk.gap, tol["euler_rel"], chk.converged, gap=chk.gap, P=P, n_max=euler_nmax)

    series = _series(int(cfg.get("n_max", 300_000)), g_form)
    # L(s, f x E) = L(s, f)^2 is entire; only the self-product has poles
    R = 0.0 if divisor else solve_residue(series, gf)
    primary, other = SMOOTHING_CONTOUR, SMOOTHING_DYADIC
    if cfg.get("smoothing", "contour") == "dyadic":
        primary, other = other, primary
    values = {}
    for t in cfg.get("t_list", [50.0, 100.0]):
        cv = central_value(float(t), series, gf, R, smoothing=primary, alternative=other)
        values[float(t)] = cv.value
        res.add("central_value", cv.consistency_gap, tol["afe_rel"], cv.consistency_gap <= tol["afe_rel"],
                gap=cv.consistency_gap, t=float(t), value_re=cv.value.real, value_im=cv.value.imag,
                abs=abs(cv.value))
    res.summary["values"] = [{"t": t, "value_re": v.real, "value_im": v.imag, "abs": abs(v),
                              "consistency_gap": r["gap"]}
                             for (t, v), r in zip(values.items(), [r for r in res.rows if r["case"] == "central_value"])]
    res.summary["residue"] = R
    return res


def suite_scan(cfg: dict, tol: dict, workers: int = 1) -> SuiteResult:
    res = SuiteResult("exponent-scan")
    series = _series(int(cfg.get("n_max", 300_000)))
    gf = GammaFactorSpec()
    R = solve_residue(series, gf)
    scan = exponent_scan(cfg.get("t_list", list(DEFAULT_T_GRID)), series, gf, R, workers=workers)
    for row in scan.rows:
        bound = tol["scan_envelope"] * row.t ** 1.05
        res.add("sup_ratio", row.sup_ratio, bound, row.sup_ratio <= bound, t=row.t, abs_L=row.abs_L,
                sup_at=row.sup_at)
    res.add("slope", scan.slope, tol["scan_slope"], scan.slope < tol["scan_slope"])
    res.summary["slope"] = scan.slope
    res.summary["intercept"] = scan.intercept
    res.summary["timing"] = [{"t": r.t, "runtime_ms": r.runtime_ms} for r in scan.rows]
    return res


SUITES = {
    "coeffs": suite_coeffs,
    "delta-check": suite_delta,
    "circle-identity": suite_circle,
    "voronoi-check": suite_voronoi,
    "poisson-check": suite_poisson,
    "osc-check": suite_osc,
    "lvalue": suite_lvalue,
    "exponent-scan": suite_scan,
}


def run_suite(name: str, cfg: dict | None = None, tolerances: dict | None = None, workers: int = 1,
              seed: int = 0) -> SuiteResult:
    cfg = {} if cfg is None else cfg
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    fn = SUITES[name]
    start = time.perf_counter()
    kwargs = {}
    if "workers" in fn.__code__.co_varnames:
        kwargs["workers"] = workers
    if "seed" in fn.__code__.co_varnames:
        kwargs["seed"] = seed
    result = fn(cfg, tol, **kwargs)
    result.wall_ms = int(round((time.perf_counter() - start) * 1000))
    return result
