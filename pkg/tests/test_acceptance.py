"""The ten acceptance criteria, each at its stated tolerance and runtime limit.

Every test prints one line ``ACCEPTANCE <k> PASS|FAIL ...``; the lines are
repeated in the terminal summary.
"""

import math
import time

import pytest

from subconvex.suites import (DEFAULT_TOLERANCES, SuiteResult, certificate_rows, conductor_rows, kernel_rows,
                              phase_rows, run_suite)

TOL = dict(DEFAULT_TOLERANCES)


def _report(log, k, title, rows, seconds, limit, detail):
    failed = [r for r in rows if not r["pass"]]
    ok = bool(rows) and not failed and seconds < limit
    line = (f"ACCEPTANCE {k:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}; "
            f"{len(rows)} checks, {len(failed)} failed, {seconds:.1f}s (limit {limit}s)")
    print(line)
    log.append(line)
    return ok, failed


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def _worst(rows, case, key="value"):
    vals = [r[key] for r in rows if r["case"] == case]
    return max(vals) if vals else math.nan


def test_criterion_01_exact_arithmetic(acceptance_log):
    res, secs = _timed(lambda: run_suite("coeffs"))
    rows = res.rows
    detail = f"Hecke pairs {rows[1]['pairs']}, Ramanujan q<=500 |m|<=500, Deligne n<=1e5 max |lam|/d = {rows[0]['value']:.3f}"
    ok, failed = _report(acceptance_log, 1, "exact arithmetic", rows, secs, 30, detail)
    assert ok, failed


def test_criterion_02_voronoi(acceptance_log):
    res, secs = _timed(lambda: run_suite("voronoi-check"))
    grid = [r for r in res.rows if r["case"] == "voronoi"]
    forms = {r["form"] for r in grid}
    assert forms == {"delta", "divisor"} and len(grid) == 2 * 3 * (1 + 1 + 2 + 4 + 6)
    detail = (f"max relative gap {_worst(res.rows, 'voronoi'):.2e} (tol {TOL['voronoi_rel']:g}), "
              f"dropping the divisor main term breaks it by {_worst(res.rows, 'main_term_live'):.2e}")
    ok, failed = _report(acceptance_log, 2, "Voronoi identity", res.rows, secs, 120, detail)
    assert ok, failed


def test_criterion_03_poisson(acceptance_log):
    res, secs = _timed(lambda: run_suite("poisson-check"))
    trunc = [r for r in res.rows if r["case"] == "truncation"]
    detail = (f"max gap {_worst(res.rows, 'poisson'):.2e} (tol {TOL['poisson_abs']:g}), "
              + ", ".join(f"q={r['q']} X={r['X']:g}: reach {r['value']:g} < {r['bound']:.3g}" for r in trunc))
    ok, failed = _report(acceptance_log, 3, "Poisson identity", res.rows, secs, 60, detail)
    assert ok, failed


def test_criterion_04_delta_symbol(acceptance_log):
    res, secs = _timed(lambda: run_suite("delta-check"))
    rows = [r for r in res.rows if r["case"] in ("delta", "delta_monotone")]
    at50 = [r for r in rows if r["case"] == "delta" and r["M"] == 50]
    assert len(at50) == 201
    mono = next(r for r in rows if r["case"] == "delta_monotone")
    bands = {M: max(r["gap"] for r in rows if r["case"] == "delta" and r["M"] == M) for M in (25, 100, 400)}
    detail = (f"M=50 worst error {max(r['gap'] for r in at50):.2e} (tol {TOL['delta_abs']:g}), bands "
              + " > ".join(f"M={M}: {v:.2e}" for M, v in bands.items()))
    ok, failed = _report(acceptance_log, 4, "delta symbol", rows, secs, 120, detail)
    assert mono["pass"]
    assert ok, failed


def test_criterion_05_circle_method(acceptance_log):
    res, secs = _timed(lambda: run_suite("circle-identity"))
    cases = {(r["N"], r["K"], r["t"]) for r in res.rows}
    assert cases == {(64, 4.0, 10.0), (256, 8.0, 25.0)}
    detail = ", ".join(f"(N,K,t)=({r['N']},{r['K']:g},{r['t']:g}) gap {r['gap']:.2e}" for r in res.rows)
    ok, failed = _report(acceptance_log, 5, "circle-method identity", res.rows, secs, 180, detail)
    assert ok, failed


def test_criterion_06_conductor_lowering(acceptance_log):
    res = SuiteResult("conductor")
    _, secs = _timed(lambda: conductor_rows(res, TOL))
    tail, near = res.rows
    detail = (f"tail {tail['value']:.2e} for |m-n| >= 10N/K (tol {TOL['conductor_tail']:g}), "
              f"floor {near['value']:.3f} of int|V| for |m-n| <= N/(10K)")
    ok, failed = _report(acceptance_log, 6, "conductor lowering", res.rows, secs, 30, detail)
    assert ok, failed


def test_criterion_07_certificates(acceptance_log):
    res = SuiteResult("certificates")
    _, secs = _timed(lambda: certificate_rows(res, {"certificates": 200}, TOL, seed=0))
    assert len(res.rows) == 200
    worst = max(r["value"] / r["bound"] for r in res.rows)
    detail = f"200 certified phases, worst measured/bound {worst:.3f}"
    ok, failed = _report(acceptance_log, 7, "second-derivative certificates", res.rows, secs, 60, detail)
    assert ok, failed


def test_criterion_08_phase_analysis(acceptance_log):
    res = SuiteResult("phase")
    _, secs = _timed(lambda: phase_rows(res, {}, TOL))
    t = 200.0
    curly = [r for r in res.rows if r["case"] == "curly_I"]
    floor = [r for r in res.rows if r["case"] == "P2_floor"]
    slope = next(r for r in res.rows if r["case"] == "t_slope")
    detail = (f"t=200 grid of {len(curly)}: max |I| sqrt(t) = {max(r['value'] for r in curly) * math.sqrt(t):.3f} "
              f"(envelope 10), min |P''| / t = {min(r['value'] for r in floor) / t:.4f} (need 1/(2 pi) = 0.1592), "
              f"slope {slope['value']:.3f} (need <= -0.4)")
    ok, failed = _report(acceptance_log, 8, "phase analysis", res.rows, secs, 180, detail)
    assert ok, failed


def test_criterion_09_cauchy_poisson_kernels(acceptance_log):
    res = SuiteResult("kernels")
    _, secs = _timed(lambda: kernel_rows(res, {}, TOL))
    by = lambda case: [r for r in res.rows if r["case"] == case]
    env = max(r["value"] / r["bound"] for r in by("kernel_envelope"))
    detail = (f"tails max {_worst(res.rows, 'kernel_tail'):.2e} (tol 1e-6), envelope ratio max {env:.3f}, "
              f"diagonal checks {len(by('diagonal'))} all-true required")
    ok, failed = _report(acceptance_log, 9, "Cauchy-Poisson kernels", res.rows, secs, 180, detail)
    assert ok, failed


def test_criterion_10_lvalue_laboratory(acceptance_log):
    start = time.perf_counter()
    lv = run_suite("lvalue")
    scan = run_suite("exponent-scan")
    secs = time.perf_counter() - start
    rows = lv.rows + scan.rows
    euler = next(r for r in lv.rows if r["case"] == "euler_s2")
    gaps = {r["t"]: r["gap"] for r in lv.rows if r["case"] == "central_value"}
    assert set(gaps) == {50.0, 100.0}
    sups = [r for r in scan.rows if r["case"] == "sup_ratio"]
    assert [r["t"] for r in sups] == [50.0, 100.0, 200.0, 350.0, 500.0]
    detail = (f"Euler gap {euler['gap']:.2e} at s=2 (P={euler['P']}), smoothing gaps "
              + ", ".join(f"t={t:g}: {g:.1e}" for t, g in gaps.items())
              + f", max sup ratio / envelope {max(r['value'] / r['bound'] for r in sups):.2e}, "
              f"slope {scan.summary['slope']:.3f} (< 1.0)")
    ok, failed = _report(acceptance_log, 10, "L-value laboratory", rows, secs, 600, detail)
    assert ok, failed
