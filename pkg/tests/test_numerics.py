import math

import mpmath
import numpy as np
import pytest

from subconvex.numerics import BumpSum, SmoothBump, bessel_j, bessel_k0, bessel_y0, fixed_panels, integrate

mpmath.mp.dps = 50


def _envelope(x):
    # relative error is measured against max(|value|, amplitude envelope) so zeros do not blow it up
    return np.maximum(1.0, np.sqrt(2.0 / (math.pi * np.maximum(x, 1e-300))))


def test_bessel_trivial_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert bessel_j(11, 0.0) == 0.0


def test_j11_at_50_matches_high_precision():
    ref = float(mpmath.besselj(11, 50))
    assert abs(bessel_j(11, 50.0) - ref) <= 1e-10 * abs(ref)


def test_k0_at_1_matches_high_precision():
    # integral representation K_0(x) = int_0^inf exp(-x cosh t) dt, evaluated in 50 digits
    # exp(-cosh 8) is below 1e-600, so [0, 8] carries the full value
    ref = float(mpmath.quad(lambda t: mpmath.exp(-mpmath.cosh(t)), [0, 1, 2, 4, 8]))
    assert abs(bessel_k0(1.0) - ref) <= 1e-10 * ref


@pytest.mark.parametrize("order", [0, 1, 2, 5, 11, 20])
def test_bessel_j_grid_against_mpmath(order):
    xs = np.concatenate([np.linspace(0.01, 60, 301), np.geomspace(60, 1e5, 60)])
    ours = bessel_j(order, xs)
    ref = np.array([float(mpmath.besselj(order, x)) for x in xs])
    scale = np.maximum(np.abs(ref), _envelope(xs) * (xs > order))
    scale = np.where(scale == 0, np.abs(ref), scale)
    err = np.abs(ours - ref) / np.maximum(scale, 1e-300)
    assert np.max(err) <= 1e-10


def test_bessel_y0_grid_against_mpmath():
    xs = np.concatenate([np.geomspace(1e-6, 1, 30), np.linspace(1, 60, 200), np.geomspace(60, 1e5, 50)])
    ref = np.array([float(mpmath.bessely(0, x)) for x in xs])
    err = np.abs(bessel_y0(xs) - ref) / np.maximum(np.abs(ref), _envelope(xs))
    assert np.max(err) <= 1e-10


def test_bessel_k0_grid_against_mpmath():
    xs = np.concatenate([np.geomspace(1e-6, 1, 30), np.linspace(1, 200, 100)])
    ref = np.array([float(mpmath.besselk(0, x)) for x in xs])
    err = np.abs(bessel_k0(xs) - ref) / np.abs(ref)
    assert np.max(err) <= 1e-10


def test_k0_strictly_decreasing():
    xs = np.linspace(0.1, 20, 2000)
    assert np.all(np.diff(bessel_k0(xs)) < 0)


def test_j0_y0_have_no_common_zero():
    xs = np.linspace(0.01, 200, 20001)
    assert np.all(bessel_j(0, xs) ** 2 + bessel_y0(xs) ** 2 > 0)


def test_bessel_recurrence_residual():
    xs = np.linspace(1, 100, 397)
    for nu in range(1, 21):
        res = bessel_j(nu - 1, xs) + bessel_j(nu + 1, xs) - (2 * nu / xs) * bessel_j(nu, xs)
        assert np.max(np.abs(res)) <= 1e-8


def test_bessel_domain_errors():
    with pytest.raises(ValueError):
        bessel_y0(0.0)
    with pytest.raises(ValueError):
        bessel_k0(-1.0)
    with pytest.raises(ValueError):
        bessel_j(3, -0.5)


def test_bump_support_and_values():
    b = SmoothBump(center=2.0, width=0.5)
    assert b.support == (1.5, 2.5)
    assert b(1.5) == 0.0 and b(2.5) == 0.0 and b(3.0) == 0.0
    assert b(2.0) == 1.0
    with pytest.raises(ValueError):
        SmoothBump(0.0, 0.0)


@pytest.mark.parametrize("sharpness", [1.0, 4.0])
def test_bump_derivatives_match_finite_differences(sharpness):
    b = SmoothBump(center=1.5, width=0.5, height=2.0, sharpness=sharpness)
    xs = np.linspace(1.1, 1.9, 41)
    h = 1e-3
    for order in range(1, 5):
        d = lambda x: b.derivative(x, order - 1)
        # fourth-order central stencil
        fd = (8 * (d(xs + h) - d(xs - h)) - (d(xs + 2 * h) - d(xs - 2 * h))) / (12 * h)
        exact = b.derivative(xs, order)
        scale = np.max(np.abs(exact))
        assert np.max(np.abs(fd - exact)) <= 1e-6 * scale


def test_bump_derivative_constants_bound_derivatives():
    b = SmoothBump(center=0.0, width=3.0)
    consts = b.derivative_constants()
    xs = np.linspace(-2.999, 2.999, 3001)
    for j, c in enumerate(consts):
        assert np.all(np.abs(b.derivative(xs, j)) <= c * b.width ** -j * (1 + 1e-9))


def test_bump_integral_against_mpmath():
    b = SmoothBump(center=1.0, width=0.7, sharpness=3.0)
    ref = 0.7 * float(mpmath.quad(lambda u: mpmath.exp(3 - 3 / (1 - u * u)), [-1, 0, 1]))
    assert b.integral() == pytest.approx(ref, rel=1e-12)
    assert b.normalized(2.0).integral() == pytest.approx(2.0, rel=1e-12)


def test_bump_fourier_against_quadrature():
    b = SmoothBump(center=0.3, width=1.0)
    for xi in (0.0, 0.7, 3.2):
        ref = integrate(b, lambda x, xi=xi: -xi * x, b.support, tol=1e-13).value
        assert abs(b.fourier(xi) - ref) <= 1e-11


def test_bump_sum_is_linear():
    b1, b2 = SmoothBump(1.0, 0.5), SmoothBump(2.0, 0.5)
    s = BumpSum(((2.0, b1), (-1.0, b2)))
    assert s.support == (0.5, 2.5)
    assert s(1.0) == 2.0 and s(2.0) == -1.0
    assert s.integral() == pytest.approx(2 * b1.integral() - b2.integral(), rel=1e-14)


def test_quadrature_trivial_cases():
    one = integrate(lambda x: np.ones_like(x), None, (0.0, 1.0))
    assert abs(one.value - 1.0) <= 1e-14
    period = integrate(lambda x: np.ones_like(x), lambda x: x, (0.0, 1.0))
    assert abs(period.value) <= 1e-13
    with pytest.raises(ValueError):
        integrate(lambda x: x, None, (1.0, 1.0))


def test_quadrature_chirp_against_dense_trapezoid():
    b = SmoothBump(center=0.5, width=0.5)
    res = integrate(b, lambda x: 100 * x ** 2, (0.0, 1.0), tol=1e-11)
    x = np.linspace(0.0, 1.0, 1_000_001)
    vals = b(x) * np.exp(2j * math.pi * 100 * x ** 2)
    ref = np.trapezoid(vals, x)
    assert abs(res.value - ref) <= 1e-8


def test_quadrature_error_estimate_bounds_refinement():
    g = lambda x: np.exp(-x) * np.cos(3 * x)
    res = integrate(g, lambda x: 40 * x + 5 * x ** 3, (0.0, 2.0), tol=1e-9)
    lo, hi = 0.0, 2.0
    coarse_edges = np.linspace(lo, hi, 401)
    fine_edges = np.linspace(lo, hi, 801)
    fine = fixed_panels(g, lambda x: 40 * x + 5 * x ** 3, fine_edges)
    assert abs(fixed_panels(g, lambda x: 40 * x + 5 * x ** 3, coarse_edges) - fine) <= 1e-12
    assert abs(res.value - fine) <= max(res.error_estimate, 1e-12)
    assert res.converged and res.evaluations > 0


def test_quadrature_linearity_and_conjugation():
    rng = np.random.default_rng(3)
    tol = 1e-10
    for _ in range(10):
        c1, c2 = rng.normal(size=3), rng.normal(size=3)
        g1 = lambda x, c=c1: c[0] + c[1] * np.sin(c[2] * x)
        g2 = lambda x, c=c2: c[0] * np.exp(-c[1] ** 2 * x) + c[2] * x
        f = lambda x: 30 * x + 4 * np.sin(x)
        alpha, beta = rng.normal(), rng.normal()
        combo = integrate(lambda x: alpha * g1(x) + beta * g2(x), f, (0.0, 3.0), tol=tol).value
        parts = alpha * integrate(g1, f, (0.0, 3.0), tol=tol).value + beta * integrate(g2, f, (0.0, 3.0), tol=tol).value
        assert abs(combo - parts) <= 10 * tol * (1 + abs(alpha) + abs(beta))
        plus = integrate(g1, f, (0.0, 3.0), tol=tol).value
        minus = integrate(g1, lambda x: -f(x), (0.0, 3.0), tol=tol).value
        assert abs(plus - np.conj(minus)) <= 10 * tol
