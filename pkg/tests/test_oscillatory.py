import math

import mpmath
import numpy as np
import pytest

from subconvex import delta
from subconvex import oscillatory as osc

T = 200.0
K = T ** 0.75
N = T * T


def profile(f, fp, fpp, g, a, b, M, r=None):
    return osc.PhaseProfile(f=f, g=g, a=a, b=b, fp=fp, fpp=fpp, M=M, r=r)


def test_certificate_bound_substitution():
    p = profile(lambda x: 2 * x ** 2, lambda x: 4 * x, lambda x: np.full_like(x, 4.0), lambda x: np.ones_like(x),
                0.0, 1.0, 1.0, r=4.0)
    c = osc.second_derivative_certificate(p)
    assert c.bound == 4.0
    assert c.holds


def test_certificate_fresnel_against_closed_form():
    p = profile(lambda x: x ** 2, lambda x: 2 * x, lambda x: np.full_like(x, 2.0), lambda x: np.ones_like(x),
                0.0, 1.0, 1.0, r=2.0)
    c = osc.second_derivative_certificate(p)
    # int_0^1 e(x^2) dx = (C(2) + i S(2)) / 2 with the normalized Fresnel integrals
    exact = abs(complex(mpmath.fresnelc(2), mpmath.fresnels(2))) / 2
    assert abs(c.measured - exact) <= 1e-10
    assert c.measured <= 8 / math.sqrt(2)


def test_certificate_rejects_bad_profiles():
    sign_change = profile(lambda x: x ** 3, lambda x: 3 * x ** 2, lambda x: 6 * x, lambda x: np.ones_like(x),
                          -1.0, 1.0, 1.0)
    with pytest.raises(osc.CertificateError):
        osc.second_derivative_certificate(sign_change)
    too_big = profile(lambda x: x ** 2, lambda x: 2 * x, lambda x: np.full_like(x, 2.0), lambda x: 3 * np.ones_like(x),
                      0.0, 1.0, 1.0)
    with pytest.raises(osc.CertificateError):
        osc.second_derivative_certificate(too_big)
    wiggly = profile(lambda x: x ** 2, lambda x: 2 * x, lambda x: np.full_like(x, 2.0), lambda x: np.cos(40 * x),
                     1.0, 2.0, 1.0)
    with pytest.raises(osc.CertificateError):
        osc.second_derivative_certificate(wiggly)


def test_random_certificates_hold():
    rng = np.random.default_rng(11)
    issued = 0
    while issued < 40:
        try:
            c = osc.second_derivative_certificate(osc.random_certified_profile(rng))
        except osc.CertificateError:
            continue
        issued += 1
        assert c.measured <= c.bound


def test_eval_I_flat_phase_is_mass():
    w = osc.default_omega()
    assert abs(osc.eval_I(0, 1, 0.0, 0.0, 1e4, w, 10.0) - w.integral()) <= 1e-12


def test_eval_I_non_stationary_decay():
    w = osc.default_omega()
    # phase derivative sqrt(nN)/(q sqrt x) ~ 700 cycles exceeds nu and the u-term by far more than 100
    assert abs(osc.eval_I(100, 1, 2.0, 0.01, 1e4, w, 10.0)) <= 1e-6


def test_eval_I_conjugation():
    w = osc.default_omega()
    a = osc.eval_I(0, 1, 5.0, 0.3, 1e4, w, 10.0)
    b = osc.eval_I(0, 1, -5.0, -0.3, 1e4, w, 10.0)
    assert abs(a - np.conj(b)) <= 1e-10


def test_phase_parameter_ranges():
    p = osc.PaperPhase(T, N, 10, 0.0, 0.0, 0.0, K)
    assert p.Q == pytest.approx(math.sqrt(N / K))
    assert p.M0 == pytest.approx((10 * T) ** 2 / N + K)
    assert p.N0 == pytest.approx((10 * K) ** 2 / N + K)
    assert p.y1_scale == pytest.approx(10 / (p.Q * K))


def test_P_second_derivative_at_one():
    p = osc.PaperPhase(T, N, 10, 5.0, 7.0, 0.0, K)
    assert p.P2(1.0) == pytest.approx(T / math.pi, rel=1e-14)


def test_P_derivatives_match_finite_differences():
    p = osc.PaperPhase(T, N, 10, 50.0, 20.0, 0.004, K)
    y = np.linspace(1.05, 1.4, 8)
    h = 1e-5
    assert np.allclose((p.P(y + h) - p.P(y - h)) / (2 * h), p.P1(y), rtol=1e-7)
    assert np.allclose((p.P1(y + h) - p.P1(y - h)) / (2 * h), p.P2(y), rtol=1e-7)


def test_stationary_point_location():
    q = 10
    m = osc.stationary_m(T, N, q)
    p = osc.PaperPhase(T, N, q, m, 0.0, 0.0, K)
    pts = osc.stationary_points(p, 1.0, math.sqrt(2))
    assert len(pts) == 1 and abs(pts[0] - 1.2) <= 1e-12


def test_curly_I_two_routes():
    q = 20
    p = osc.PaperPhase(T, N, q, 0.0, 3.0, 0.002, K)
    ms = np.array([osc.stationary_m(T, N, q, fraction=f) for f in (0.5, 0.9, 1.0, 1.2)])
    batch = osc.curly_I_batch(p, ms)
    for m, b in zip(ms, batch):
        adaptive = osc.eval_curly_I(p.with_(m=m)).value
        assert abs(adaptive - b) <= 1e-9


def test_curly_I_envelope_and_curvature_at_stationary_point():
    q = round(math.sqrt(N / K))
    p = osc.PaperPhase(T, N, q, osc.stationary_m(T, N, q), 0.0, q / (math.sqrt(N / K) * K), K)
    r = osc.eval_curly_I(p)
    assert len(r.stationary_points) == 1
    assert abs(r.value) <= 10 / math.sqrt(T)
    assert r.min_abs_P2 >= T / (2 * math.pi)


def test_curly_I_rejects_negative_shift():
    p = osc.PaperPhase(T, N, 10, 1.0, 1.0, -2.0, K)
    with pytest.raises(ValueError):
        osc.eval_curly_I(p)


@pytest.fixture(scope="module")
def kernel_setup():
    q = 14
    p = osc.PaperPhase(T, N, q, 0.0, 0.0, 0.0, K, sign=-1)
    p = p.with_(y1=p.y1_scale)
    n1 = round(p.N0 / 2)
    return p, n1, osc.stationary_M0(p, n1)


def test_kernel_zero_frequency_is_nonnegative(kernel_setup):
    p, n1, M0 = kernel_setup
    v = osc.kernel_I_k(0, n1, n1, p, 1, M0)
    assert abs(v.imag) <= 1e-9
    assert v.real >= -1e-9


def test_kernel_requires_divisor(kernel_setup):
    p, n1, M0 = kernel_setup
    with pytest.raises(ValueError):
        osc.kernel_I_k(1, n1, n1, p, 3, M0)


def test_kernel_tail_beyond_truncation(kernel_setup):
    p, n1, M0 = kernel_setup
    for d in (1, 2, 7):
        k = math.ceil(10 * T * d / M0)
        assert abs(osc.kernel_I_k(k, n1, n1, p, d, M0)) <= 1e-6
        assert abs(osc.kernel_I_k(-k, n1, n1, p, d, M0)) <= 1e-6


def test_kernel_off_diagonal_envelope(kernel_setup):
    p, n1, M0 = kernel_setup
    for d in (1, 2):
        for k in (1, 2, 3):
            bound = 10 / T * math.sqrt(d / (k * M0))
            assert abs(osc.kernel_I_k(k, n1, n1, p, d, M0)) <= bound


def test_kernel_conjugate_symmetry(kernel_setup):
    p, n1, M0 = kernel_setup
    a = osc.kernel_I_k(0, n1, n1 + 3, p, 1, M0)
    b = osc.kernel_I_k(0, n1 + 3, n1, p, 1, M0)
    assert abs(a - np.conj(b)) <= 1e-12


def test_diagonal_constraint(kernel_setup):
    p, n1, M0 = kernel_setup
    same = osc.diagonal_constraint_check(n1, n1, p, M0)
    assert same.ok and abs(same.kernel) <= 10 / T
    thr = osc.diagonal_threshold(p)
    far = osc.diagonal_constraint_check(n1, n1 + math.ceil(100 * thr), p, M0)
    assert far.ok and abs(far.kernel) <= 1e-6


def test_decay_onset_scales_with_diagonal_width():
    onsets, widths = [], []
    for q in (7, 14, 27):
        p = osc.PaperPhase(T, N, q, 0.0, 0.0, 0.0, K, sign=-1)
        p = p.with_(y1=p.y1_scale)
        n1 = round(p.N0 / 2)
        onset = osc.decay_onset(n1, p, osc.stationary_M0(p, n1))
        assert onset <= osc.diagonal_threshold(p)
        onsets.append(onset)
        widths.append(q * math.sqrt(p.N0) / math.sqrt(N))
    slope = np.polyfit(np.log(widths), np.log(onsets), 1)[0]
    assert 0.7 <= slope <= 1.3


@pytest.fixture(scope="module")
def scheme100():
    return delta.build_scheme(100)


@pytest.mark.parametrize("q", [1, 2])
def test_u_split_saving_small_moduli(scheme100, q):
    for lam in (0.0, 0.05, 0.1):
        one, hpart = osc.u_split_ratio(scheme100, q, lam, u_max=1.0)
        assert one / hpart >= q * scheme100.Q / 10


@pytest.mark.xfail(strict=True, reason="h is O(1) relative to 1 once q is comparable to Q; see the decisions ledger")
def test_u_split_saving_full_range(scheme100):
    for q in range(1, scheme100.q_max + 1):
        one, hpart = osc.u_split_ratio(scheme100, q, 0.05, u_max=1.0)
        assert one / hpart >= q * scheme100.Q / 10
