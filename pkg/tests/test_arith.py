import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subconvex import arith


def test_first_coefficients_match_bruteforce_expansion():
    brute = arith.eta_power_bruteforce(40)
    f = arith.generate_delta_coefficients(40)
    assert f.raw[1] == 1
    assert f.raw[2] == -24 and f.raw[3] == 252
    # Delta = q prod(1 - q^m)^24, so a(n) is the coefficient of q^(n-1) in the product
    assert list(f.raw[1:41]) == brute[0:40]


def test_normalization_of_lambda():
    f = arith.generate_delta_coefficients(10)
    assert f.lam[2] == pytest.approx(-24 / 2 ** 5.5, rel=1e-15)
    assert f.lam_at(1) == 1.0
    with pytest.raises(IndexError):
        f.lam_at(11)


def test_raw_coefficients_are_exact_beyond_int64(delta_small):
    # a(n) exceeds 2^63 well before n = 20000
    big = max(abs(delta_small.raw[n]) for n in range(19_000, 20_001))
    assert big > 2 ** 63
    assert isinstance(delta_small.raw[19_999], int) or hasattr(delta_small.raw[19_999], "bit_length")


def test_known_tau_value():
    # tau(10) = -115920 (classical table)
    f = arith.generate_delta_coefficients(12)
    assert f.raw[10] == -115920
    assert f.raw[12] == -370944


@pytest.mark.parametrize("n, expected", [(1, 1), (6, 4), (12, 6), (97, 2), (360, 24)])
def test_divisor_examples(n, expected):
    seq = arith.divisor_sequence(400)
    brute = sum(1 for d in range(1, n + 1) if n % d == 0)
    assert seq.lam[n] == expected == brute


def test_divisor_multiplicative_and_primes():
    d = arith.divisor_counts(1000)
    for p in arith_primes(1000):
        assert d[p] == 2
    for m in range(1, 40):
        for n in range(1, 1000 // m + 1):
            if math.gcd(m, n) == 1:
                assert d[m * n] == d[m] * d[n]


def arith_primes(n):
    return [p for p in range(2, n + 1) if all(p % k for k in range(2, int(p ** 0.5) + 1))]


@pytest.mark.parametrize("m, n", [(1, 5), (2, 3), (2, 2), (4, 8), (3, 9), (5, 7), (6, 10)])
def test_hecke_examples(m, n):
    f = arith.generate_delta_coefficients(200)
    assert arith.hecke_relation_check(f, m, n)


def test_hecke_explicit_forms():
    f = arith.generate_delta_coefficients(10)
    a = f.raw
    assert a[6] == a[2] * a[3]
    assert a[2] ** 2 == a[4] + 2 ** 11


def test_hecke_rejects_wrong_relation():
    f = arith.generate_delta_coefficients(20)
    fake = arith.CuspFormData(weight=12, raw=[0, 1] + [v + (i == 4) for i, v in enumerate(f.raw[2:], 2)],
                              lam=f.lam)
    assert not arith.hecke_relation_check(fake, 2, 2)


def test_hecke_index_outside_table():
    f = arith.generate_delta_coefficients(10)
    with pytest.raises(IndexError):
        arith.hecke_relation_check(f, 3, 4)


def test_multiplicativity_of_lambda(delta_small):
    lam = delta_small.lam
    for m in range(2, 60):
        for n in range(2, 1000 // m + 1):
            if math.gcd(m, n) == 1:
                assert lam[m * n] == pytest.approx(lam[m] * lam[n], rel=1e-12, abs=1e-12)


def test_deligne_bound(delta_100k):
    d = arith.divisor_counts(100_000)
    assert np.all(np.abs(delta_100k.lam[1:]) <= d[1:])


def test_mobius_sieve_small_values():
    mu = arith.mobius_sieve(30)
    expected = [0, 1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0, -1, 1, 1, 0, -1, 0, -1, 0, 1, 1, -1, 0, 0, 1, 0, 0, -1, -1]
    assert list(mu) == expected


@pytest.mark.parametrize("q, m, expected", [(1, 7, 1), (4, 2, -2), (6, 3, -2), (5, 0, 4), (12, 6, -4)])
def test_ramanujan_examples(q, m, expected):
    assert arith.ramanujan_sum(q, m) == expected


def test_ramanujan_two_routes_and_totient():
    for q in range(1, 120):
        m = np.arange(-150, 151)
        direct = arith.ramanujan_sum_direct(q, m)
        formula = np.array([arith.ramanujan_sum_formula(q, int(v)) for v in m])
        assert np.all(np.abs(direct - formula) < 1e-8)
        phi = sum(1 for a in range(1, q + 1) if math.gcd(a, q) == 1)
        assert arith.ramanujan_sum(q, 0) == phi


def test_ramanujan_invalid_modulus():
    with pytest.raises(ValueError):
        arith.ramanujan_sum(0, 3)


def test_rankin_selberg_average(delta_100k):
    assert arith.rankin_selberg_average(delta_100k, 1) == 1.0
    xs = [1e2, 1e3, 1e4]
    sums = [arith.rankin_selberg_average(delta_100k, x) for x in xs]
    direct = [math.fsum(float(v) ** 2 for v in delta_100k.lam[1:int(x) + 1]) for x in xs]
    assert sums == pytest.approx(direct, rel=1e-14)
    slope = np.polyfit(np.log(xs), np.log(sums), 1)[0]
    assert 0.9 <= slope <= 1.1


def test_rankin_selberg_average_nondecreasing_and_slope(delta_100k):
    xs = np.geomspace(1e3, 1e5, 9)
    sums = [arith.rankin_selberg_average(delta_100k, x) for x in xs]
    assert all(a <= b for a, b in zip(sums, sums[1:]))
    slope = np.polyfit(np.log(xs), np.log(sums), 1)[0]
    assert 0.9 <= slope <= 1.1


def test_rankin_selberg_divisor_lower_bound():
    seq = arith.divisor_sequence(1000)
    assert arith.rankin_selberg_average(seq, 1000) >= 1000


def test_rankin_selberg_beyond_table():
    seq = arith.divisor_sequence(100)
    with pytest.raises(IndexError):
        arith.rankin_selberg_average(seq, 101)


def test_coefficient_csv_roundtrip(tmp_path):
    f = arith.generate_delta_coefficients(50)
    path = arith.write_coefficients_csv(f, tmp_path / "c.csv")
    with path.open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["n", "a_n", "lambda_n"]
    assert len(rows) == 51
    for n, a, lam in rows[1:]:
        assert int(a) == f.raw[int(n)]
        assert float(lam) == f.lam[int(n)]


@given(st.integers(1, 60), st.integers(1, 60), st.integers(-500, 500))
@settings(max_examples=200, deadline=None)
def test_ramanujan_multiplicative_in_modulus(q1, q2, m):
    if math.gcd(q1, q2) != 1:
        return
    assert arith.ramanujan_sum(q1 * q2, m) == arith.ramanujan_sum(q1, m) * arith.ramanujan_sum(q2, m)


_HECKE_TABLE = arith.generate_delta_coefficients(2000)


@given(st.integers(1, 44), st.integers(1, 44))
@settings(max_examples=200, deadline=None)
def test_hecke_relation_random_pairs(m, n):
    assert arith.hecke_relation_check(_HECKE_TABLE, m, n)
