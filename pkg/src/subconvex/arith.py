"""Exact multiplicative arithmetic.

Coefficients of the weight-12 discriminant form, the divisor function,
the Moebius function and Ramanujan sums.  Raw Fourier coefficients are
kept as Python integers; the analytic modules only ever see the
normalized floats ``lam``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import gmpy2
import numpy as np

__all__ = [
    "CuspFormData",
    "MultiplicativeSequence",
    "generate_delta_coefficients",
    "eta_power_bruteforce",
    "divisor_sequence",
    "divisor_counts",
    "mobius_sieve",
    "hecke_relation_check",
    "ramanujan_sum",
    "ramanujan_sum_direct",
    "ramanujan_sum_formula",
    "rankin_selberg_average",
    "write_coefficients_csv",
]


@dataclass(frozen=True)
class CuspFormData:
    """A level-1 holomorphic Hecke eigenform, as a coefficient table.

    ``raw[n]`` is the exact integer a(n) (index 0 unused, set to 0) and
    ``lam[n] = a(n) / n**((k-1)/2)``.
    """

    weight: int
    raw: Sequence[int] = field(repr=False)
    lam: np.ndarray = field(repr=False)
    label: str = "eigenform"

    @property
    def n_max(self) -> int:
        return len(self.lam) - 1

    def lam_at(self, n: int) -> float:
        if n < 1 or n > self.n_max:
            raise IndexError(f"coefficient index {n} outside table 1..{self.n_max}")
        return float(self.lam[n])


@dataclass(frozen=True)
class MultiplicativeSequence:
    """Real multiplicative sequence v(1..n_max); ``values[0]`` is unused."""

    values: np.ndarray = field(repr=False)
    label: str = "divisor"

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    @property
    def lam(self) -> np.ndarray:
        # same access path as CuspFormData, so analytic code is agnostic
        return self.values


# ---------------------------------------------------------------------------
# eta-product expansion
# ---------------------------------------------------------------------------

def _jacobi_cube_terms(length: int) -> dict[int, int]:
    """Sparse coefficients of prod(1-q^m)^3 = sum (-1)^k (2k+1) q^{k(k+1)/2}."""
    terms = {}
    k = 0
    while k * (k + 1) // 2 < length:
        terms[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    return terms


def _pack(terms: dict[int, int], length: int, width: int) -> gmpy2.mpz:
    # Kronecker substitution: sum c_i B^i with B = 256**width, signed c_i
    unsigned = bytearray(length * width)
    borrow = bytearray(length * width + width)
    for i, c in terms.items():
        unsigned[i * width:(i + 1) * width] = (c % (1 << (8 * width))).to_bytes(width, "little")
        if c < 0:
            borrow[(i + 1) * width] = 1
    return gmpy2.mpz(int.from_bytes(unsigned, "little")) - gmpy2.mpz(int.from_bytes(borrow, "little"))


def _unpack(value: gmpy2.mpz, length: int, width: int) -> list[int]:
    half = 1 << (8 * width - 1)
    offset = int.from_bytes((b"\x00" * (width - 1) + b"\x80") * length, "little")
    raw = int(value + offset).to_bytes(length * width, "little")
    return [int.from_bytes(raw[i * width:(i + 1) * width], "little") - half for i in range(length)]


def _eta24_series(length: int) -> list[int]:
    """First ``length`` coefficients of prod_{m>=1} (1-q^m)^24, exactly."""
    # l1 bound for the truncated product; keeps every slot carry-free
    bound = 2 * (2 * length + 2) ** 8
    width = (bound.bit_length() + 1 + 7) // 8
    modulus = gmpy2.mpz(1) << (8 * width * length)
    half_mod = modulus >> 1

    x = _pack(_jacobi_cube_terms(length), length, width)
    for _ in range(3):  # (P^3)^8 = P^24
        x = (x * x) % modulus
        if x >= half_mod:
            x -= modulus
    return _unpack(x, length, width)


def eta_power_bruteforce(length: int, power: int = 24) -> list[int]:
    """Dense schoolbook expansion of prod(1-q^m)^power; an oracle for small lengths."""
    series = [1] + [0] * (length - 1)
    for m in range(1, length):
        for _ in range(power):
            for i in range(length - 1, m - 1, -1):
                series[i] -= series[i - m]
    return series


def generate_delta_coefficients(n_max: int) -> CuspFormData:
    """Ramanujan tau(n), n <= n_max, from Delta = q prod (1-q^m)^24."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    series = _eta24_series(n_max)
    raw = [0] + series  # a(n) = coefficient of q^{n-1} in the eta product
    n = np.arange(n_max + 1, dtype=float)
    lam = np.zeros(n_max + 1)
    lam[1:] = np.array(raw[1:], dtype=float) / n[1:] ** 5.5
    return CuspFormData(weight=12, raw=raw, lam=lam, label="delta")


# ---------------------------------------------------------------------------
# sieves
# ---------------------------------------------------------------------------

def divisor_counts(n_max: int) -> np.ndarray:
    d = np.zeros(n_max + 1, dtype=np.int64)
    for i in range(1, n_max + 1):
        d[i::i] += 1
    return d


def divisor_sequence(n_max: int) -> MultiplicativeSequence:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return MultiplicativeSequence(values=divisor_counts(n_max).astype(float), label="divisor")


@lru_cache(maxsize=8)
def mobius_sieve(n_max: int) -> np.ndarray:
    """Linear sieve for mu(0..n_max); mu[0] = 0."""
    mu = np.zeros(n_max + 1, dtype=np.int64)
    if n_max >= 1:
        mu[1] = 1
    is_comp = np.zeros(n_max + 1, dtype=bool)
    primes: list[int] = []
    for i in range(2, n_max + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            ip = i * p
            if ip > n_max:
                break
            is_comp[ip] = True
            if i % p == 0:
                mu[ip] = 0
                break
            mu[ip] = -mu[i]
    mu.flags.writeable = False
    return mu


def _mobius(n: int) -> int:
    if n == 1:
        return 1
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


# ---------------------------------------------------------------------------
# Hecke relations
# ---------------------------------------------------------------------------

def hecke_relation_check(f: CuspFormData, m: int, n: int) -> bool:
    """a(m)a(n) == sum_{d | (m,n)} d^{k-1} a(mn/d^2), in exact integers."""
    if m < 1 or n < 1:
        raise IndexError("Hecke indices must be positive")
    if m * n > f.n_max:
        raise IndexError(f"m*n = {m * n} exceeds coefficient table n_max = {f.n_max}")
    a = f.raw
    g = math.gcd(m, n)
    rhs = 0
    for d in range(1, g + 1):
        if g % d == 0:
            rhs += d ** (f.weight - 1) * a[m * n // (d * d)]
    return a[m] * a[n] == rhs


# ---------------------------------------------------------------------------
# Ramanujan sums
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1024)
def _units(q: int) -> np.ndarray:
    a = np.arange(q)
    return a[np.gcd(a, q) == 1]


def ramanujan_sum_direct(q: int, m: int | np.ndarray) -> np.ndarray:
    """sum over a in (Z/q)^* of e(am/q), as complex numbers (vectorized in m)."""
    m_arr = np.atleast_1d(np.asarray(m, dtype=np.int64))
    units = _units(q)
    phase = np.outer(m_arr % q, units) % q
    return np.exp(2j * np.pi * phase / q).sum(axis=1)


def ramanujan_sum_formula(q: int, m: int) -> int:
    """sum_{d | (q, m)} d mu(q/d)."""
    g = math.gcd(q, abs(m)) if m != 0 else q
    total = 0
    for d in range(1, g + 1):
        if g % d == 0:
            total += d * _mobius(q // d)
    return total


def ramanujan_sum(q: int, m: int) -> int:
    """Ramanujan sum R_q(m), computed two ways; raises if they disagree."""
    if q < 1:
        raise ValueError("q must be >= 1")
    direct = complex(ramanujan_sum_direct(q, m)[0])
    if abs(direct.imag) > 1e-9:
        raise ArithmeticError(f"R_{q}({m}): direct sum has imaginary part {direct.imag}")
    rounded = round(direct.real)
    formula = ramanujan_sum_formula(q, m)
    if rounded != formula or abs(direct.real - rounded) > 1e-6:
        raise ArithmeticError(f"R_{q}({m}): direct {direct.real} vs divisor-Moebius {formula}")
    return formula


# ---------------------------------------------------------------------------
# Rankin-Selberg averages
# ---------------------------------------------------------------------------

def rankin_selberg_average(seq: CuspFormData | MultiplicativeSequence, x: float) -> float:
    """sum_{n <= x} |lambda(n)|^2."""
    n = int(math.floor(x))
    if n > seq.n_max:
        raise IndexError(f"x = {x} exceeds coefficient table n_max = {seq.n_max}")
    if n < 1:
        return 0.0
    return math.fsum(np.asarray(seq.lam[1:n + 1]) ** 2)


def write_coefficients_csv(f: CuspFormData, path: str | Path, n_max: int | None = None) -> Path:
    path = Path(path)
    top = f.n_max if n_max is None else min(n_max, f.n_max)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "a_n", "lambda_n"])
        for n in range(1, top + 1):
            writer.writerow([n, f.raw[n], repr(float(f.lam[n]))])
    return path
