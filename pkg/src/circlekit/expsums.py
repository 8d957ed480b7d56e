"""Complete and incomplete exponential sums.

complete_power_sum evaluates sum_{r=1..q} e(a r^k / q) with the power
reduced mod q, so every term's phase is an exact rational.  weyl_sum
evaluates sum_{n <= x^(1/l)} e(alpha n^l) with the phase alpha*n^l
reduced mod 1 in exact integer arithmetic (a float's value is a dyadic
rational), keeping per-term phase error at the ulp level regardless of
how large n^l gets.
"""

from __future__ import annotations

import math

import numpy as np

from .arith import DivisorTable, integer_kth_root
from .errors import DomainError


def complete_power_sum(q: int, a: int, k: int) -> complex:
    """S_k(q, a) = sum_{r=1}^{q} e(a r^k / q), gcd(a, q) = 1."""
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    if math.gcd(a, q) != 1:
        raise DomainError(f"gcd(a, q) must be 1, got gcd({a}, {q})")
    residues = np.fromiter(
        (a * pow(r, k, q) % q for r in range(1, q + 1)), dtype=np.int64, count=q
    )
    return complex(np.exp(2j * np.pi * (residues / q)).sum())


def power_sum_spectrum(q: int, k: int) -> np.ndarray:
    """S_k(q, a) for every residue a = 0..q-1 at once.

    The histogram of r^k mod q is Fourier-transformed; entry a of the
    conjugated DFT is exactly sum_r e(a r^k / q).
    """
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    counts = np.bincount(
        np.fromiter((pow(r, k, q) for r in range(1, q + 1)), dtype=np.int64, count=q),
        minlength=q,
    ).astype(np.float64)
    return np.conj(np.fft.fft(counts))


def weyl_sum(alpha: float, x: int, ell: int) -> complex:
    """sum_{1 <= n <= x^(1/ell)} e(alpha n^ell) with exact phase reduction."""
    if ell < 1:
        raise DomainError(f"ell must be >= 1, got {ell}")
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    m = integer_kth_root(x, ell)
    num, den = float(alpha).as_integer_ratio()
    phases = np.fromiter(
        (((num * n**ell) % den) / den for n in range(1, m + 1)),
        dtype=np.float64,
        count=m,
    )
    return complex(np.exp(2j * np.pi * phases).sum())


def divisor_exp_sum(alpha: float, x: int, table: DivisorTable) -> complex:
    """f(alpha) = sum_{n <= 4x} d(n) e(alpha n)."""
    n_max = 4 * x
    if table.limit < n_max:
        raise DomainError(f"divisor table covers {table.limit} < 4x = {n_max}")
    frac = math.fmod(float(alpha), 1.0)
    n = np.arange(1, n_max + 1, dtype=np.float64)
    phases = np.mod(n * frac, 1.0)
    d = table.values[1 : n_max + 1].astype(np.float64)
    return complex((d * np.exp(2j * np.pi * phases)).sum())


def sk_bound_profile(q_max: int, k: int) -> list[tuple[int, float]]:
    """(q, max_a |S_k(q, a)| / q^((k-1)/k)) for q <= q_max.

    The max ratio over the profile is the fitted constant of the
    complete-sum bound.
    """
    if q_max < 1:
        raise DomainError(f"q_max must be >= 1, got {q_max}")
    profile = []
    for q in range(1, q_max + 1):
        spectrum = power_sum_spectrum(q, k)
        coprime = np.gcd(np.arange(q), q) == 1
        top = float(np.abs(spectrum[coprime]).max())
        profile.append((q, top / q ** ((k - 1) / k)))
    return profile


def crt_factorization_check(q1: int, q2: int, a: int, k: int) -> float:
    """Residual of the multiplicative splitting of S_k at coprime moduli.

    |S_k(q1 q2, a) - S_k(q1, a q2^{k-1}) S_k(q2, a q1^{k-1})|, which is
    zero in exact arithmetic; the return value is pure rounding noise.
    """
    if math.gcd(q1, q2) != 1:
        raise DomainError(f"moduli must be coprime, got ({q1}, {q2})")
    if math.gcd(a, q1 * q2) != 1:
        raise DomainError(f"gcd(a, q1 q2) must be 1, got a={a}")
    whole = complete_power_sum(q1 * q2, a, k)
    left = complete_power_sum(q1, a * pow(q2, k - 1, q1) % q1, k) if q1 > 1 else 1.0
    right = complete_power_sum(q2, a * pow(q1, k - 1, q2) % q2, k) if q2 > 1 else 1.0
    return abs(whole - left * right)
