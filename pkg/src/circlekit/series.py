"""Singular series: local densities and their truncated sums.

The local density at modulus q is

    A_k(q) = q^(-5) sum_{a coprime to q} S_2(q, a)^3 S_k(q, a),

real by conjugate pairing, multiplicative in q, and bounded by
q^(-3/2-1/k) up to a constant.  The two truncated sums kept here are
sigma1 = sum A_k(q) and sigma2 = sum (-2 log q + 2 gamma) A_k(q).

A_k is computed two ways: a direct sum over residues (the slow
reference) and a prime-power factorization extended multiplicatively
(the fast path used for large truncation bounds).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import EULER_GAMMA
from .errors import DomainError, NumericalIntegrityError
from .expsums import complete_power_sum, power_sum_spectrum

IMAG_TOL = 1e-9


def _real_part(value: complex, q: int) -> float:
    if abs(value.imag) >= IMAG_TOL:
        raise NumericalIntegrityError(
            f"local density at q={q} has imaginary part {value.imag:.3e} "
            f">= {IMAG_TOL:.0e}; conjugate cancellation failed"
        )
    return value.real


def local_density(q: int, k: int) -> float:
    """A_k(q) via the vectorized residue spectrum."""
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    s2 = power_sum_spectrum(q, 2)
    sk = power_sum_spectrum(q, k)
    mask = np.gcd(np.arange(q), q) == 1
    total = complex((s2[mask] ** 3 * sk[mask]).sum()) / q**5
    return _real_part(total, q)


def local_density_direct(q: int, k: int) -> float:
    """A_k(q) by direct summation over residues; validation path."""
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    total = 0j
    for a in range(1, q + 1):
        if math.gcd(a, q) == 1:
            total += complete_power_sum(q, a, 2) ** 3 * complete_power_sum(q, a, k)
    return _real_part(total / q**5, q)


def _factor_prime_powers(q: int) -> list[int]:
    parts = []
    n = q
    p = 2
    while p * p <= n:
        if n % p == 0:
            pe = 1
            while n % p == 0:
                pe *= p
                n //= p
            parts.append(pe)
        p += 1
    if n > 1:
        parts.append(n)
    return parts


@dataclass(frozen=True)
class SingularSeriesPartial:
    """Truncated singular series with its full term list."""

    k: int
    Q: int
    terms: list[tuple[int, float]]
    sigma1: float
    sigma2: float
    gamma: float = EULER_GAMMA


def sigma_truncated(Q: int, k: int, method: str = "fast") -> SingularSeriesPartial:
    """Partial sums of the singular series over q <= Q.

    method "fast" computes A_k at prime powers only and extends
    multiplicatively; "direct" evaluates every modulus from scratch.
    """
    if Q < 1:
        raise DomainError(f"Q must be >= 1, got {Q}")
    if method not in ("fast", "direct"):
        raise DomainError(f"unknown method {method!r}")
    if method == "direct":
        values = [local_density(q, k) for q in range(1, Q + 1)]
    else:
        cache = {1: 1.0}
        for q in range(2, Q + 1):
            parts = _factor_prime_powers(q)
            if len(parts) == 1:
                cache[q] = local_density(q, k)
            else:
                prod = 1.0
                for pe in parts:
                    prod *= cache[pe]
                cache[q] = prod
        values = [cache[q] for q in range(1, Q + 1)]
    terms = list(zip(range(1, Q + 1), values))
    sigma1 = float(sum(values))
    sigma2 = float(
        sum((-2.0 * math.log(q) + 2.0 * EULER_GAMMA) * a for q, a in terms)
    )
    return SingularSeriesPartial(k=k, Q=Q, terms=terms, sigma1=sigma1, sigma2=sigma2)


@dataclass(frozen=True)
class TailDecay:
    """Fitted constants for the truncation-tail envelope Q^(-1/2-1/k)."""

    Q: int
    k: int
    c_sigma1: float
    c_sigma2: float


def series_tail_check(
    partial_q: SingularSeriesPartial, partial_2q: SingularSeriesPartial
) -> TailDecay:
    """Fitted tail constants from a truncation doubling Q -> 2Q.

    sigma2's weight carries an extra log, so its envelope is allowed a
    log(2 + Q) factor.
    """
    if partial_q.k != partial_2q.k:
        raise DomainError("partials must share k")
    if partial_2q.Q != 2 * partial_q.Q:
        raise DomainError(
            f"expected bounds (Q, 2Q), got ({partial_q.Q}, {partial_2q.Q})"
        )
    q = partial_q.Q
    envelope = q ** (-0.5 - 1.0 / partial_q.k)
    c1 = abs(partial_2q.sigma1 - partial_q.sigma1) / envelope
    c2 = abs(partial_2q.sigma2 - partial_q.sigma2) / (envelope * math.log(2.0 + q))
    return TailDecay(Q=q, k=partial_q.k, c_sigma1=c1, c_sigma2=c2)
