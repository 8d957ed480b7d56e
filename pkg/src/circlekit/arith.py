"""Exact arithmetic backbone.

Divisor-count sieve, and two independent exact evaluators for the
divisor sum over quadruples (n1, n2, n3, n4) with n1, n2, n3 up to
sqrt(x) and n4 up to x^(1/k):

    S = sum d(n1^2 + n2^2 + n3^2 + n4^k)

One evaluator enumerates every tuple; the other convolves the two
representation histograms (n1^2+n2^2 against n3^2+n4^k) and pairs the
result with the divisor table.  The two must agree to the last digit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .budget import check_budget
from .errors import DomainError, PrecisionError, SizeError

# Largest divisor table we are willing to allocate (entries).
MAX_SIEVE = 200_000_000

# NTT-friendly primes (both with primitive root 3) supporting transform
# lengths up to 2^23 and 2^25.
_NTT_PRIMES = (998244353, 167772161)
_NTT_ROOT = 3


def integer_kth_root(n: int, k: int) -> int:
    """floor(n^(1/k)) by integer bisection; exact at perfect powers."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n == 0:
        return 0
    if k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    lo, hi = 0, 1 << (n.bit_length() // k + 1)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**k <= n:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class DivisorTable:
    """d(n) for 1 <= n <= limit; index 0 is unused and holds 0."""

    limit: int
    values: np.ndarray

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise DomainError(f"n={n} outside table range [1, {self.limit}]")
        return int(self.values[n])


def divisor_sieve(limit: int) -> DivisorTable:
    """Exact d(n) for all n <= limit by harmonic multiple-marking.

    Total work is sum_{i<=N} N/i = O(N log N) table increments.
    """
    if limit < 1:
        raise SizeError(f"sieve limit must be >= 1, got {limit}")
    if limit > MAX_SIEVE:
        raise SizeError(f"sieve limit {limit} exceeds memory cap {MAX_SIEVE}")
    check_budget(limit, "divisor_sieve")
    d = np.zeros(limit + 1, dtype=np.int32)
    for i in range(1, limit + 1):
        d[i::i] += 1
    return DivisorTable(limit=limit, values=d)


def divisor_count_naive(n: int) -> int:
    """d(n) by trial division; the sieve's independent oracle."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    count = 0
    i = 1
    while i * i <= n:
        if n % i == 0:
            count += 1 if i * i == n else 2
        i += 1
    return count


def sum_d_squared(limit: int, table: DivisorTable | None = None) -> int:
    """Exact sum of d(n)^2 for n <= limit.

    The second moment grows like N log^3 N; callers check the fitted
    constant of that envelope.
    """
    if table is None:
        table = divisor_sieve(limit)
    if table.limit < limit:
        raise DomainError(f"table covers {table.limit} < {limit}")
    v = table.values[1 : limit + 1].astype(np.int64)
    return int(np.dot(v, v))


@dataclass(frozen=True)
class ProblemInstance:
    """Size parameter x and mixed-power exponent k (k >= 3)."""

    x: int
    k: int

    def __post_init__(self):
        if self.k < 3:
            raise DomainError(f"k must be >= 3, got {self.k}")
        if self.x < 1:
            raise DomainError(f"x must be >= 1, got {self.x}")

    @property
    def square_limit(self) -> int:
        return math.isqrt(self.x)

    @property
    def power_limit(self) -> int:
        return integer_kth_root(self.x, self.k)

    @property
    def max_value(self) -> int:
        r, p = self.square_limit, self.power_limit
        return 3 * r * r + p**self.k

    @property
    def tuple_count(self) -> int:
        return self.square_limit**3 * self.power_limit


@dataclass(frozen=True)
class RepresentationHistogram:
    """counts[s] = number of representations of s by the designated form."""

    bound: int
    counts: np.ndarray

    @property
    def mass(self) -> int:
        return int(self.counts.sum())


def _require_table(inst: ProblemInstance, table: DivisorTable | None) -> DivisorTable:
    need = inst.max_value
    if table is None:
        return divisor_sieve(need)
    if table.limit < need:
        raise DomainError(f"divisor table covers {table.limit} < required {need}")
    return table


def exact_S_direct(inst: ProblemInstance, table: DivisorTable | None = None) -> int:
    """Exact quadruple-sum value by enumerating every (n1, n2, n3, n4).

    The (n2, n3) plane is swept as one vectorized block per (n4, n1-chunk);
    the accumulator is a Python int, so no overflow is possible.
    """
    check_budget(inst.tuple_count, "exact_S_direct")
    table = _require_table(inst, table)
    r, p_lim = inst.square_limit, inst.power_limit
    d = table.values
    sq = np.arange(1, r + 1, dtype=np.int64) ** 2
    plane = sq[:, None] + sq[None, :]
    chunk = max(1, 4_000_000 // (r * r))
    total = 0
    for n4 in range(1, p_lim + 1):
        shift = sq + n4**inst.k
        for lo in range(0, r, chunk):
            block = plane[None, :, :] + shift[lo : lo + chunk, None, None]
            total += int(d.take(block).sum(dtype=np.int64))
    return total


def build_histograms(
    inst: ProblemInstance,
) -> tuple[RepresentationHistogram, RepresentationHistogram]:
    """Exact representation counts for n1^2+n2^2 and n3^2+n4^k."""
    r, p_lim = inst.square_limit, inst.power_limit
    check_budget(r * r + r * p_lim, "build_histograms")
    sq = np.arange(1, r + 1, dtype=np.int64) ** 2
    pw = np.arange(1, p_lim + 1, dtype=np.int64) ** inst.k
    pair = (sq[:, None] + sq[None, :]).ravel()
    mixed = (sq[:, None] + pw[None, :]).ravel()
    r12 = np.bincount(pair)
    r34 = np.bincount(mixed)
    return (
        RepresentationHistogram(bound=len(r12) - 1, counts=r12),
        RepresentationHistogram(bound=len(r34) - 1, counts=r34),
    )


def _transform_length(min_len: int) -> int:
    n = 1
    while n < min_len:
        n *= 2
    return n


def _nearest_int_distance(arr: np.ndarray) -> float:
    return float(np.abs(arr - np.rint(arr)).max()) if arr.size else 0.0


def _fft_convolve_checked(a: np.ndarray, b: np.ndarray, min_len: int) -> np.ndarray:
    """Float convolution with a rounding-margin guard.

    Any coefficient at distance >= 0.25 from the nearest integer raises
    PrecisionError; callers then fall back to the exact modular path.
    """
    n = _transform_length(max(min_len, len(a) + len(b) - 1))
    fa = np.fft.rfft(a.astype(np.float64), n)
    fb = np.fft.rfft(b.astype(np.float64), n)
    conv = np.fft.irfft(fa * fb, n)[: len(a) + len(b) - 1]
    dist = _nearest_int_distance(conv)
    if dist >= 0.25:
        raise PrecisionError(
            f"float transform rounding distance {dist:.3f} >= 0.25; "
            "exact modular transform required"
        )
    return np.rint(conv).astype(np.int64)


def _ntt(a: np.ndarray, p: int, g: int, invert: bool) -> np.ndarray:
    """Iterative radix-2 number-theoretic transform mod p (in place)."""
    a = a.copy()
    n = len(a)
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            a[i], a[j] = a[j], a[i]
    length = 2
    while length <= n:
        w = pow(g, (p - 1) // length, p)
        if invert:
            w = pow(w, p - 2, p)
        half = length // 2
        ws = np.empty(half, dtype=np.int64)
        acc = 1
        for i in range(half):
            ws[i] = acc
            acc = acc * w % p
        blocks = a.reshape(-1, length)
        left = blocks[:, :half].copy()
        right = blocks[:, half:] * ws % p
        blocks[:, :half] = (left + right) % p
        blocks[:, half:] = (left - right) % p
        length *= 2
    if invert:
        n_inv = pow(n, p - 2, p)
        a = a * n_inv % p
    return a


def _ntt_convolve(a: np.ndarray, b: np.ndarray, min_len: int) -> np.ndarray:
    """Exact integer convolution via two coprime moduli and CRT lift."""
    if len(a) and len(b):
        # every output coefficient must fit below p1*p2 for the lift
        cap = _NTT_PRIMES[0] * _NTT_PRIMES[1]
        bound = min(
            int(a.max()) * int(b.sum()), int(b.max()) * int(a.sum())
        )
        if bound >= cap:
            raise SizeError(
                f"convolution coefficients may reach {bound}, beyond the "
                f"modular reconstruction capacity {cap}"
            )
    n = _transform_length(max(min_len, len(a) + len(b) - 1))
    out_len = len(a) + len(b) - 1
    residues = []
    for p in _NTT_PRIMES:
        if (p - 1) % n != 0:
            raise SizeError(f"transform length {n} unsupported by modulus {p}")
        fa = _ntt(np.pad(a.astype(np.int64), (0, n - len(a))), p, _NTT_ROOT, False)
        fb = _ntt(np.pad(b.astype(np.int64), (0, n - len(b))), p, _NTT_ROOT, False)
        residues.append(_ntt(fa * fb % p, p, _NTT_ROOT, True)[:out_len])
    p1, p2 = _NTT_PRIMES
    r1, r2 = residues
    # CRT: x = r1 + p1 * ((r2 - r1) * p1^{-1} mod p2); values < p1*p2 ~ 1.7e17.
    inv_p1 = pow(p1, p2 - 2, p2)
    t = (r2 - r1) % p2 * inv_p1 % p2
    return r1 + p1 * t


def exact_S_convolution(
    inst: ProblemInstance,
    table: DivisorTable | None = None,
    transform: str = "auto",
) -> int:
    """Exact quadruple-sum value via histogram convolution.

    transform: "auto" tries the checked float FFT and falls back to the
    exact modular transform; "fft" and "ntt" force one path.
    """
    table = _require_table(inst, table)
    r12, r34 = build_histograms(inst)
    min_len = 4 * inst.x + 2
    if transform == "fft":
        conv = _fft_convolve_checked(r12.counts, r34.counts, min_len)
    elif transform == "ntt":
        conv = _ntt_convolve(r12.counts, r34.counts, min_len)
    elif transform == "auto":
        try:
            conv = _fft_convolve_checked(r12.counts, r34.counts, min_len)
        except PrecisionError:
            conv = _ntt_convolve(r12.counts, r34.counts, min_len)
    else:
        raise DomainError(f"unknown transform {transform!r}")
    top = min(len(conv) - 1, table.limit)
    d = table.values[: top + 1].astype(np.int64)
    return int(np.dot(d, conv[: top + 1]))
