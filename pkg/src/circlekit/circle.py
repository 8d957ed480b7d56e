"""Circle-method diagnostics.

Rational approximation by continued-fraction convergents, the
major/minor arc split it induces, residuals of the two major-arc
approximations (the power-sum factor against its Gamma-type model, the
divisor generating function against its main-term expansion), and the
exact moment counts behind the even-moment bounds.

All rational comparisons run in exact Fraction arithmetic; floats only
appear in returned remainders and envelope ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import DivisorTable, integer_kth_root
from .budget import check_budget
from .constants import EULER_GAMMA
from .errors import DomainError, SizeError
from .expsums import complete_power_sum, weyl_sum
from .integrals import (
    linear_phase_integral,
    log_weighted_integral,
    unit_power_phase_integral,
)

# The generating function over divisors runs to 4x, so the expansion
# residual weights integrate the scaled variable over [0, 4].
_EXPANSION_RANGE = 4.0

# Largest pair-sum array the moment counter will sort (8 bytes each).
MAX_PAIR_SORT = 250_000_000


@dataclass(frozen=True)
class RationalApproximation:
    """a/q with remainder lam = alpha - a/q, q <= tau, |lam| <= 1/(q tau)."""

    a: int
    q: int
    lam: float


def convergents(value: Fraction):
    """Continued-fraction convergents of an exact rational, in order."""
    p_prev, q_prev = 1, 0
    p, q = int(math.floor(value)), 1
    yield p, q
    rest = value - int(math.floor(value))
    while rest != 0:
        value = 1 / rest
        digit = int(math.floor(value))
        rest = value - digit
        p, p_prev = digit * p + p_prev, p
        q, q_prev = digit * q + q_prev, q
        yield p, q


def dirichlet_approx(alpha: float, tau: float) -> RationalApproximation:
    """Best rational a/q with q <= tau and |alpha - a/q| <= 1/(q tau).

    The last convergent of alpha with denominator <= tau qualifies: if
    the next convergent's denominator exceeds tau, the classical
    two-denominator bound gives |alpha - a/q| <= 1/(q q') < 1/(q tau).
    """
    if tau < 1.0:
        raise DomainError(f"tau must be >= 1, got {tau}")
    exact = Fraction(float(alpha))
    tau_frac = Fraction(float(tau))
    best = (int(math.floor(exact)), 1)
    for p, q in convergents(exact):
        if q > tau_frac:
            break
        best = (p, q)
    a, q = best
    lam = float(exact - Fraction(a, q))
    return RationalApproximation(a=a, q=q, lam=lam)


@dataclass(frozen=True)
class ArcParameters:
    """Arc-partition parameters: log x < 2Q < tau < x, Q*tau near x."""

    x: int
    k: int
    Q: int
    tau: float

    def __post_init__(self):
        if self.k < 3:
            raise DomainError(f"k must be >= 3, got {self.k}")
        if not math.log(self.x) < 2 * self.Q:
            raise DomainError(f"need log x < 2Q: log({self.x}) vs 2*{self.Q}")
        if not 2 * self.Q < self.tau < self.x:
            raise DomainError(f"need 2Q < tau < x: {2*self.Q}, {self.tau}, {self.x}")
        product = self.Q * self.tau
        if not self.x / 4 <= product <= 4 * self.x:
            raise DomainError(f"need Q*tau within [x/4, 4x], got {product}")
        if self.Q ** (self.k + 2) > self.x**2:
            raise DomainError(
                f"need Q <= x^(2/(k+2)): Q={self.Q}, x={self.x}, k={self.k}"
            )

    @classmethod
    def default(cls, x: int, k: int) -> "ArcParameters":
        """Q = floor(x^(2/(k+2))), tau = x/Q."""
        q_bound = integer_kth_root(x * x, k + 2)
        return cls(x=x, k=k, Q=q_bound, tau=x / q_bound)


@dataclass(frozen=True)
class ArcVerdict:
    """Major(a, q) or Minor classification of one frequency."""

    major: bool
    a: int | None = None
    q: int | None = None


def classify_arc(alpha: float, params: ArcParameters) -> ArcVerdict:
    """Major iff some q <= Q, 1 <= a <= q, gcd(a,q)=1 has |alpha - a/q| <= 1/(q tau).

    Any such witness satisfies |alpha - a/q| < 1/(2 q^2) because
    tau > 2Q >= 2q, so it must be a continued-fraction convergent;
    scanning convergents with q <= Q is therefore exhaustive.
    """
    exact = Fraction(float(alpha))
    tau_frac = Fraction(float(params.tau))
    lo, hi = 1 / tau_frac, 1 + 1 / tau_frac
    if not lo <= exact <= hi:
        raise DomainError(f"alpha={alpha} outside [1/tau, 1 + 1/tau]")
    for p, q in convergents(exact):
        if q > params.Q:
            break
        if 1 <= p <= q and abs(exact - Fraction(p, q)) * (q * tau_frac) <= 1:
            return ArcVerdict(major=True, a=p, q=q)
    return ArcVerdict(major=False)


def vk_approx(a: int, q: int, beta: float, x: int, k: int) -> complex:
    """Major-arc model of the power generating sum at alpha = a/q + beta:

        x^(1/k) * S_k(q, a)/q * int_0^1 e(x beta u^k) du.
    """
    if math.gcd(a, q) != 1:
        raise DomainError(f"gcd(a, q) must be 1, got ({a}, {q})")
    scale = float(x) ** (1.0 / k)
    return scale * complete_power_sum(q, a, k) / q * unit_power_phase_integral(x * beta, k)


def vk_residual(a: int, q: int, beta: float, x: int, k: int) -> float:
    """|f_k(a/q + beta) - V_k|, the Gamma-model approximation error."""
    observed = weyl_sum(a / q + beta, x, k)
    return abs(observed - vk_approx(a, q, beta, x, k))


@dataclass(frozen=True)
class DiagnosticBound:
    """A fitted envelope constant plus the per-sample rows behind it."""

    label: str
    params: dict
    constant: float
    rows: list = field(default_factory=list)


def vk_envelope_scan(
    x: int, k: int, q_max: int, slack: float = 0.05
) -> DiagnosticBound:
    """Fitted constant of the V_k residual envelope q^(1/2+slack) (1+x|beta|)^(1/2).

    Scans every reduced a/q with q <= q_max and offsets beta through the
    window |beta| <= x^(1/k-1)/(2kq) where the sharper remainder form
    applies.
    """
    rows = []
    top = 0.0
    for q in range(1, q_max + 1):
        width = x ** (1.0 / k - 1.0) / (2.0 * k * q)
        for a in range(1, q + 1):
            if math.gcd(a, q) != 1:
                continue
            for beta in (0.0, 0.5 * width, width, -width):
                residual = vk_residual(a, q, beta, x, k)
                envelope = q ** (0.5 + slack) * (1.0 + x * abs(beta)) ** 0.5
                ratio = residual / envelope
                rows.append(
                    {"a": a, "q": q, "beta": beta, "observed": residual,
                     "bound": envelope, "ratio": ratio}
                )
                top = max(top, ratio)
    return DiagnosticBound(
        label="vk-residual",
        params={"x": x, "k": k, "q_max": q_max, "slack": slack},
        constant=top,
        rows=rows,
    )


@dataclass(frozen=True)
class ExpansionResidual:
    """Observed expansion error against its x^slack (q^{1/2} x/tau + q^{2/3} x^{1/3}) scale."""

    residual: float
    delta: float

    @property
    def ratio(self) -> float:
        return self.residual / self.delta


def expansion_delta(q: int, x: int, tau: float, slack: float = 0.05) -> float:
    """The comparison scale for the divisor-expansion residual."""
    return x**slack * (math.sqrt(q) * x / tau + q ** (2.0 / 3.0) * x ** (1.0 / 3.0))


def divisor_expansion_residual(
    a: int,
    q: int,
    beta: float,
    x: int,
    table: DivisorTable,
    params: ArcParameters,
    slack: float = 0.05,
) -> ExpansionResidual:
    """Error of the three-term main model of f(-a/q - beta).

    The model is (x log x / q) L(x beta) + (x/q) L_log(x beta)
    + ((-2 log q + 2 gamma)/q) x L(x beta), with L and L_log the linear
    and log-weighted phase integrals taken over the scaled range [0, 4]
    actually spanned by the 4x summation limit of f.
    """
    if math.gcd(a, q) != 1:
        raise DomainError(f"gcd(a, q) must be 1, got ({a}, {q})")
    if q > params.Q:
        raise DomainError(f"q={q} exceeds Q={params.Q}")
    if params.tau <= x**0.51:
        raise DomainError(f"tau={params.tau} must exceed x^0.51")
    if params.Q * params.tau > x * (1 + 1e-12):
        raise DomainError("need Q*tau <= x for the expansion hypothesis")
    if abs(beta) > 1.0 / (q * params.tau):
        raise DomainError(f"|beta|={abs(beta)} exceeds 1/(q tau)")
    n_max = 4 * x
    if table.limit < n_max:
        raise DomainError(f"divisor table covers {table.limit} < 4x = {n_max}")
    n = np.arange(1, n_max + 1, dtype=np.int64)
    phases = ((n * a) % q) / q + n.astype(np.float64) * beta
    d = table.values[1 : n_max + 1].astype(np.float64)
    observed = complex((d * np.exp(-2j * np.pi * phases)).sum())
    arg = x * beta
    lin = linear_phase_integral(arg, upper=_EXPANSION_RANGE)
    lg = log_weighted_integral(arg, upper=_EXPANSION_RANGE)
    model = (
        (x * math.log(x) / q) * lin
        + (x / q) * lg
        + ((-2.0 * math.log(q) + 2.0 * EULER_GAMMA) / q) * x * lin
    )
    return ExpansionResidual(
        residual=abs(observed - model),
        delta=expansion_delta(q, x, params.tau, slack),
    )


def expansion_envelope_scan(
    x: int,
    k: int,
    table: DivisorTable,
    slack: float = 0.05,
    q_samples: tuple[int, ...] = (1, 2, 3, 5, 7, 11),
) -> DiagnosticBound:
    """Max expansion-residual ratio over sampled (a, q, beta)."""
    params = ArcParameters.default(x, k)
    rows = []
    top = 0.0
    qs = sorted({q for q in q_samples if q <= params.Q} | {params.Q})
    for q in qs:
        a = 1 if q == 1 else next(v for v in range(1, q) if math.gcd(v, q) == 1)
        for beta in (0.0, 0.5 / (q * params.tau), 1.0 / (q * params.tau)):
            res = divisor_expansion_residual(a, q, beta, x, table, params, slack)
            rows.append(
                {"a": a, "q": q, "beta": beta, "observed": res.residual,
                 "bound": res.delta, "ratio": res.ratio}
            )
            top = max(top, res.ratio)
    return DiagnosticBound(
        label="divisor-expansion",
        params={"x": x, "k": k, "slack": slack, "Q": params.Q, "tau": params.tau},
        constant=top,
        rows=rows,
    )


def hua_count(Y: int, k: int, j: int) -> int:
    """Exact count of m_1^k+...+m_t^k = n_1^k+...+n_t^k, t = 2^(j-1), all in [1, Y].

    By orthogonality this equals the 2^j-th moment of the power
    generating sum.  j=1 counts the diagonal; j=2 sorts all pair sums
    and sums squared run lengths; higher j convolves the power
    histogram, feasible only for small Y^k.
    """
    if Y < 1:
        raise DomainError(f"Y must be >= 1, got {Y}")
    if j < 1:
        raise DomainError(f"j must be >= 1, got {j}")
    if j == 1:
        check_budget(Y, "hua_count")
        return Y
    if j == 2:
        check_budget(Y * Y, "hua_count")
        if Y * Y > MAX_PAIR_SORT:
            raise SizeError(
                f"pair-sum sort needs {Y * Y} entries, cap is {MAX_PAIR_SORT}"
            )
        powers = np.arange(1, Y + 1, dtype=np.int64) ** k
        sums = (powers[:, None] + powers[None, :]).ravel()
        sums.sort()
        boundaries = np.flatnonzero(np.diff(sums)) + 1
        starts = np.concatenate(([0], boundaries, [sums.size]))
        runs = np.diff(starts)
        return int((runs.astype(object) ** 2).sum())
    t = 2 ** (j - 1)
    length = t * (Y**k) + 1
    check_budget(length * (t - 1), "hua_count")
    counts = np.bincount(np.arange(1, Y + 1, dtype=np.int64) ** k, minlength=Y**k + 1)
    acc = counts.astype(object)
    for _ in range(t - 1):
        acc = np.convolve(acc, counts.astype(object))
    return int((acc**2).sum())


def minor_arc_bound_profile(
    x: int,
    k: int,
    params: ArcParameters | None = None,
    samples: int = 1000,
    seed: int = 0,
) -> DiagnosticBound:
    """Fitted constant of the minor-arc power-sum bound over random frequencies.

    Each minor-arc sample alpha gets its convergent (a, q); the observed
    |f_k(alpha)| is divided by the k <= 7 Weyl-differencing bound
    M (1/q + 1/M + q/M^k)^(1/2^(k-1)) with M = floor(x^(1/k)), or for
    k >= 8 the smooth-number bound
    x^(1/k) (1/q + x^(-1/k) + q/x)^(1/(2k(k-1))).
    """
    if params is None:
        params = ArcParameters.default(x, k)
    rng = np.random.default_rng(seed)
    m = integer_kth_root(x, k)
    rows = []
    top = 0.0
    draws = 0
    while len(rows) < samples and draws < 50 * samples:
        draws += 1
        alpha = float(1.0 / params.tau + rng.random())
        verdict = classify_arc(alpha, params)
        if verdict.major:
            continue
        approx = dirichlet_approx(alpha, params.tau)
        observed = abs(weyl_sum(alpha, x, k))
        if k <= 7:
            base = 1.0 / approx.q + 1.0 / m + approx.q / m**k
            bound = m * base ** (1.0 / 2 ** (k - 1))
        else:
            base = 1.0 / approx.q + x ** (-1.0 / k) + approx.q / x
            bound = x ** (1.0 / k) * base ** (1.0 / (2 * k * (k - 1)))
        ratio = observed / bound
        rows.append(
            {"alpha": alpha, "a": approx.a, "q": approx.q, "lambda": approx.lam,
             "observed": observed, "bound": bound, "ratio": ratio}
        )
        top = max(top, ratio)
    return DiagnosticBound(
        label="minor-arc-power-sum",
        params={"x": x, "k": k, "Q": params.Q, "tau": params.tau,
                "samples": len(rows), "seed": seed},
        constant=top,
        rows=rows,
    )
