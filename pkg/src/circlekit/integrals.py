"""Oscillatory phase integrals and the singular integrals built from them.

The density at frequency beta is the product

    (int_0^1 e(beta u^2) du)^3 * (int_0^1 e(beta u^k) du) * F(beta)

with F either int_0^3 e(-beta u) du (plain) or the log-weighted variant.
Its integral over all beta is the singular-integral constant; by Fourier
inversion that equals a 4-dimensional volume (plain) or a log-weighted
volume, which supplies an independent oracle.

Each phase factor has two evaluation routes that are tested against
each other to 1e-9:

  * panel Gauss-Legendre quadrature, subdivided fine enough for at
    least ten nodes per oscillation (the reference, any beta);
  * for the frequency sweep inside j_value, a vectorized path: exact
    closed forms where they exist, and contour-rotated boundary terms
    whose smooth remainder is an asymptotic series in 1/beta (error
    below 1e-20 for |beta| > 10).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import gamma as gamma_fn

import numpy as np
from numpy.polynomial.legendre import leggauss

from .constants import EULER_GAMMA, TWO_PI
from .errors import AccuracyError, DomainError

# Crossover between panel quadrature and the asymptotic contour path.
_ASYM_BETA = 10.0
_ASYM_TERMS = 40

# Split point for the integrable log singularity at 0.
LOG_SPLIT = 1e-6

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _GL_CACHE:
        _GL_CACHE[n] = leggauss(n)
    return _GL_CACHE[n]


def _panel_nodes(edges: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    xg, wg = _gl(order)
    mid = (edges[:-1] + edges[1:]) / 2.0
    half = (edges[1:] - edges[:-1]) / 2.0
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    return nodes, weights


# ---------------------------------------------------------------------------
# scalar reference quadratures
# ---------------------------------------------------------------------------


def unit_power_phase_integral(beta: float, k: int, tol: float = 1e-9) -> complex:
    """int_0^1 e(beta u^k) du by adaptive panel quadrature.

    Panel count scales with the fastest local frequency k|beta| so every
    oscillation carries >= 10 nodes; panels double until two successive
    refinements agree within tol.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    beta = float(beta)
    panels = max(4, math.ceil(10.0 * max(1.0, k * abs(beta) / TWO_PI)))
    previous = None
    for _ in range(7):
        nodes, weights = _panel_nodes(np.linspace(0.0, 1.0, panels + 1), 8)
        value = complex(np.sum(weights * np.exp(2j * np.pi * beta * nodes**k)))
        if previous is not None and abs(value - previous) < 0.5 * tol:
            return value
        previous = value
        panels *= 2
    raise AccuracyError(
        f"unit phase integral did not converge at beta={beta}, k={k}",
        achieved=abs(value - previous),
    )


def linear_phase_integral(beta: float, upper: float = 3.0) -> complex:
    """int_0^upper e(-beta u) du in closed form.

    (1 - e(-upper*beta)) / (2 pi i beta) away from zero; a power series
    keeps the seam |beta| < 1e-6 smooth to full precision.
    """
    beta = float(beta)
    z = -2j * np.pi * upper * beta
    if abs(beta) < 1e-6:
        term = 1.0 + 0j
        total = 1.0 + 0j
        for m in range(1, 9):
            term = term * z / (m + 1)
            total += term
        return upper * complex(total)
    return complex((1.0 - np.exp(z)) / (2j * np.pi * beta))


def _log_panel_edges(beta: float, upper: float, oscillation_panels: int) -> np.ndarray:
    graded = LOG_SPLIT * 2.0 ** np.arange(0, 40)
    graded = graded[graded < min(1.0, upper)]
    uniform = np.linspace(LOG_SPLIT, upper, oscillation_panels + 1)
    return np.unique(np.concatenate([graded, uniform, [upper]]))


def log_weighted_integral(beta: float, upper: float = 3.0, tol: float = 1e-8) -> complex:
    """int_0^upper e(-beta u) log u du.

    [0, delta] is integrated analytically through the first order in
    beta (the neglected remainder is O(beta^2 delta^3 log delta)); the
    rest uses panels graded geometrically toward the singularity and
    sized for the oscillation.
    """
    beta = float(beta)
    delta = LOG_SPLIT
    head = (delta * math.log(delta) - delta) - 2j * np.pi * beta * (
        delta**2 / 2.0 * math.log(delta) - delta**2 / 4.0
    )
    panels = max(8, math.ceil(10.0 * max(1.0, upper * abs(beta) / TWO_PI)))
    previous = None
    for _ in range(7):
        nodes, weights = _panel_nodes(_log_panel_edges(beta, upper, panels), 8)
        value = complex(
            np.sum(weights * np.log(nodes) * np.exp(-2j * np.pi * beta * nodes))
        )
        if previous is not None and abs(value - previous) < 0.5 * tol:
            return complex(head) + value
        previous = value
        panels *= 2
    raise AccuracyError(
        f"log-weighted integral did not converge at beta={beta}",
        achieved=abs(value - previous),
    )


# ---------------------------------------------------------------------------
# vectorized evaluators for the frequency sweep (beta >= 0)
# ---------------------------------------------------------------------------


def _unit_batch_small(betas: np.ndarray, k: int) -> np.ndarray:
    panels = max(16, math.ceil(10.0 * max(1.0, k * _ASYM_BETA / TWO_PI)))
    nodes, weights = _panel_nodes(np.linspace(0.0, 1.0, panels + 1), 8)
    phases = np.exp(2j * np.pi * np.multiply.outer(betas, nodes**k))
    return phases @ weights


def _unit_batch_large(betas: np.ndarray, k: int) -> np.ndarray:
    # Rotate int_0^1 t^c e(beta t) dt (c = 1/k - 1) onto the rays from 0
    # and 1: a Gamma-function boundary term plus e^(i lam) times a smooth
    # remainder expanded asymptotically in 1/lam, lam = 2 pi beta.
    c = 1.0 / k - 1.0
    lam = TWO_PI * betas
    lead = 1j * np.exp(1j * np.pi * c / 2.0) * gamma_fn(c + 1.0) * lam ** (-(c + 1.0))
    inv = 1.0 / lam
    tail = np.zeros(betas.shape, dtype=complex)
    coeff = 1.0 + 0j
    power = inv.astype(complex)
    for m in range(_ASYM_TERMS):
        tail += coeff * power
        coeff = coeff * 1j * (c - m)
        power = power * inv
    return (lead - 1j * np.exp(1j * lam) * tail) / k


def unit_phase_batch(betas: np.ndarray, k: int) -> np.ndarray:
    """Vectorized int_0^1 e(beta u^k) du over an array of beta >= 0."""
    betas = np.asarray(betas, dtype=float)
    out = np.empty(betas.shape, dtype=complex)
    small = betas <= _ASYM_BETA
    if small.any():
        out[small] = _unit_batch_small(betas[small], k)
    if (~small).any():
        out[~small] = _unit_batch_large(betas[~small], k)
    return out


def linear_phase_batch(betas: np.ndarray, upper: float = 3.0) -> np.ndarray:
    """Vectorized closed form of int_0^upper e(-beta u) du."""
    betas = np.asarray(betas, dtype=float)
    out = np.empty(betas.shape, dtype=complex)
    tiny = np.abs(betas) < 1e-6
    if tiny.any():
        z = -2j * np.pi * upper * betas[tiny]
        total = np.ones(z.shape, dtype=complex)
        term = np.ones(z.shape, dtype=complex)
        for m in range(1, 9):
            term = term * z / (m + 1)
            total += term
        out[tiny] = upper * total
    rest = betas[~tiny]
    out[~tiny] = (1.0 - np.exp(-2j * np.pi * upper * rest)) / (2j * np.pi * rest)
    return out


def _log_batch_small(betas: np.ndarray) -> np.ndarray:
    delta = LOG_SPLIT
    panels = max(32, math.ceil(10.0 * max(1.0, 3.0 * _ASYM_BETA / TWO_PI)))
    nodes, weights = _panel_nodes(_log_panel_edges(_ASYM_BETA, 3.0, panels), 8)
    weighted = np.log(nodes) * weights
    phases = np.exp(-2j * np.pi * np.multiply.outer(betas, nodes))
    head = (delta * math.log(delta) - delta) - 2j * np.pi * betas * (
        delta**2 / 2.0 * math.log(delta) - delta**2 / 4.0
    )
    return phases @ weighted + head


def _log_batch_large(betas: np.ndarray) -> np.ndarray:
    # Same contour rotation for int_0^3 e(-beta u) log u du: the ray from
    # 0 integrates exactly (Frullani-type log moment), the ray from 3
    # leaves e^(-3 i lam) times an asymptotic remainder.
    lam = TWO_PI * betas
    lead = 1j * (EULER_GAMMA + np.log(lam)) / lam - np.pi / (2.0 * lam)
    inv = 1.0 / (3.0 * lam)
    total = np.full(betas.shape, math.log(3.0), dtype=complex)
    factor = 1.0 + 0j
    power = inv.astype(complex)
    for m in range(1, _ASYM_TERMS):
        factor = factor * 1j if m == 1 else factor * 1j * (m - 1)
        total -= factor * power
        power = power * inv
    return lead + 1j * np.exp(-3j * lam) * total / lam


def log_phase_batch(betas: np.ndarray) -> np.ndarray:
    """Vectorized int_0^3 e(-beta u) log u du over beta >= 0."""
    betas = np.asarray(betas, dtype=float)
    out = np.empty(betas.shape, dtype=complex)
    small = betas <= _ASYM_BETA
    if small.any():
        out[small] = _log_batch_small(betas[small])
    if (~small).any():
        out[~small] = _log_batch_large(betas[~small])
    return out


# ---------------------------------------------------------------------------
# density, its integral, and the volume oracle
# ---------------------------------------------------------------------------


def j_density(beta: float, k: int, which: int) -> complex:
    """Density value at one frequency via the reference quadratures."""
    if which not in (1, 2):
        raise DomainError(f"which must be 1 or 2, got {which}")
    square = unit_power_phase_integral(beta, 2)
    power = unit_power_phase_integral(beta, k)
    last = log_weighted_integral(beta) if which == 2 else linear_phase_integral(beta)
    return square**3 * power * last


def j_density_batch(betas: np.ndarray, k: int, which: int) -> np.ndarray:
    """Density values on a beta >= 0 grid via the vectorized evaluators."""
    if which not in (1, 2):
        raise DomainError(f"which must be 1 or 2, got {which}")
    square = unit_phase_batch(betas, 2)
    power = unit_phase_batch(betas, k)
    last = log_phase_batch(betas) if which == 2 else linear_phase_batch(betas)
    return square**3 * power * last


@dataclass(frozen=True)
class SingularIntegralValue:
    """Truncated singular integral with error metadata."""

    k: int
    which: int
    B: float
    value: float
    quadrature_error: float
    tail_bound: float
    envelope_constant: float


def _beta_edges(B: float) -> np.ndarray:
    """Panel edges on [0, B] with width <= 1/(10 max(1, 3 beta / 2 pi)).

    Uniform width 1/10 until the width formula starts shrinking, then
    the closed-form schedule t_n = sqrt(t0^2 + 2 c n) whose steps stay
    just inside the allowed width c/t.
    """
    pivot = TWO_PI / 3.0
    if B <= pivot:
        n = math.ceil(B / 0.1)
        return np.linspace(0.0, B, n + 1)
    head = np.append(np.arange(0.0, pivot, 0.1), pivot)
    t0 = pivot
    c = TWO_PI / 30.0
    count = math.ceil((B * B - t0 * t0) / (2.0 * c))
    tail = np.sqrt(t0 * t0 + 2.0 * c * np.arange(1, count + 1))
    tail[-1] = B
    return np.concatenate([head, tail])


def j_value(k: int, which: int, B: float = 400.0) -> SingularIntegralValue:
    """2 Re int_0^B of the density, with error estimate and tail bound.

    The quadrature error is the difference against a half-resolution
    panel set; the tail bound integrates the fitted decay envelope
    (1+beta)^(-5/2-1/k), times log(2+beta) for the log-weighted case,
    from B to infinity on both sides.
    """
    if B < 1.0:
        raise DomainError(f"B must be >= 1, got {B}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    edges = _beta_edges(float(B))
    nodes, weights = _panel_nodes(edges, 4)
    values = j_density_batch(nodes, k, which)
    fine = 2.0 * float(np.sum(values * weights).real)

    coarse_edges = edges[::2]
    if coarse_edges[-1] != edges[-1]:
        coarse_edges = np.append(coarse_edges, edges[-1])
    c_nodes, c_weights = _panel_nodes(coarse_edges, 4)
    coarse = 2.0 * float(np.sum(j_density_batch(c_nodes, k, which) * c_weights).real)

    p = 1.5 + 1.0 / k
    envelope = np.abs(values) * (1.0 + nodes) ** (p + 1.0)
    if which == 2:
        envelope = envelope / np.log(2.0 + nodes)
    c_env = float(envelope.max())
    tail = 2.0 * c_env * (1.0 + B) ** (-p) / p
    if which == 2:
        tail *= math.log(2.0 + B) + 1.0 / p
    return SingularIntegralValue(
        k=k,
        which=which,
        B=float(B),
        value=fine,
        quadrature_error=abs(fine - coarse),
        tail_bound=tail,
        envelope_constant=c_env,
    )


_S3_CACHE: dict[int, np.ndarray] = {}


def _sorted_square_sums(grid: int) -> np.ndarray:
    if grid not in _S3_CACHE:
        centers = (np.arange(grid) + 0.5) / grid
        sq = centers * centers
        s3 = (sq[:, None, None] + sq[None, :, None] + sq[None, None, :]).ravel()
        s3.sort()
        # keep at most the two most recent grids to bound memory
        while len(_S3_CACHE) >= 2:
            _S3_CACHE.pop(next(iter(_S3_CACHE)))
        _S3_CACHE[grid] = s3
    return _S3_CACHE[grid]


def volume_midpoint(k: int, which: int, grid: int) -> float:
    """Midpoint-rule integral over the unit 4-cube at one resolution.

    which=1: volume of {u : u1^2+u2^2+u3^2+u4^k <= 3}; which=2: the
    integral of log(u1^2+u2^2+u3^2+u4^k) over the same region.
    """
    if grid < 64:
        raise DomainError(f"grid must be >= 64 per axis, got {grid}")
    if which not in (1, 2):
        raise DomainError(f"which must be 1 or 2, got {which}")
    s3 = _sorted_square_sums(grid)
    powers = ((np.arange(grid) + 0.5) / grid) ** k
    if which == 1:
        total = sum(
            int(np.searchsorted(s3, 3.0 - p, side="right")) for p in powers
        )
        return total / grid**4
    total = 0.0
    for p in powers:
        m = int(np.searchsorted(s3, 3.0 - p, side="right"))
        total += float(np.log(s3[:m] + p).sum())
    return total / grid**4


def j_volume_oracle(k: int, which: int, grid: int = 128) -> float:
    """Richardson extrapolation of the midpoint volume across (g, 2g)."""
    coarse = volume_midpoint(k, which, grid)
    fine = volume_midpoint(k, which, 2 * grid)
    return 2.0 * fine - coarse
