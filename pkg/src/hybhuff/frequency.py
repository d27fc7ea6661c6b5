"""Symbol statistics and the analytic cost model for the Huffman/bitwise split.

Symbols are ranked by descending count (ties: ascending symbol ID). A
*domain size* ``m`` sends the ``m`` top-ranked symbols to the Huffman coder
and the rest to fixed-width packing. The estimated total cost is

    H[m] + bitwidth(m) * (N - P[m]) + alpha * m

with prefix sums ``P[m] = sum f_i`` and ``H[m] = sum f_i log2(N / f_i)`` over
the first ``m`` ranks, and ``bitwidth(m)`` derived from the largest symbol
value left in the tail.
"""

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .bitio import bitwidth_for
from .exceptions import DomainError, FitError, ModelError

DEFAULT_ALPHA = 32.0
ALPHA_ENV_VAR = "HYBHUFF_ALPHA"
_RATIO_EPS = 1e-9


def default_alpha():
    """Tree overhead per Huffman symbol, overridable through ``HYBHUFF_ALPHA``."""
    raw = os.environ.get(ALPHA_ENV_VAR)
    if raw is None or not raw.strip():
        return DEFAULT_ALPHA
    try:
        return float(raw)
    except ValueError:
        raise DomainError(f"{ALPHA_ENV_VAR}={raw!r} is not a number") from None


def huffman_domain_size(rho, num_symbols):
    """``floor(rho * K)``, guarded against binary round-off such as ``0.29 * 100``."""
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"ratio must lie in [0, 1], got {rho}")
    return min(num_symbols, int(math.floor(rho * num_symbols + _RATIO_EPS)))


@dataclass(frozen=True, eq=False)
class FrequencyProfile:
    ranked_symbols: np.ndarray
    ranked_counts: np.ndarray
    total: int
    prefix_count: np.ndarray
    prefix_entropy_bits: np.ndarray
    tail_max: np.ndarray = field(repr=False)

    @property
    def num_symbols(self):
        return len(self.ranked_symbols)

    @property
    def counts(self):
        return dict(zip(self.ranked_symbols.tolist(), self.ranked_counts.tolist()))

    def tail_bitwidth(self, m):
        """Field width for the symbols ranked after ``m``; 0 when the tail is empty."""
        top = int(self.tail_max[m])
        return 0 if top < 0 else bitwidth_for(top)

    def tail_bitwidths(self):
        widths = np.zeros(len(self.tail_max), dtype=np.int64)
        live = self.tail_max >= 0
        widths[live] = np.maximum(1, _bit_lengths(self.tail_max[live]))
        return widths

    def entropy_bits(self):
        """``N * H(p)`` computed directly from the counts."""
        if self.total == 0:
            return 0.0
        p = self.ranked_counts / self.total
        return float(-self.total * np.sum(p * np.log2(p)))


def _bit_lengths(values):
    values = np.asarray(values, dtype=np.int64)
    out = np.zeros(len(values), dtype=np.int64)
    nz = values > 0
    # frexp gives exact exponents for integers below 2**53
    out[nz] = np.frexp(values[nz].astype(np.float64))[1]
    return out


def build_frequency_profile(adjacency):
    symbols = np.asarray(adjacency, dtype=np.int64)
    if len(symbols) and symbols.min() < 0:
        raise DomainError("symbols must be non-negative")
    values, counts = np.unique(symbols, return_counts=True)
    order = np.lexsort((values, -counts))
    values, counts = values[order], counts[order].astype(np.int64)
    total = int(counts.sum())
    prefix_count = np.zeros(len(counts) + 1, dtype=np.int64)
    np.cumsum(counts, out=prefix_count[1:])
    prefix_entropy = np.zeros(len(counts) + 1, dtype=np.float64)
    if total:
        np.cumsum(counts * np.log2(total / counts), out=prefix_entropy[1:])
    tail_max = np.full(len(values) + 1, -1, dtype=np.int64)
    if len(values):
        tail_max[:-1] = np.maximum.accumulate(values[::-1])[::-1]
    for arr in (values, counts, prefix_count, prefix_entropy, tail_max):
        arr.setflags(write=False)
    return FrequencyProfile(values, counts, total, prefix_count, prefix_entropy, tail_max)


def estimate_cost(profile, m, alpha=DEFAULT_ALPHA):
    """Estimated total bits (not per symbol) at Huffman domain size ``m``."""
    if not 0 <= m <= profile.num_symbols:
        raise DomainError(f"domain size {m} outside [0, {profile.num_symbols}]")
    tail = profile.total - int(profile.prefix_count[m])
    return (
        float(profile.prefix_entropy_bits[m])
        + profile.tail_bitwidth(m) * tail
        + alpha * m
    )


def estimate_cost_curve(profile, alpha=DEFAULT_ALPHA):
    """``estimate_cost`` for every ``m`` in ``0..K``, vectorised."""
    m = np.arange(profile.num_symbols + 1)
    tail = profile.total - profile.prefix_count
    return profile.prefix_entropy_bits + profile.tail_bitwidths() * tail + alpha * m


@dataclass(frozen=True, eq=False)
class CostProfile:
    samples: np.ndarray
    estimated_bits: np.ndarray
    alpha: float
    minimizer_m: int
    minimizer_rho: float


def cost_profile(profile, alpha=DEFAULT_ALPHA):
    bits = estimate_cost_curve(profile, alpha)
    best = int(np.argmin(bits))
    k = profile.num_symbols
    return CostProfile(
        samples=np.arange(k + 1),
        estimated_bits=bits,
        alpha=alpha,
        minimizer_m=best,
        minimizer_rho=best / k if k else 0.0,
    )


def generalized_harmonic(k, z):
    return float(np.sum(np.arange(1, k + 1, dtype=np.float64) ** (-float(z))))


def asymptotic_cost_zipf(rho, num_symbols, z, alpha_prime, bitwidth):
    """Closed-form expected bits per symbol for an ideal Zipf profile.

    Huffman part ``(z / H_K(z)) * sum_{i<=m} log2(i) / i**z``, tail part
    ``bitwidth * sum_{i>m} p_i`` and tree part ``alpha_prime * rho``, with
    ``m = floor(rho * K)``.
    """
    if z <= 1:
        raise ModelError(f"Zipf model needs z > 1, got {z}")
    if num_symbols < 1:
        raise ModelError("Zipf model needs at least one symbol")
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"ratio must lie in [0, 1], got {rho}")
    k = int(num_symbols)
    m = huffman_domain_size(rho, k)
    ranks = np.arange(1, k + 1, dtype=np.float64)
    weights = ranks ** (-float(z))
    harmonic = weights.sum()
    huffman = z / harmonic * float(np.sum(np.log2(ranks[:m]) * weights[:m]))
    tail_mass = float(weights[m:].sum()) / harmonic
    return huffman + bitwidth * tail_mass + alpha_prime * rho


@dataclass(frozen=True)
class SizeCurveFit:
    """Coefficients of ``y = a + b*x + c*x**2 + d*ln(x)``."""

    a: float
    b: float
    c: float
    d: float
    residual_norm: float

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.a + self.b * x + self.c * x**2 + self.d * np.log(x)

    @property
    def coefficients(self):
        return (self.a, self.b, self.c, self.d)


def fit_size_curve(points):
    """Ordinary least squares fit of compressed size against ratio in percent."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise FitError("points must be (x, y) pairs")
    if len(pts) < 4:
        raise FitError(f"need at least 4 points, got {len(pts)}")
    x, y = pts[:, 0], pts[:, 1]
    if np.any(x <= 0):
        raise FitError("all x must be positive for the log term")
    design = np.column_stack([np.ones_like(x), x, x**2, np.log(x)])
    if np.linalg.matrix_rank(design) < 4:
        raise FitError("design matrix is singular")
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.linalg.norm(design @ coef - y))
    return SizeCurveFit(*(float(c) for c in coef), residual_norm=residual)
