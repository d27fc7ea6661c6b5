"""Search for the Huffman domain size that minimises the estimated cost.

Both searches work on the integer domain size ``m``; the estimated cost is a
step function of the ratio, so only ``m`` matters.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError
from .frequency import DEFAULT_ALPHA, estimate_cost, estimate_cost_curve, huffman_domain_size

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
COARSE_EXPONENTS = (0, 1, 2, 3, 4)


@dataclass
class SearchReport:
    mode: str
    num_symbols: int
    evaluated_points: list
    best_m: int
    best_bits: float
    coarse_points: list = field(default_factory=list)
    refinement_interval: tuple = None

    @property
    def best_rho(self):
        return self.best_m / self.num_symbols if self.num_symbols else 0.0

    @property
    def num_evaluations(self):
        return len(self.evaluated_points)

    def to_csv_rows(self):
        k = self.num_symbols
        for m, bits in sorted(self.evaluated_points):
            yield m, (m / k if k else 0.0), bits


def evaluation_budget(num_symbols):
    """Upper bound on cost evaluations made by :func:`coarse_to_fine_search`."""
    if num_symbols <= 1:
        return 9
    return 5 + 2 * math.ceil(math.log(num_symbols) / math.log(1 / INV_PHI)) + 4


def exhaustive_scan(profile, alpha=DEFAULT_ALPHA):
    """Evaluate every ``m`` in ``0..K``; ties go to the smaller ``m``."""
    bits = estimate_cost_curve(profile, alpha)
    best = int(np.argmin(bits))
    points = list(zip(range(len(bits)), bits.tolist()))
    return SearchReport(
        mode="exhaustive",
        num_symbols=profile.num_symbols,
        evaluated_points=points,
        best_m=best,
        best_bits=float(bits[best]),
    )


class _CachedCost:
    def __init__(self, profile, alpha):
        self.profile = profile
        self.alpha = alpha
        self.seen = {}

    def __call__(self, m):
        if m not in self.seen:
            self.seen[m] = estimate_cost(self.profile, m, self.alpha)
        return self.seen[m]

    def best(self, candidates):
        return min(candidates, key=lambda m: (self(m), m))


def coarse_to_fine_search(profile, alpha=DEFAULT_ALPHA):
    """Log-spaced coarse grid, then golden-section refinement on the best segment.

    Coarse ratios are ``10**-j`` for ``j = 0..4`` plus zero. The refinement
    brackets the best coarse point by its grid neighbours, narrows with golden
    section until at most four integers remain, then sweeps those and a
    five-point window around the winner to absorb ceiling steps in the cost.
    """
    k = profile.num_symbols
    if k < 1:
        raise DomainError("coarse-to-fine search needs at least one symbol")
    cost = _CachedCost(profile, alpha)
    grid = sorted({0} | {huffman_domain_size(10.0**-j, k) for j in COARSE_EXPONENTS})
    for m in grid:
        cost(m)
    i = grid.index(cost.best(grid))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]

    a, b = lo, hi
    while b - a > 3:
        step = int(round((b - a) * INV_PHI))
        c, d = b - step, a + step
        if c >= d:
            c, d = (a + b) // 2, (a + b) // 2 + 1
        if cost(c) <= cost(d):
            b = d
        else:
            a = c
    best = cost.best(range(a, b + 1))
    best = cost.best(range(max(best - 2, 0), min(best + 2, k) + 1))
    return SearchReport(
        mode="coarse_to_fine",
        num_symbols=k,
        evaluated_points=sorted(cost.seen.items()),
        best_m=best,
        best_bits=cost(best),
        coarse_points=[(m, cost.seen[m]) for m in grid],
        refinement_interval=(lo, hi),
    )


def optimize(profile, alpha=DEFAULT_ALPHA, exhaustive=False):
    """Dispatch helper; falls back to the exhaustive scan when ``K == 0``."""
    if exhaustive or profile.num_symbols == 0:
        return exhaustive_scan(profile, alpha)
    return coarse_to_fine_search(profile, alpha)
