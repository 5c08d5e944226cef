"""Closed-form quantities: event probability, parameter thresholds, blocks, bounds.

Real-valued formulas are evaluated in float64.  The event probability is the
only rational quantity and is kept exact with :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import PreconditionError
from .sketch import DkmwParams

DEFAULT_TRUNCATION = 10**6


@dataclass(frozen=True)
class ExactProbability:
    numerator: int
    denominator: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def real_value(self) -> float:
        return self.numerator / self.denominator

    def __float__(self):
        return self.real_value


def exact_probability(n: int, k: int, d: int) -> ExactProbability:
    """C(k, d) / C(n, d) via the product k/n * (k-1)/(n-1) * ... * (k-d+1)/(n-d+1)."""
    if not 1 <= d <= k <= n:
        raise PreconditionError(f"need 1 <= d <= k <= n, got d={d} k={k} n={n}")
    prob = Fraction(1)
    for j in range(d):
        prob *= Fraction(k - j, n - j)
    return ExactProbability(prob.numerator, prob.denominator)


def required_independence(d: int) -> tuple[int, int]:
    """(l for the tail bounds, l for the full guarantee) = (2d+2, 3d+2)."""
    if d < 2:
        raise PreconditionError(f"d must be >= 2, got {d}")
    return 2 * d + 2, 3 * d + 2


def d_in_regime(d: int, k: int, c_prime: float) -> bool:
    """Whether d <= k / c_prime, the regime of the general-d guarantee.

    ``c_prime`` has no known value; callers choose it.  Nothing here claims
    the guarantee holds for any particular choice when d > 2.
    """
    if c_prime <= 0:
        raise PreconditionError(f"c_prime must be > 0, got {c_prime}")
    return d * c_prime <= k


def k_threshold(d: int, epsilon: float, c: float, l: int) -> float:
    """d - 1 + 2 * 8^(2/l) * (6l)^(1+1/l) / (epsilon/c)^2."""
    eps = epsilon / c
    return d - 1 + 2 * 8 ** (2 / l) * (6 * l) ** (1 + 1 / l) / eps**2


def required_k(d: int, epsilon: float, c: float, l: int) -> int:
    """Smallest integer k strictly above :func:`k_threshold`."""
    if not 0 < epsilon < 1:
        raise PreconditionError(f"epsilon must lie in (0, 1), got {epsilon}")
    if c < 1:
        raise PreconditionError(f"c must be >= 1, got {c}")
    if l % 2:
        raise PreconditionError(f"l must be even, got {l}")
    if l < 2 * d + 2:
        raise PreconditionError(f"l={l} is below 2d+2={2 * d + 2}")
    threshold = math.nextafter(k_threshold(d, epsilon, c, l), math.inf)
    return math.floor(threshold) + 1


class Interval(NamedTuple):
    lo: float
    hi: float

    @property
    def empty(self) -> bool:
        return self.hi <= self.lo

    def __contains__(self, value) -> bool:
        return self.lo <= value < self.hi


@dataclass(frozen=True)
class BlockPartition:
    """Blocks b_i = [(1+eps(i-1)) C, (1+eps i) C) with C = t u / m, clipped to [0, u)."""

    epsilon: float
    t: int
    m: int
    u: int

    @classmethod
    def from_params(cls, params: DkmwParams) -> BlockPartition:
        return cls(params.epsilon, params.t, params.m, params.u)

    @property
    def center(self) -> float:
        return self.t * self.u / self.m

    def edge(self, j: int) -> float:
        """Upper boundary of block j (= lower boundary of block j+1), unclipped."""
        return (1 + self.epsilon * j) * self.center

    def boundaries(self, i: int) -> Interval:
        lo = min(max(self.edge(i - 1), 0.0), self.u)
        hi = min(max(self.edge(i), 0.0), self.u)
        return Interval(lo, max(lo, hi))

    def index(self, value) -> int:
        if isinstance(value, np.integer):
            value = int(value)
        if not 0 <= value < self.u:
            raise PreconditionError(f"value {value} outside [0, {self.u})")
        i = math.floor((value / self.center - 1) / self.epsilon) + 1
        # The float estimate may be off by one at a boundary; the edges decide.
        while value < self.edge(i - 1):
            i -= 1
        while value >= self.edge(i):
            i += 1
        return i

    def index_range(self) -> tuple[int, int]:
        """Smallest and largest index of a non-empty clipped block."""
        return self.index(0), self.index(self.u - 1)


def block_boundaries(i: int, params: DkmwParams) -> Interval:
    return BlockPartition.from_params(params).boundaries(i)


def block_of(value, params: DkmwParams) -> int:
    return BlockPartition.from_params(params).index(value)


def moment_bound(l: int, expected: float) -> float:
    """8 (6l)^((l+1)/2) E^(l/2), the l-th central moment bound for a sum of indicators."""
    if l < 2 or l % 2:
        raise PreconditionError(f"l must be even and >= 2, got {l}")
    if expected <= 0:
        raise PreconditionError(f"expected value must be positive, got {expected}")
    return 8 * (6 * l) ** ((l + 1) / 2) * expected ** (l / 2)


def tail_bound_rhs(i: int, d: int) -> float:
    """1 / i^(d+1): bound on Pr[RANK_t in b_i] and Pr[RANK_t in b_-i] for i >= 1."""
    if i < 1:
        raise PreconditionError(f"block distance must be >= 1, got {i}")
    return 1.0 / i ** (d + 1)


def block_bound(i: int, d: int) -> float:
    """Tail bound for signed block index i; blocks 0 and 1 are only bounded by 1."""
    return 1.0 if i in (0, 1) else tail_bound_rhs(abs(i), d)


def _series(epsilon: float, truncation: int) -> tuple[float, float]:
    i = np.arange(1, truncation + 1, dtype=np.float64)
    w = 1.0 / i**3
    lower = float(np.sum(w * np.abs(epsilon * (2 * i - 1) - 2)))
    upper = float(np.sum((w * np.abs(epsilon * (2 * i - 1) + 2))[1:]))
    return lower, upper


def series_tail_bound(epsilon: float, truncation: int) -> float:
    """Bound on both sums' terms beyond ``truncation``: 4 (eps + 1) / N."""
    return 4 * (epsilon + 1) / truncation


def delta_series_constant(epsilon: float, truncation: int = DEFAULT_TRUNCATION, include_tail: bool = False) -> float:
    """Numeric value of the constant c in the d = 2 bound |Delta| <= c P eps.

    Sums, divided by P * eps with P = k(k-1)/(n(n-1)):

      2 * sum_{i>=1} |eps(2i-1) - 2| / i^3          (negative blocks)
      2 * sum_{i>=2} |eps(2i-1) + 2| / i^3          (positive blocks)
      (|r - 1| + |r (1+eps)^2 - 1|) / eps with r = 1 (central blocks, r the
      ratio ((k-1)/(n-2))^2 / P in its large-n limit)

    The factor 2 bounds ((k-1)/(n-2))^2 by 2P.  Partial sums are
    non-decreasing in ``truncation``; with ``include_tail`` the analytic tail
    bound is added, making the value an upper bound for every truncation.
    """
    if truncation < 10**3:
        raise PreconditionError(f"truncation must be >= 1000, got {truncation}")
    lower, upper = _series(epsilon, truncation)
    if include_tail:
        lower_tail = upper_tail = series_tail_bound(epsilon, truncation) / 2
        lower += lower_tail
        upper += upper_tail
    # r = 1: the b_0 term vanishes and the b_1 term is (1+eps)^2 - 1.
    central = ((1 + epsilon) ** 2 - 1) / epsilon
    return 2 * lower + 2 * upper + central


def default_c(epsilon: float, truncation: int = DEFAULT_TRUNCATION) -> int:
    """Series constant rounded up to an integer (tail bound included)."""
    return math.ceil(delta_series_constant(epsilon, truncation, include_tail=True))


def sample_budget(tau: float, base_error: float = 0.25) -> int:
    """Number of sketches r for the median trick, always odd.

    r = ceil(3 ln(1/tau) / (1/2 - base_error)^2), i.e. 48 ln(1/tau) for the
    Chebyshev level base_error = 1/4.  The constant is a conventional Chernoff
    choice, not a tight one.
    """
    if not 0 < tau < 1:
        raise PreconditionError(f"tau must lie in (0, 1), got {tau}")
    if not 0 <= base_error < 0.5:
        raise PreconditionError(f"base_error must lie in [0, 1/2), got {base_error}")
    r = max(1, math.ceil(3 * math.log(1 / tau) / (0.5 - base_error) ** 2))
    return r if r % 2 else r + 1


def telescoping_direct(probs, f, constant: float) -> float:
    """sum_i p_i (f(i) - K) over a finite window of signed indices.

    ``probs`` and ``f`` are dicts keyed by block index covering the same
    contiguous range, which must contain 0 and 1.
    """
    return sum(probs[i] * (f[i] - constant) for i in probs)


def telescoping_rearranged(probs, f, constant: float) -> float:
    """The same sum regrouped into prefix sums (i <= 0) and suffix sums (i >= 1)."""
    lo, hi = min(probs), max(probs)
    prefix = {}
    acc = 0.0
    for i in range(lo, 1):
        acc += probs[i]
        prefix[i] = acc
    suffix = {}
    acc = 0.0
    for i in range(hi, 0, -1):
        acc += probs[i]
        suffix[i] = acc
    total = prefix[0] * (f[0] - constant) + suffix[1] * (f[1] - constant)
    total += sum(prefix[i] * (f[i] - f[i + 1]) for i in range(lo, 0))
    total += sum(suffix[i] * (f[i] - f[i - 1]) for i in range(2, hi + 1))
    return total
