"""Empirical certification of the d-k-min-wise guarantees.

Three ways of drawing hash functions are supported:

``exhaustive``           every member of the polynomial family once (exact);
``monte_carlo``          ``trials`` members, trial j seeded by stream(master, j);
``truly_random_oracle``  an independent uniform value per element per trial.

Every result is a deterministic function of the master seed and the trial
count.  Adversarial choice of (X, Y) is out of reach, so :func:`delta_scan`
only certifies the sets it samples.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels, seeding
from .analysis import BlockPartition, ExactProbability, block_bound, exact_probability, moment_bound
from .errors import DomainError, EnumerationCapError, PreconditionError
from .hash_family import DEFAULT_ENUMERATION_CAP, DEFAULT_FIELD, FieldParams, family_size
from .sketch import DkmwParams

Z_95 = 1.959963984540054


class Mode(str, enum.Enum):
    EXHAUSTIVE = "exhaustive"
    MONTE_CARLO = "monte_carlo"
    TRULY_RANDOM = "truly_random_oracle"


_KERNEL_MODE = {
    Mode.EXHAUSTIVE: _kernels.MODE_EXHAUSTIVE,
    Mode.MONTE_CARLO: _kernels.MODE_POLY,
    Mode.TRULY_RANDOM: _kernels.MODE_RANDOM,
}


@dataclass(frozen=True)
class TrialConfig:
    params: DkmwParams
    trials: int
    master_seed: int = 0
    field: FieldParams = DEFAULT_FIELD
    l: int | None = None
    mode: Mode = Mode.MONTE_CARLO
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.l is None:
            object.__setattr__(self, "l", self.params.l)
        if self.trials < 1 and self.mode is not Mode.EXHAUSTIVE:
            raise PreconditionError("trials must be >= 1")
        if self.field.u < self.params.u:
            raise PreconditionError(f"field universe {self.field.u} smaller than params.u {self.params.u}")
        if self.mode is Mode.EXHAUSTIVE:
            size = family_size(self.field, self.l)
            if size > self.enumeration_cap:
                raise EnumerationCapError(size, self.enumeration_cap)

    @property
    def effective_trials(self) -> int:
        """Number of functions actually drawn (the family size when exhaustive)."""
        if self.mode is Mode.EXHAUSTIVE:
            return family_size(self.field, self.l)
        return self.trials

    def _kernel_args(self):
        f = self.field
        master = self.master_seed & seeding.MASK64
        if self.mode is Mode.TRULY_RANDOM:
            master ^= seeding.TAG_TRUE_RANDOM
        return (
            _KERNEL_MODE[self.mode],
            np.uint64(master),
            0,
            self.effective_trials,
        ), (
            self.l,
            np.uint64(f.p),
            np.uint64(f.u),
            f.kind,
            _kernels.top_shift(f.p),
            _kernels.top_shift(f.u),
        )


def _as_elements(xs, u: int, name: str) -> np.ndarray:
    arr = np.array(sorted({int(x) for x in xs}), dtype=np.uint64)
    if len(arr) != len(list(xs)):
        raise PreconditionError(f"{name} contains duplicate elements")
    if arr.size and int(arr[-1]) >= u:
        raise DomainError(f"{name} element {int(arr[-1])} outside [0, {u})")
    return arr


def _check_sets(cfg: TrialConfig, xs, ys) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = list(xs), list(ys)
    params = cfg.params
    x_arr = _as_elements(xs, cfg.field.u, "X")
    y_arr = _as_elements(ys, cfg.field.u, "Y")
    if len(y_arr) != params.d:
        raise PreconditionError(f"|Y| = {len(y_arr)} but d = {params.d}")
    if len(x_arr) != params.m:
        raise PreconditionError(f"|X| = {len(x_arr)} but n - d = {params.m}")
    if np.intersect1d(x_arr, y_arr).size:
        raise PreconditionError("X and Y must be disjoint")
    return x_arr, y_arr


def binomial_ci_halfwidth(hits: int, trials: int) -> float:
    """95% normal half-width with a continuity term; exact one-sided width at 0 or 1."""
    if hits in (0, trials):
        return 1 - 0.025 ** (1 / trials)
    p = hits / trials
    return Z_95 * math.sqrt(p * (1 - p) / trials) + 0.5 / trials


@dataclass(frozen=True)
class DeltaEstimate:
    empirical_probability: float
    exact: ExactProbability
    relative_deviation: float
    ci_halfwidth: float
    hits: int
    trials: int
    exhaustive: bool = False

    @property
    def frequency(self) -> Fraction:
        return Fraction(self.hits, self.trials)

    @property
    def standard_error(self) -> float:
        if self.exhaustive:
            return 0.0
        p = self.empirical_probability
        return math.sqrt(p * (1 - p) / self.trials)

    @property
    def signed_deviation(self) -> float:
        return (self.empirical_probability - self.exact.real_value) / self.exact.real_value


def estimate_event_probability(cfg: TrialConfig, X: Sequence[int], Y: Sequence[int]) -> DeltaEstimate:
    """Frequency of "all of Y lands in the bottom k of X u Y" over the configured draws."""
    x_arr, y_arr = _check_sets(cfg, X, Y)
    params = cfg.params
    head, tail = cfg._kernel_args()
    hits = int(_kernels.event_hits(*head, x_arr, y_arr, params.t, *tail))
    trials = cfg.effective_trials
    exact = exact_probability(params.n, params.k, params.d)
    empirical = hits / trials
    exhaustive = cfg.mode is Mode.EXHAUSTIVE
    return DeltaEstimate(
        empirical_probability=empirical,
        exact=exact,
        relative_deviation=abs(empirical - exact.real_value) / exact.real_value,
        ci_halfwidth=0.0 if exhaustive else binomial_ci_halfwidth(hits, trials),
        hits=hits,
        trials=trials,
        exhaustive=exhaustive,
    )


@dataclass(frozen=True)
class TailHistogram:
    counts: dict[int, int]
    trials: int
    bound_violations: list[tuple[int, float, float]]
    partition: BlockPartition
    d: int
    exhaustive: bool = False

    def frequency(self, i: int) -> float:
        return self.counts.get(i, 0) / self.trials

    def standard_error(self, i: int) -> float:
        if self.exhaustive:
            return 0.0
        p = self.frequency(i)
        return math.sqrt(p * (1 - p) / self.trials)

    def allowance(self, i: int) -> float:
        """Bound plus three standard errors, the pass threshold for block i."""
        return block_bound(i, self.d) + 3 * self.standard_error(i)


def rank_values(cfg: TrialConfig, X: Sequence[int], rank: int | None = None) -> np.ndarray:
    """Per draw, the ``rank``-th smallest hash value of X (default t = k - d + 1)."""
    x_arr = _as_elements(list(X), cfg.field.u, "X")
    rank = cfg.params.t if rank is None else rank
    if not 1 <= rank <= len(x_arr):
        raise PreconditionError(f"rank {rank} out of range for |X| = {len(x_arr)}")
    head, tail = cfg._kernel_args()
    return _kernels.rank_values(*head, x_arr, rank, *tail)


def tail_histogram(cfg: TrialConfig, X: Sequence[int]) -> TailHistogram:
    """Histogram of the block containing RANK_t(h(X)), checked against 1/|i|^(d+1)."""
    params = cfg.params
    X = list(X)
    if len(X) != params.m or params.m < params.t:
        raise PreconditionError(f"need |X| = n - d = {params.m} >= t = {params.t}, got |X| = {len(X)}")
    partition = BlockPartition.from_params(params)
    values = rank_values(cfg, X)
    counts = dict(sorted(Counter(partition.index(v) for v in values.tolist()).items()))
    hist = TailHistogram(counts, len(values), [], partition, params.d, cfg.mode is Mode.EXHAUSTIVE)
    for i in counts:
        if hist.frequency(i) > hist.allowance(i):
            hist.bound_violations.append((i, hist.frequency(i), block_bound(i, params.d)))
    return hist


@dataclass(frozen=True)
class MomentCheck:
    empirical: float
    bound: float
    expected: float
    order: int
    threshold: int
    standard_error: float
    per_element_probability: float

    def __iter__(self):
        return iter((self.empirical, self.bound))

    @property
    def margin(self) -> float:
        return self.bound / self.empirical if self.empirical > 0 else math.inf


def below_counts(cfg: TrialConfig, X: Sequence[int], threshold: int) -> np.ndarray:
    x_arr = _as_elements(list(X), cfg.field.u, "X")
    head, tail = cfg._kernel_args()
    return _kernels.count_below(*head, x_arr, np.uint64(threshold), *tail)


def moment_check(cfg: TrialConfig, block_index: int, X: Sequence[int], order: int | None = None) -> MomentCheck:
    """Empirical E|Z - E_i|^order against the polynomial-family moment bound.

    Z counts the elements of X hashing below (1 + eps i) t u / m, the upper
    edge of block i, whose expectation is E_i = t (1 + eps i).
    """
    params = cfg.params
    order = cfg.l if order is None else order
    partition = BlockPartition.from_params(params)
    edge = partition.edge(block_index)
    if not 0 < edge <= params.u:
        raise PreconditionError(f"block {block_index} boundary {edge} outside (0, u]")
    expected = params.t * (1 + params.epsilon * block_index)
    bound = moment_bound(order, expected)
    threshold = math.ceil(edge)
    z = below_counts(cfg, X, threshold).astype(np.float64)
    dev = np.abs(z - expected) ** order
    n = len(dev)
    se = 0.0 if cfg.mode is Mode.EXHAUSTIVE or n < 2 else float(np.std(dev, ddof=1) / math.sqrt(n))
    return MomentCheck(
        empirical=float(np.mean(dev)),
        bound=bound,
        expected=expected,
        order=order,
        threshold=threshold,
        standard_error=se,
        per_element_probability=threshold / cfg.field.u,
    )


def draw_disjoint_sets(seed: int, m: int, d: int, u: int, layout: str = "uniform") -> tuple[list[int], list[int]]:
    """Replayable disjoint (X, Y) with |X| = m, |Y| = d inside [0, u).

    ``uniform`` draws m + d distinct elements uniformly; ``clustered`` takes a
    contiguous run of m + d elements at a random offset and places Y at random
    positions inside it.
    """
    size = m + d
    if size > u:
        raise PreconditionError(f"cannot draw {size} distinct elements from [0, {u})")
    seed &= seeding.MASK64
    if layout == "uniform":
        chosen: dict[int, None] = {}
        counter = 0
        while len(chosen) < size:
            chosen.setdefault(seeding.bounded(seeding.stream(seed, counter), u))
            counter += 1
        elements = list(chosen)
        return elements[d:], elements[:d]
    if layout == "clustered":
        start = seeding.bounded(seeding.stream(seed, 0), u - size + 1)
        run = list(range(start, start + size))
        positions: dict[int, None] = {}
        counter = 1
        while len(positions) < d:
            positions.setdefault(seeding.bounded(seeding.stream(seed, counter), size))
            counter += 1
        ys = [run[i] for i in positions]
        xs = [x for i, x in enumerate(run) if i not in positions]
        return xs, ys
    raise PreconditionError(f"unknown layout {layout!r}")


@dataclass(frozen=True)
class DeltaScan:
    worst: DeltaEstimate
    worst_seed: int
    pair_seeds: list[int]
    estimates: list[DeltaEstimate] = field(repr=False)
    layout: str = "uniform"

    @property
    def worst_deviation(self) -> float:
        return self.worst.relative_deviation


def pair_seed(master_seed: int, j: int) -> int:
    return seeding.stream((master_seed & seeding.MASK64) ^ seeding.TAG_SET_DRAW, j)


def delta_scan(cfg: TrialConfig, set_count: int, layout: str = "uniform") -> DeltaScan:
    """Worst relative deviation over ``set_count`` random disjoint (X, Y) pairs.

    Pair j is drawn from ``pair_seed(master, j)`` and its functions from the
    same seed, so any pair can be replayed with :func:`replay_pair`.
    """
    if set_count < 1:
        raise PreconditionError("set_count must be >= 1")
    seeds = [pair_seed(cfg.master_seed, j) for j in range(set_count)]
    estimates = [replay_pair(cfg, s, layout) for s in seeds]
    worst = max(range(set_count), key=lambda j: estimates[j].relative_deviation)
    return DeltaScan(estimates[worst], seeds[worst], seeds, estimates, layout)


def replay_pair(cfg: TrialConfig, seed: int, layout: str = "uniform") -> DeltaEstimate:
    params = cfg.params
    X, Y = draw_disjoint_sets(seed, params.m, params.d, params.u, layout)
    return estimate_event_probability(replace(cfg, master_seed=seed), X, Y)
