"""Named verification suites run by ``dkminwise verify``.

Each suite returns checks rendered as ``check=<name> value=<float>
bound=<float> status=<pass|fail>`` lines plus the raw data its figure needs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .analysis import exact_probability, required_k
from .hash_family import MERSENNE_61, FieldParams, independence_certificate
from .sketch import DkmwParams
from .verifier import (
    Mode,
    TrialConfig,
    below_counts,
    delta_scan,
    draw_disjoint_sets,
    estimate_event_probability,
    moment_check,
    pair_seed,
    tail_histogram,
)

SUITES = ("lemma1", "tails", "moments", "delta", "independence")


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    bound: float
    passed: bool

    def line(self) -> str:
        status = "pass" if self.passed else "fail"
        return f"check={self.name} value={self.value:.10g} bound={self.bound:.10g} status={status}"


@dataclass
class SuiteResult:
    name: str
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def report(self) -> str:
        return "\n".join(c.line() for c in self.checks)


def _le(name: str, value: float, bound: float) -> Check:
    return Check(name, value, bound, value <= bound)


def lemma1(seed: int, trials: int | None = None) -> SuiteResult:
    """Truly random draws against C(k,d)/C(n,d) for n=10, k=4, d=2."""
    trials = trials or 10**6
    params = DkmwParams(u=MERSENNE_61, n=10, d=2, k=4, epsilon=0.5)
    cfg = TrialConfig(params, trials, seed, mode=Mode.TRULY_RANDOM)
    est = estimate_event_probability(cfg, range(2, 10), [0, 1])
    exact = est.exact.real_value
    se = math.sqrt(exact * (1 - exact) / trials)
    res = SuiteResult("lemma1", data={"estimate": est})
    res.checks.append(_le("lemma1_abs_error", abs(est.empirical_probability - exact), 4 * se))
    return res


def tails(seed: int, trials: int | None = None) -> SuiteResult:
    """Block histogram of RANK_t for d=2, l=8, eps=0.9, k=required_k, n=10k."""
    trials = trials or 10**4
    k = required_k(2, 0.9, 1, 8)
    params = DkmwParams(u=MERSENNE_61, n=10 * k, d=2, k=k, epsilon=0.9, l=8)
    X, _ = draw_disjoint_sets(pair_seed(seed, 0), params.m, params.d, params.u)
    hist = tail_histogram(TrialConfig(params, trials, seed), X)
    res = SuiteResult("tails", data={"histogram": hist, "params": params})
    lo, hi = hist.partition.index_range()
    indices = sorted(set(hist.counts) | {i for i in range(-5, 6) if lo <= i <= hi})
    for i in indices:
        res.checks.append(_le(f"tail_block[{i}]", hist.frequency(i), hist.allowance(i)))
    return res


def moments(seed: int, trials: int | None = None) -> SuiteResult:
    """Fourth central moment for l=4, n=200, block 1, plus the l=2 variance identity."""
    trials = trials or 10**4
    params = DkmwParams(u=MERSENNE_61, n=200, d=2, k=50, epsilon=0.9, l=4)
    X, _ = draw_disjoint_sets(pair_seed(seed, 0), params.m, params.d, params.u)
    cfg = TrialConfig(params, trials, seed)
    mc = moment_check(cfg, 1, X)
    res = SuiteResult("moments", data={"moment": mc, "z": below_counts(cfg, X, mc.threshold), "params": params})
    res.checks.append(_le("moment_l4_block1", mc.empirical, mc.bound))
    var = moment_check(TrialConfig(params, trials, seed, l=2), 1, X)
    q = var.per_element_probability
    m = params.m
    # E|Z - E_i|^2 = Var Z + (E Z - E_i)^2 for a pairwise independent family.
    predicted = m * q * (1 - q) + (m * q - var.expected) ** 2
    res.checks.append(_le("variance_l2_block1", abs(var.empirical - predicted), 3 * var.standard_error))
    return res


def delta(seed: int, trials: int | None = None) -> SuiteResult:
    """Exhaustive versus Monte Carlo at p=13, and a relative-deviation scan at k=64."""
    trials = trials or 10**5
    res = SuiteResult("delta")
    small = DkmwParams(u=13, n=6, d=2, k=3, epsilon=0.5, l=4)
    f13 = FieldParams(13, 13)
    X, Y = [2, 3, 4, 5], [0, 1]
    exact = estimate_event_probability(TrialConfig(small, 1, field=f13, mode=Mode.EXHAUSTIVE), X, Y)
    mc = estimate_event_probability(TrialConfig(small, trials, seed, field=f13), X, Y)
    p = exact.empirical_probability
    se = math.sqrt(p * (1 - p) / trials)
    res.checks.append(_le("exhaustive_vs_monte_carlo", abs(mc.empirical_probability - p), 4 * se))

    params = DkmwParams(u=MERSENNE_61, n=16 * 64, d=2, k=64, epsilon=0.25, l=8)
    scan = delta_scan(TrialConfig(params, trials, seed), 5)
    ref = exact_probability(params.n, params.k, params.d).real_value
    rel_se = math.sqrt((1 - ref) / (trials * ref))
    res.checks.append(_le("worst_relative_deviation", scan.worst_deviation, params.epsilon + 4 * rel_se))
    res.data.update(exhaustive=exact, monte_carlo=mc, scan=scan, rel_se=rel_se, epsilon=params.epsilon)
    return res


def independence(seed: int, trials: int | None = None) -> SuiteResult:
    """Exact joint distributions of the p=5, l=3 family on every 2- and 3-point set."""
    f = FieldParams(5, 5)
    l = 3
    res = SuiteResult("independence")
    for j in (1, 2, 3):
        worst = 0
        for pts in itertools.combinations(range(5), j):
            table = independence_certificate(f, l, pts)
            worst = max(worst, max(abs(c - f.p ** (l - j)) for c in table.values()))
        res.checks.append(Check(f"certificate_j{j}_max_abs_error", worst, 0, worst == 0))
    res.data["table"] = independence_certificate(f, l, (0, 1))
    return res


RUNNERS = {"lemma1": lemma1, "tails": tails, "moments": moments, "delta": delta, "independence": independence}


def run_suite(name: str, seed: int, trials: int | None = None) -> SuiteResult:
    return RUNNERS[name](seed, trials)
