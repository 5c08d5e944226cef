"""Ranks, bottom-k sets and the mergeable bottom-k sketch.

Hashed points are ordered lexicographically by (value, element), which keeps
every rank well defined when two elements collide on the same hash value.
"""

from __future__ import annotations

import bisect
import heapq
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .errors import ConfigurationError, PreconditionError
from .hash_family import PolyHashFunction


class HashedPoint(NamedTuple):
    value: int
    element: int


@dataclass(frozen=True)
class DkmwParams:
    """Parameter bundle for one d-k-min-wise question.

    ``t = k - d + 1`` is the rank in X that Y must beat, ``m = n - d = |X|``.
    ``k == n`` is accepted as the degenerate case in which the event is certain.
    """

    u: int
    n: int
    d: int
    k: int
    epsilon: float
    c: float = 1.0
    l: int = 8

    def __post_init__(self):
        if not 2 <= self.d <= self.k <= self.n <= self.u:
            raise PreconditionError(
                f"need 2 <= d <= k <= n <= u, got d={self.d} k={self.k} n={self.n} u={self.u}"
            )
        if not 0 < self.epsilon < 1:
            raise PreconditionError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.l < 1:
            raise PreconditionError("l must be >= 1")

    @property
    def t(self) -> int:
        return self.k - self.d + 1

    @property
    def m(self) -> int:
        return self.n - self.d


def hash_points(h: PolyHashFunction, elements: Iterable[int]) -> list[HashedPoint]:
    return [HashedPoint(h(x), x) for x in elements]


def rank_k(points: Iterable[HashedPoint], k: int) -> HashedPoint:
    """The k-th smallest point (k = 1 is the minimum)."""
    points = list(points)
    if not 1 <= k <= len(points):
        raise PreconditionError(f"rank {k} out of range for {len(points)} points")
    return heapq.nsmallest(k, points)[-1]


def min_k(points: Iterable[HashedPoint], k: int) -> list[HashedPoint]:
    """The k smallest points in ascending order (all of them if fewer)."""
    return heapq.nsmallest(k, points)


def dkm_event(x_points, y_points, d: int, k: int) -> bool:
    """True iff the largest point of Y precedes RANK_{k-d+1} of X."""
    x_points = list(x_points)
    y_points = list(y_points)
    if len(y_points) != d:
        raise PreconditionError(f"|Y| = {len(y_points)} but d = {d}")
    if d > k:
        raise PreconditionError(f"d = {d} exceeds k = {k}")
    t = k - d + 1
    if len(x_points) < t:
        raise PreconditionError(f"|X| = {len(x_points)} is below k - d + 1 = {t}")
    if {p.element for p in x_points} & {p.element for p in y_points}:
        raise PreconditionError("X and Y must be element-disjoint")
    return max(y_points) < rank_k(x_points, t)


@dataclass
class BottomKSketch:
    """The k smallest hashed points seen under one hash function.

    ``source_count`` counts admissions (inserts that changed the sketch); it is
    an order-dependent diagnostic and is excluded from equality.  When
    ``multiplicities`` is a dict the sketch also counts how often each retained
    element occurred in the stream.
    """

    k: int
    function_id: int | None
    entries: list[HashedPoint] = field(default_factory=list)
    source_count: int = field(default=0, compare=False)
    multiplicities: dict[int, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.k < 1:
            raise PreconditionError("sketch capacity k must be >= 1")
        self.entries = sorted(HashedPoint(int(v), int(x)) for v, x in self.entries)
        if len(self.entries) > self.k:
            raise PreconditionError(f"{len(self.entries)} entries exceed capacity {self.k}")
        self._members = {pt.element for pt in self.entries}

    @property
    def tracks_multiplicity(self) -> bool:
        return self.multiplicities is not None

    @property
    def full(self) -> bool:
        return len(self.entries) == self.k

    def elements(self) -> set[int]:
        return set(self._members)

    def _check_function(self, h: PolyHashFunction):
        if h.seed != self.function_id:
            raise ConfigurationError(
                f"hash function seed {h.seed} does not match sketch function_id {self.function_id}"
            )

    def insert(self, element: int, h: PolyHashFunction) -> BottomKSketch:
        self._check_function(h)
        element = int(element)
        if element in self._members:
            if self.multiplicities is not None:
                self.multiplicities[element] += 1
            return self
        self._admit(HashedPoint(h(element), element))
        return self

    def _admit(self, point: HashedPoint, occurrences: int = 1):
        if len(self.entries) == self.k:
            if point > self.entries[-1]:
                return
            evicted = self.entries.pop()
            self._members.discard(evicted.element)
            if self.multiplicities is not None:
                del self.multiplicities[evicted.element]
        bisect.insort(self.entries, point)
        self._members.add(point.element)
        if self.multiplicities is not None:
            self.multiplicities[point.element] = occurrences
        self.source_count += 1

    def update(self, elements, h: PolyHashFunction) -> BottomKSketch:
        """Insert a batch of elements; equivalent to repeated :meth:`insert`."""
        self._check_function(h)
        xs = np.asarray(elements, dtype=np.uint64)
        if xs.size == 0:
            return self
        xs, counts = np.unique(xs, return_counts=True)
        values = h.evaluate_many(xs)
        order = np.lexsort((xs, values))[: self.k]
        for i in order.tolist():
            x, c = int(xs[i]), int(counts[i])
            if x in self._members:
                if self.multiplicities is not None:
                    self.multiplicities[x] += c
            else:
                self._admit(HashedPoint(int(values[i]), x), c)
        # Anything outside the batch's own bottom-k is beaten by k batch
        # points, so it cannot survive in the sketch.
        return self

    def merge(self, other: BottomKSketch) -> BottomKSketch:
        return merge(self, other)

    def copy(self) -> BottomKSketch:
        return BottomKSketch(
            self.k,
            self.function_id,
            list(self.entries),
            self.source_count,
            None if self.multiplicities is None else dict(self.multiplicities),
        )


def insert(sketch: BottomKSketch, element: int, h: PolyHashFunction) -> BottomKSketch:
    return sketch.insert(element, h)


def merge(a: BottomKSketch, b: BottomKSketch) -> BottomKSketch:
    """Sketch of the union of the two source sets."""
    if a.k != b.k:
        raise ConfigurationError(f"capacity mismatch: {a.k} != {b.k}")
    if a.function_id != b.function_id:
        raise ConfigurationError(f"function mismatch: {a.function_id} != {b.function_id}")
    entries = heapq.nsmallest(a.k, set(a.entries) | set(b.entries))
    mult = None
    if a.multiplicities is not None and b.multiplicities is not None:
        mult = {}
        for pt in entries:
            mult[pt.element] = a.multiplicities.get(pt.element, 0) + b.multiplicities.get(pt.element, 0)
    return BottomKSketch(a.k, a.function_id, entries, a.source_count + b.source_count, mult)
