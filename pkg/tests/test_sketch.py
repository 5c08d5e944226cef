
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dkminwise.errors import ConfigurationError, PreconditionError
from dkminwise.hash_family import FieldParams, sample_function
from dkminwise.sketch import (
    BottomKSketch,
    DkmwParams,
    HashedPoint,
    dkm_event,
    hash_points,
    insert,
    merge,
    min_k,
    rank_k,
)

F = FieldParams()


def pts(values):
    return [HashedPoint(v, i) for i, v in enumerate(values)]


class TestParams:
    def test_derived(self):
        p = DkmwParams(u=1000, n=20, d=2, k=5, epsilon=0.3)
        assert (p.t, p.m) == (4, 18)

    @pytest.mark.parametrize("kw", [dict(d=1), dict(k=1), dict(n=4), dict(epsilon=1.0), dict(u=10)])
    def test_invalid(self, kw):
        base = dict(u=1000, n=20, d=2, k=5, epsilon=0.3)
        base.update(kw)
        with pytest.raises(PreconditionError):
            DkmwParams(**base)


class TestRanks:
    def test_rank_examples(self):
        assert rank_k(pts([7, 2, 9]), 1).value == 2
        assert rank_k(pts([7, 2, 9]), 3).value == 9

    def test_tie_broken_by_element(self):
        assert rank_k([HashedPoint(5, 1), HashedPoint(5, 0)], 2) == HashedPoint(5, 1)

    def test_rank_out_of_range(self):
        with pytest.raises(PreconditionError):
            rank_k(pts([1, 2]), 3)

    def test_min_k_examples(self):
        assert [p.value for p in min_k(pts([4, 1, 3, 2]), 2)] == [1, 2]
        assert [p.value for p in min_k(pts([4, 1]), 5)] == [1, 4]

    def test_min_k_matches_sort(self, rng):
        for _ in range(1000):
            points = pts([rng.randrange(50) for _ in range(rng.randrange(0, 30))])
            k = rng.randrange(1, 35)
            assert min_k(points, k) == sorted(points)[:k]

    @given(st.lists(st.integers(0, 20), min_size=1, max_size=30), st.data())
    def test_rank_is_max_of_min_k(self, values, data):
        points = pts(values)
        k = data.draw(st.integers(1, len(points)))
        r = rank_k(points, k)
        assert r in min_k(points, k)
        assert r == max(min_k(points, k))


class TestEvent:
    def test_y_all_smaller(self):
        X = [HashedPoint(v, 10 + i) for i, v in enumerate([50, 60, 70])]
        Y = [HashedPoint(1, 0), HashedPoint(2, 1)]
        assert dkm_event(X, Y, d=2, k=2)

    def test_y_above_all_x(self):
        X = [HashedPoint(v, 10 + i) for i, v in enumerate([50, 60, 70])]
        Y = [HashedPoint(1, 0), HashedPoint(99, 1)]
        assert not dkm_event(X, Y, d=2, k=3)

    def test_preconditions(self):
        X = [HashedPoint(5, 10)]
        with pytest.raises(PreconditionError):
            dkm_event(X, [HashedPoint(1, 0)], d=2, k=2)
        with pytest.raises(PreconditionError):
            dkm_event(X, [HashedPoint(1, 0), HashedPoint(2, 1)], d=2, k=4)
        with pytest.raises(PreconditionError):
            dkm_event([HashedPoint(5, 0)], [HashedPoint(1, 0), HashedPoint(2, 1)], d=2, k=2)

    def test_matches_membership_oracle(self, rng):
        for _ in range(10_000):
            d = rng.randrange(2, 4)
            k = rng.randrange(d, 8)
            m = rng.randrange(k - d + 1, 12)
            elements = rng.sample(range(100), m + d)
            values = {x: rng.randrange(20) for x in elements}  # collisions on purpose
            X = [HashedPoint(values[x], x) for x in elements[d:]]
            Y = [HashedPoint(values[x], x) for x in elements[:d]]
            oracle = {p.element for p in Y} <= {p.element for p in min_k(X + Y, k)}
            assert dkm_event(X, Y, d, k) == oracle


def _sketch_of(elements, k, h):
    return BottomKSketch(k, h.seed, min_k(hash_points(h, elements), k))


class TestBottomK:
    def test_insert_into_empty(self):
        h = sample_function(F, 8, 1)
        s = insert(BottomKSketch(4, h.seed), 17, h)
        assert s.entries == [HashedPoint(h(17), 17)]

    def test_duplicate_is_idempotent(self):
        h = sample_function(F, 8, 1)
        s = BottomKSketch(4, h.seed)
        s.insert(17, h)
        before = s.copy()
        s.insert(17, h)
        assert s == before
        assert s.source_count == 1

    def test_function_mismatch(self):
        h = sample_function(F, 8, 1)
        with pytest.raises(ConfigurationError):
            BottomKSketch(4, 2).insert(3, h)

    def test_streaming_equals_batch(self, rng):
        h = sample_function(F, 8, 5)
        elements = [rng.randrange(10**9) for _ in range(1000)]
        s = BottomKSketch(64, h.seed)
        for x in elements:
            s.insert(x, h)
        assert s == _sketch_of(set(elements), 64, h)
        assert s.entries == min_k(hash_points(h, set(elements)), 64)

    def test_update_equals_inserts(self, rng):
        h = sample_function(F, 8, 6)
        elements = [rng.randrange(5000) for _ in range(3000)]
        a = BottomKSketch(50, h.seed, multiplicities={})
        for x in elements:
            a.insert(x, h)
        b = BottomKSketch(50, h.seed, multiplicities={})
        b.update(elements[:1000], h).update(elements[1000:], h)
        assert a == b
        assert a.multiplicities == b.multiplicities
        counts = {x: elements.count(x) for x in a.elements()}
        assert a.multiplicities == counts

    def test_merge_identity_and_idempotence(self, rng):
        h = sample_function(F, 8, 7)
        s = _sketch_of(rng.sample(range(10**6), 100), 16, h)
        assert merge(s, BottomKSketch(16, h.seed)) == s
        assert merge(s, s) == s

    def test_merge_equals_union(self, rng):
        h = sample_function(F, 8, 8)
        for _ in range(1000):
            A = set(rng.sample(range(500), rng.randrange(0, 40)))
            B = set(rng.sample(range(500), rng.randrange(0, 40)))
            k = rng.randrange(1, 20)
            assert merge(_sketch_of(A, k, h), _sketch_of(B, k, h)) == _sketch_of(A | B, k, h)

    def test_merge_mismatch(self):
        with pytest.raises(ConfigurationError):
            merge(BottomKSketch(4, 1), BottomKSketch(5, 1))
        with pytest.raises(ConfigurationError):
            merge(BottomKSketch(4, 1), BottomKSketch(4, 2))


sets = st.sets(st.integers(0, 2000), max_size=40)


@settings(max_examples=150, deadline=None)
@given(sets, sets, sets, st.integers(1, 12))
def test_semilattice_laws(A, B, C, k):
    h = sample_function(F, 8, 9)
    a, b, c = (_sketch_of(S, k, h) for S in (A, B, C))
    assert merge(a, b) == merge(b, a)
    assert merge(merge(a, b), c) == merge(a, merge(b, c))
    assert merge(a, a) == a


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 10**6), max_size=60), st.randoms(use_true_random=False), st.integers(1, 20))
def test_insertion_order_invariance(elements, rnd, k):
    h = sample_function(F, 8, 10)
    shuffled = list(elements)
    rnd.shuffle(shuffled)
    a, b = BottomKSketch(k, h.seed), BottomKSketch(k, h.seed)
    for x in elements:
        a.insert(x, h)
    for x in shuffled:
        b.insert(x, h)
    assert a == b
