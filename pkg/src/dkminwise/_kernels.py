"""Compiled inner loops for hashing and Monte Carlo trials.

All integer arithmetic is carried out in uint64.  Every literal is wrapped in
``np.uint64`` because numba promotes mixed uint64/int64 arithmetic to float64.

Field multiplication comes in three flavours selected by ``kind``:

* ``KIND_SMALL``   p < 2**32, the product fits in 64 bits;
* ``KIND_M61``     p = 2**61 - 1, Mersenne reduction on 32-bit limbs;
* ``KIND_GENERIC`` any other p < 2**63, shift-and-add.

Trial modes mirror :class:`dkminwise.verifier.Mode`:

* ``MODE_POLY``        trial j uses the polynomial seeded by stream(master, j);
* ``MODE_RANDOM``      trial j draws a fresh uniform value per element;
* ``MODE_EXHAUSTIVE``  trial j is the j-th coefficient vector in
  lexicographic order (coefficient 0 most significant).
"""

import numpy as np
from numba import njit

KIND_SMALL = 0
KIND_M61 = 1
KIND_GENERIC = 2

MODE_POLY = 0
MODE_RANDOM = 1
MODE_EXHAUSTIVE = 2

M61 = (1 << 61) - 1

_U0 = np.uint64(0)
_U1 = np.uint64(1)
_U3 = np.uint64(3)
_U27 = np.uint64(27)
_U29 = np.uint64(29)
_U30 = np.uint64(30)
_U31 = np.uint64(31)
_U32 = np.uint64(32)
_U61 = np.uint64(61)
_MASK29 = np.uint64((1 << 29) - 1)
_MASK32 = np.uint64((1 << 32) - 1)
_M61 = np.uint64(M61)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)


def field_kind(p: int) -> int:
    if p == M61:
        return KIND_M61
    if p < (1 << 32):
        return KIND_SMALL
    if p < (1 << 63):
        return KIND_GENERIC
    raise ValueError(f"compiled kernels need p < 2**63, got {p}")


def top_shift(bound: int) -> int:
    """Right shift that keeps exactly bit_length(bound - 1) bits of a draw."""
    return 64 - (bound - 1).bit_length() if bound > 1 else 64


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> _U30)) * _MUL1
    z = (z ^ (z >> _U27)) * _MUL2
    return z ^ (z >> _U31)


@njit(cache=True)
def stream(key, counter):
    return mix64(key + _GOLDEN * (counter + _U1))


@njit(cache=True)
def bounded(key, bound, shift):
    # shift == 64 encodes bound == 1; a 64-bit shift is undefined.
    if shift >= 64:
        return _U0
    s = np.uint64(shift)
    attempt = _U0
    while True:
        v = stream(key, attempt) >> s
        if v < bound:
            return v
        attempt += _U1


@njit(cache=True)
def _mulmod_m61(a, b):
    a_lo = a & _MASK32
    a_hi = a >> _U32
    b_lo = b & _MASK32
    b_hi = b >> _U32
    lo = a_lo * b_lo
    mid = a_lo * b_hi + a_hi * b_lo
    hi = a_hi * b_hi
    # a*b = hi*2^64 + mid*2^32 + lo, and 2^61 == 1 (mod p)
    r = (hi << _U3) + (mid >> _U29) + ((mid & _MASK29) << _U32) + (lo >> _U61) + (lo & _M61)
    r = (r & _M61) + (r >> _U61)
    if r >= _M61:
        r -= _M61
    return r


@njit(cache=True)
def _mulmod_generic(a, b, p):
    result = _U0
    a = a % p
    while b > _U0:
        if b & _U1:
            result += a
            if result >= p:
                result -= p
        a += a
        if a >= p:
            a -= p
        b >>= _U1
    return result


@njit(cache=True)
def mulmod(a, b, p, kind):
    if kind == KIND_M61:
        return _mulmod_m61(a, b)
    if kind == KIND_SMALL:
        return (a * b) % p
    return _mulmod_generic(a, b, p)


@njit(cache=True)
def _mul_div(v, u, p):
    """floor(v * u / p) for v, u < p < 2**63 without 128-bit integers."""
    v_lo = v & _MASK32
    v_hi = v >> _U32
    u_lo = u & _MASK32
    u_hi = u >> _U32
    lo = v_lo * u_lo
    mid1 = v_lo * u_hi
    mid2 = v_hi * u_lo
    hi = v_hi * u_hi
    mid = (lo >> _U32) + (mid1 & _MASK32) + (mid2 & _MASK32)
    low = (lo & _MASK32) | ((mid & _MASK32) << _U32)
    high = hi + (mid1 >> _U32) + (mid2 >> _U32) + (mid >> _U32)
    q = _U0
    rem = _U0
    for bit in range(127, -1, -1):
        if bit >= 64:
            b = (high >> np.uint64(bit - 64)) & _U1
        else:
            b = (low >> np.uint64(bit)) & _U1
        rem = (rem << _U1) | b
        if rem >= p:
            rem -= p
            if bit < 64:
                q |= _U1 << np.uint64(bit)
    return q


@njit(cache=True)
def map_range(v, u, p):
    if u == p:
        return v
    if p < np.uint64(1 << 32):
        return (v * u) // p
    return _mul_div(v, u, p)


@njit(cache=True)
def horner(coeffs, x, p, kind):
    n = coeffs.shape[0]
    acc = coeffs[n - 1]
    for j in range(n - 2, -1, -1):
        acc = mulmod(acc, x, p, kind) + coeffs[j]
        if acc >= p:
            acc -= p
    return acc


@njit(cache=True)
def hash_values(coeffs, xs, p, u, kind):
    out = np.empty(xs.shape[0], dtype=np.uint64)
    for i in range(xs.shape[0]):
        out[i] = map_range(horner(coeffs, xs[i], p, kind), u, p)
    return out


@njit(cache=True)
def sample_coeffs(fseed, l, p, shift, out):
    for i in range(l):
        out[i] = bounded(stream(fseed, np.uint64(i)), p, shift)


@njit(cache=True)
def sample_coeff_matrix(master, first, count, l, p, shift):
    out = np.empty((count, l), dtype=np.uint64)
    for j in range(count):
        fseed = stream(master, np.uint64(first + j))
        sample_coeffs(fseed, l, p, shift, out[j])
    return out


@njit(cache=True)
def _decode(index, l, p, out):
    for i in range(l - 1, -1, -1):
        out[i] = np.uint64(index % p)
        index //= p


@njit(cache=True)
def _trial_setup(mode, master, j, l, p, shift_p, coeffs):
    """Prepare trial j; returns the per-trial key used in MODE_RANDOM."""
    if mode == MODE_POLY:
        sample_coeffs(stream(master, np.uint64(j)), l, p, shift_p, coeffs)
        return _U0
    if mode == MODE_EXHAUSTIVE:
        _decode(j, l, np.int64(p), coeffs)
        return _U0
    return stream(master, np.uint64(j))


@njit(cache=True)
def _trial_value(mode, key, x, coeffs, p, u, kind, shift_u):
    if mode == MODE_RANDOM:
        return bounded(stream(key, x), u, shift_u)
    return map_range(horner(coeffs, x, p, kind), u, p)


@njit(cache=True)
def event_hits(mode, master, first, count, xs, ys, t, l, p, u, kind, shift_p, shift_u):
    """Count trials in [first, first+count) where every Y precedes RANK_t(X).

    Points are ordered by (value, element).  The event holds iff fewer than
    ``t`` points of X precede the largest point of Y; the scan over X stops as
    soon as ``t`` such points have been seen.
    """
    coeffs = np.zeros(max(l, 1), dtype=np.uint64)
    hits = 0
    for j in range(first, first + count):
        key = _trial_setup(mode, master, j, l, p, shift_p, coeffs)
        top_v = _U0
        top_x = _U0
        for i in range(ys.shape[0]):
            v = _trial_value(mode, key, ys[i], coeffs, p, u, kind, shift_u)
            if i == 0 or v > top_v or (v == top_v and ys[i] > top_x):
                top_v = v
                top_x = ys[i]
        below = 0
        for i in range(xs.shape[0]):
            v = _trial_value(mode, key, xs[i], coeffs, p, u, kind, shift_u)
            if v < top_v or (v == top_v and xs[i] < top_x):
                below += 1
                if below >= t:
                    break
        if below < t:
            hits += 1
    return hits


@njit(cache=True)
def rank_values(mode, master, first, count, xs, t, l, p, u, kind, shift_p, shift_u):
    """Per trial, the t-th smallest hash value of X (1-based)."""
    coeffs = np.zeros(max(l, 1), dtype=np.uint64)
    buf = np.empty(xs.shape[0], dtype=np.uint64)
    out = np.empty(count, dtype=np.uint64)
    for j in range(first, first + count):
        key = _trial_setup(mode, master, j, l, p, shift_p, coeffs)
        for i in range(xs.shape[0]):
            buf[i] = _trial_value(mode, key, xs[i], coeffs, p, u, kind, shift_u)
        out[j - first] = np.partition(buf, t - 1)[t - 1]
    return out


@njit(cache=True)
def count_below(mode, master, first, count, xs, threshold, l, p, u, kind, shift_p, shift_u):
    """Per trial, the number of X's hash values strictly below ``threshold``."""
    coeffs = np.zeros(max(l, 1), dtype=np.uint64)
    out = np.empty(count, dtype=np.int64)
    for j in range(first, first + count):
        key = _trial_setup(mode, master, j, l, p, shift_p, coeffs)
        z = 0
        for i in range(xs.shape[0]):
            if _trial_value(mode, key, xs[i], coeffs, p, u, kind, shift_u) < threshold:
                z += 1
        out[j - first] = z
    return out
