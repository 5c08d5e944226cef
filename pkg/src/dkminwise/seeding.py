"""Counter-based seed derivation.

Every random quantity in the package is a pure function of a 64-bit key and
one or more counters, so results never depend on evaluation order.  The
mixing function is the SplitMix64 finalizer; ``stream(key, i)`` is the i-th
output of a SplitMix64 generator whose state starts at ``key``.

The same functions exist as numba kernels in :mod:`dkminwise._kernels`;
the two are checked against each other in the test suite.
"""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB

# Domain-separation tags xor-ed into a master seed.
TAG_TRUE_RANDOM = 0x7472756572616E64  # "truerand"
TAG_SET_DRAW = 0x7365746472617773  # "setdraws"


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def stream(key: int, counter: int) -> int:
    """The ``counter``-th 64-bit draw of the stream keyed by ``key``."""
    return mix64((key + GOLDEN * (counter + 1)) & MASK64)


def function_seed(master_seed: int, index: int) -> int:
    """Seed of the ``index``-th hash function derived from ``master_seed``."""
    return stream(master_seed & MASK64, index)


def bounded(key: int, bound: int) -> int:
    """Uniform integer in [0, bound) from the stream keyed by ``key``.

    Takes the top ``bit_length(bound - 1)`` bits of successive draws and
    rejects values >= bound, so there is no modulo bias.
    """
    if bound < 1:
        raise ValueError("bound must be positive")
    if bound == 1:
        return 0
    shift = 64 - (bound - 1).bit_length()
    attempt = 0
    while True:
        v = stream(key, attempt) >> shift
        if v < bound:
            return v
        attempt += 1
