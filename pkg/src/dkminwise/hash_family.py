"""l-wise independent hash functions [u] -> [u] as random polynomials over GF(p).

A function is a coefficient vector ``(a_0, ..., a_{l-1})`` and maps
``x -> (a_0 + a_1 x + ... + a_{l-1} x^{l-1}) mod p``.  Evaluation uses Horner's
rule starting from the highest coefficient.  When ``u < p`` the field value
``v`` is mapped into [0, u) by ``floor(v * u / p)``; that mapping is not exactly
uniform, so only ``u == p`` families are certified exactly.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from sympy import isprime

from . import _kernels, seeding
from .errors import ConfigurationError, DomainError, EnumerationCapError, PreconditionError

MERSENNE_61 = (1 << 61) - 1
DEFAULT_ENUMERATION_CAP = 10**7


@dataclass(frozen=True)
class FieldParams:
    p: int = MERSENNE_61
    u: int = MERSENNE_61

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or self.p < 2 or not isprime(int(self.p)):
            raise ConfigurationError(f"p={self.p} is not prime")
        if self.p >= 1 << 64:
            raise ConfigurationError(f"p={self.p} does not fit in 64 bits")
        if not 1 <= self.u <= self.p:
            raise ConfigurationError(f"universe size u={self.u} must lie in [1, p={self.p}]")

    @property
    def kind(self) -> int:
        return _kernels.field_kind(self.p)


DEFAULT_FIELD = FieldParams()


@dataclass(frozen=True)
class PolyHashFunction:
    field: FieldParams
    coeffs: tuple[int, ...]
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if not self.coeffs:
            raise PreconditionError("a hash function needs at least one coefficient")
        if any(not 0 <= c < self.field.p for c in self.coeffs):
            raise PreconditionError(f"coefficients must lie in [0, {self.field.p})")

    @property
    def l(self) -> int:
        return len(self.coeffs)

    def evaluate(self, x: int) -> int:
        p, u = self.field.p, self.field.u
        if not 0 <= x < u:
            raise DomainError(f"element {x} outside [0, {u})")
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = (acc * x + c) % p
        return acc if u == p else acc * u // p

    __call__ = evaluate

    def evaluate_many(self, xs) -> np.ndarray:
        """Vectorized :meth:`evaluate` over an array of elements (uint64 result)."""
        xs = np.ascontiguousarray(xs, dtype=np.uint64)
        if xs.size and int(xs.max()) >= self.field.u:
            raise DomainError(f"element {int(xs.max())} outside [0, {self.field.u})")
        f = self.field
        return _kernels.hash_values(
            np.array(self.coeffs, dtype=np.uint64), xs, np.uint64(f.p), np.uint64(f.u), f.kind
        )


def evaluate(h: PolyHashFunction, x: int) -> int:
    return h.evaluate(x)


def sample_function(cfg: FieldParams, l: int, seed: int) -> PolyHashFunction:
    """Draw a member of the degree-(l-1) family, deterministically from ``seed``.

    Coefficient i is ``seeding.bounded(stream(seed, i), p)``: rejection sampling
    on the top bits of SplitMix64 draws.
    """
    if l < 1:
        raise PreconditionError("independence degree l must be >= 1")
    seed &= seeding.MASK64
    coeffs = tuple(seeding.bounded(seeding.stream(seed, i), cfg.p) for i in range(l))
    return PolyHashFunction(cfg, coeffs, seed)


def family_size(cfg: FieldParams, l: int) -> int:
    return cfg.p**l


def _check_cap(cfg: FieldParams, l: int, cap: int) -> int:
    size = family_size(cfg, l)
    if size > cap:
        raise EnumerationCapError(size, cap)
    return size


def enumerate_family(cfg: FieldParams, l: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[PolyHashFunction]:
    """Yield all p**l functions in lexicographic coefficient order."""
    if l < 1:
        raise PreconditionError("independence degree l must be >= 1")
    _check_cap(cfg, l, cap)

    def generate():
        for coeffs in itertools.product(range(cfg.p), repeat=l):
            yield PolyHashFunction(cfg, coeffs)

    return generate()


def coefficient_matrix(cfg: FieldParams, l: int, cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
    """All coefficient vectors as a (p**l, l) array, rows in enumeration order."""
    _check_cap(cfg, l, cap)
    grids = np.meshgrid(*[np.arange(cfg.p, dtype=np.uint64)] * l, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def independence_certificate(
    cfg: FieldParams, l: int, points: Sequence[int], cap: int = DEFAULT_ENUMERATION_CAP
) -> dict[tuple[int, ...], int]:
    """Exact joint distribution of (h(x_1), ..., h(x_j)) over the whole family.

    Maps every j-tuple of target values (including those never hit) to the
    number of family members producing it.
    """
    points = [int(x) for x in points]
    if len(set(points)) != len(points):
        raise PreconditionError("points must be distinct")
    if len(points) > l:
        raise PreconditionError(f"{len(points)} points exceed independence degree l={l}")
    if cfg.u != cfg.p:
        raise PreconditionError("exact certification requires u == p")
    if any(not 0 <= x < cfg.u for x in points):
        raise DomainError(f"points must lie in [0, {cfg.u})")
    coeffs = coefficient_matrix(cfg, l, cap)
    p = np.uint64(cfg.p)
    columns = []
    for x in points:
        acc = coeffs[:, l - 1].copy()
        for j in range(l - 2, -1, -1):
            acc = (acc * np.uint64(x) + coeffs[:, j]) % p
        columns.append(acc)
    counts = Counter(zip(*(c.tolist() for c in columns))) if columns else Counter({(): len(coeffs)})
    table = {target: 0 for target in itertools.product(range(cfg.p), repeat=len(points))}
    table.update(counts)
    return table
