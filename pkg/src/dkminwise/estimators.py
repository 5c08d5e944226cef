"""Multi-sketch estimators: shingling, bundles of bottom-k sketches, Jaccard and rarity.

A bundle holds r bottom-k sketches of one set, sketch j built with the hash
function seeded by ``function_seed(master_seed, j)``.  Each sketch yields a
pairwise-independent sample of k elements (Chebyshev per sketch); the median
over r sketches amplifies the success probability (Chernoff across sketches).
"""

from __future__ import annotations

import statistics
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import seeding
from .analysis import sample_budget
from .errors import ConfigurationError, PreconditionError, SketchFormatError, StateError
from .hash_family import DEFAULT_FIELD, MERSENNE_61, FieldParams, PolyHashFunction, sample_function
from .sketch import BottomKSketch, HashedPoint, merge

MAGIC = b"DKMWSK01"
FORMAT_VERSION = 1

DEFAULT_SHINGLE_WIDTH = 8
DEFAULT_K = 512
DEFAULT_TAU = 0.05
DEFAULT_D = 2

_FNV_OFFSET = np.uint64(0xCBF29CE484222325)
_FNV_PRIME = np.uint64(0x100000001B3)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def shingle_ingest(data: bytes, w: int = DEFAULT_SHINGLE_WIDTH, fingerprint_seed: int = 0) -> np.ndarray:
    """Distinct fingerprints of all w-byte windows of ``data``, sorted.

    Fingerprint: 64-bit FNV-1a of the window, started from the FNV offset
    basis xor ``fingerprint_seed``, passed through the SplitMix64 finalizer,
    then ``(z >> 3) mod (2**61 - 1)`` so every element lies in the default
    field's universe.
    """
    if w < 1:
        raise PreconditionError(f"shingle width must be >= 1, got {w}")
    raw = np.frombuffer(bytes(data), dtype=np.uint8)
    if raw.size < w:
        return np.empty(0, dtype=np.uint64)
    windows = sliding_window_view(raw, w)
    h = np.full(windows.shape[0], _FNV_OFFSET ^ np.uint64(fingerprint_seed & seeding.MASK64), dtype=np.uint64)
    for col in range(w):
        h ^= windows[:, col].astype(np.uint64)
        h *= _FNV_PRIME
    z = _mix64_array(h) >> np.uint64(3)
    return np.unique(z % np.uint64(MERSENNE_61))


@dataclass
class SketchBundle:
    field: FieldParams
    l: int
    k: int
    d: int
    sketches: list[BottomKSketch]
    tau: float | None = None

    def __post_init__(self):
        seeds = self.seeds
        if len(set(seeds)) != len(seeds):
            raise ConfigurationError("function seeds must be pairwise distinct")
        if any(s.k != self.k for s in self.sketches):
            raise ConfigurationError("all sketches must share k")

    def __eq__(self, other):
        if not isinstance(other, SketchBundle):
            return NotImplemented
        return (self.field, self.l, self.k, self.d, self.sketches) == (
            other.field,
            other.l,
            other.k,
            other.d,
            other.sketches,
        )

    @property
    def r(self) -> int:
        return len(self.sketches)

    @property
    def seeds(self) -> list[int]:
        return [s.function_id for s in self.sketches]

    @property
    def underfull(self) -> bool:
        return any(not s.full for s in self.sketches)

    @property
    def tracks_multiplicity(self) -> bool:
        return bool(self.sketches) and all(s.tracks_multiplicity for s in self.sketches)

    def function(self, j: int) -> PolyHashFunction:
        return sample_function(self.field, self.l, self.sketches[j].function_id)

    def merge(self, other: SketchBundle) -> SketchBundle:
        _check_compatible(self, other)
        return SketchBundle(
            self.field, self.l, self.k, self.d, [merge(a, b) for a, b in zip(self.sketches, other.sketches)], self.tau
        )


def build_bundle(
    elements: Iterable[int],
    k: int = DEFAULT_K,
    tau: float = DEFAULT_TAU,
    master_seed: int = 0,
    *,
    d: int = DEFAULT_D,
    l: int | None = None,
    field: FieldParams = DEFAULT_FIELD,
    r: int | None = None,
    track_multiplicity: bool = False,
) -> SketchBundle:
    """Sketch ``elements`` with r = sample_budget(tau) functions (or an explicit r).

    ``l`` defaults to 3d + 2.  With ``track_multiplicity`` repeated elements
    are counted, which :func:`rarity_estimate` needs.
    """
    l = 3 * d + 2 if l is None else l
    r = sample_budget(tau) if r is None else r
    if r < 1:
        raise PreconditionError("r must be >= 1")
    xs = np.asarray(elements if isinstance(elements, np.ndarray) else list(elements), dtype=np.uint64)
    sketches = []
    for j in range(r):
        h = sample_function(field, l, seeding.function_seed(master_seed, j))
        sk = BottomKSketch(k, h.seed, multiplicities={} if track_multiplicity else None)
        sketches.append(sk.update(xs, h))
    return SketchBundle(field, l, k, d, sketches, tau)


def _check_compatible(a: SketchBundle, b: SketchBundle):
    for name in ("field", "l", "k", "d", "r"):
        if getattr(a, name) != getattr(b, name):
            raise ConfigurationError(f"bundle {name} mismatch: {getattr(a, name)} != {getattr(b, name)}")
    if a.seeds != b.seeds:
        raise ConfigurationError("bundles were built with different function seeds")


@dataclass(frozen=True)
class JaccardResult:
    estimate: float
    per_sketch: list[float]
    underfull: bool


def sketch_jaccard(a: BottomKSketch, b: BottomKSketch) -> float:
    """Fraction of the union's bottom-k that lies in both sides' bottom-k."""
    union = merge(a, b)
    if not union.entries:
        return 1.0
    both = a.elements() & b.elements()
    return sum(pt.element in both for pt in union.entries) / len(union.entries)


def jaccard_estimate(a: SketchBundle, b: SketchBundle) -> JaccardResult:
    _check_compatible(a, b)
    per = [sketch_jaccard(sa, sb) for sa, sb in zip(a.sketches, b.sketches)]
    return JaccardResult(statistics.median(per), per, a.underfull or b.underfull)


def rarity_estimate(bundle: SketchBundle, is_rare: Callable[[int], bool] = lambda count: count == 1) -> float:
    """Median over sketches of the fraction of sampled elements that are rare."""
    if not bundle.tracks_multiplicity:
        raise StateError("bundle was not built with track_multiplicity=True")
    per = []
    for sk in bundle.sketches:
        if not sk.entries:
            raise StateError("rarity is undefined for an empty sketch")
        per.append(sum(bool(is_rare(sk.multiplicities[pt.element])) for pt in sk.entries) / len(sk.entries))
    return statistics.median(per)


# -- file format -------------------------------------------------------------

_U64 = struct.Struct("<Q")


def bundle_to_bytes(bundle: SketchBundle) -> bytes:
    out = bytearray(MAGIC)
    for value in (FORMAT_VERSION, bundle.field.p, bundle.field.u, bundle.l, bundle.k, bundle.r, bundle.d):
        out += _U64.pack(value)
    for sk in bundle.sketches:
        out += _U64.pack(sk.function_id)
        out += _U64.pack(len(sk.entries))
        for value, element in sk.entries:
            out += _U64.pack(value)
            out += _U64.pack(element)
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def u64(self, name: str) -> int:
        if self.pos + 8 > len(self.data):
            raise SketchFormatError(name, "unexpected end of file")
        (value,) = _U64.unpack_from(self.data, self.pos)
        self.pos += 8
        return value


def bundle_from_bytes(data: bytes, verify_hashes: bool = True) -> SketchBundle:
    if data[:8] != MAGIC:
        raise SketchFormatError("magic", f"expected {MAGIC!r}, got {bytes(data[:8])!r}")
    rd = _Reader(data)
    rd.pos = 8
    version = rd.u64("version")
    if version != FORMAT_VERSION:
        raise SketchFormatError("version", f"unsupported version {version}")
    p, u, l, k, r, d = (rd.u64(name) for name in ("p", "u", "l", "k", "r", "d"))
    try:
        field = FieldParams(p, u)
    except ConfigurationError as exc:
        raise SketchFormatError("p" if "prime" in str(exc) or "64 bits" in str(exc) else "u", str(exc)) from None
    if l < 1:
        raise SketchFormatError("l", "must be >= 1")
    if k < 1:
        raise SketchFormatError("k", "must be >= 1")
    if d < 1 or d > k:
        raise SketchFormatError("d", f"must lie in [1, k={k}]")
    sketches = []
    seen = set()
    for j in range(r):
        seed = rd.u64(f"sketch[{j}].seed")
        if seed in seen:
            raise SketchFormatError(f"sketch[{j}].seed", "duplicate function seed")
        seen.add(seed)
        count = rd.u64(f"sketch[{j}].entry_count")
        if count > k:
            raise SketchFormatError(f"sketch[{j}].entry_count", f"{count} exceeds k={k}")
        entries = [HashedPoint(rd.u64(f"sketch[{j}].entries"), rd.u64(f"sketch[{j}].entries")) for _ in range(count)]
        if any(a >= b for a, b in zip(entries, entries[1:])):
            raise SketchFormatError(f"sketch[{j}].entries", "entries not strictly increasing")
        if any(pt.element >= u or pt.value >= u for pt in entries):
            raise SketchFormatError(f"sketch[{j}].entries", f"entry outside [0, u={u})")
        if verify_hashes and entries:
            h = sample_function(field, l, seed)
            values = h.evaluate_many([pt.element for pt in entries])
            if any(int(v) != pt.value for v, pt in zip(values, entries)):
                raise SketchFormatError(f"sketch[{j}].entries", "hash value does not match element")
        sketches.append(BottomKSketch(k, seed, entries))
    if rd.pos != len(data):
        raise SketchFormatError("trailer", f"{len(data) - rd.pos} unexpected trailing bytes")
    return SketchBundle(field, l, k, d, sketches)


def save_bundle(bundle: SketchBundle, path) -> None:
    Path(path).write_bytes(bundle_to_bytes(bundle))


def load_bundle(path) -> SketchBundle:
    return bundle_from_bytes(Path(path).read_bytes())
