"""Approximately d-k-min-wise independent hashing with low-degree polynomial families."""

from .analysis import (
    BlockPartition,
    ExactProbability,
    block_boundaries,
    block_of,
    d_in_regime,
    default_c,
    delta_series_constant,
    exact_probability,
    moment_bound,
    required_independence,
    required_k,
    sample_budget,
    tail_bound_rhs,
)
from .errors import (
    ConfigurationError,
    DkmwError,
    DomainError,
    EnumerationCapError,
    PreconditionError,
    SketchFormatError,
    StateError,
)
from .estimators import (
    SketchBundle,
    build_bundle,
    jaccard_estimate,
    load_bundle,
    rarity_estimate,
    save_bundle,
    shingle_ingest,
)
from .hash_family import (
    DEFAULT_FIELD,
    MERSENNE_61,
    FieldParams,
    PolyHashFunction,
    enumerate_family,
    independence_certificate,
    sample_function,
)
from .sketch import BottomKSketch, DkmwParams, HashedPoint, dkm_event, insert, merge, min_k, rank_k
from .verifier import (
    DeltaEstimate,
    Mode,
    TailHistogram,
    TrialConfig,
    delta_scan,
    estimate_event_probability,
    moment_check,
    tail_histogram,
)

__version__ = "0.1.0"
