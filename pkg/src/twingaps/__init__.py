"""Twin-prime gap statistics: segmented sieving, streaming histograms of the
arithmetic gaps and prime-count separations between consecutive twins, and
the closed-form predictions they are compared against."""

from .errors import (
    BoundTooLargeError,
    ConsistencyError,
    DegenerateRegimeError,
    InsufficientDataError,
    SchemaError,
    SequencingError,
    TwingapsError,
)
from .fit import (
    ComparisonRow,
    FitResult,
    ResidualDiagnostics,
    comparison_row,
    fit_exponential,
    residual_diagnostics,
)
from .scanstats import (
    Checkpoint,
    GapHistogram,
    Histogram,
    ScanState,
    SeparationHistogram,
    champion,
    consume_segment,
    extremes,
    take_checkpoint,
)
from .sieve import (
    MAX_N,
    SieveSegment,
    TwinPair,
    base_primes,
    prime_count,
    sieve_segment,
    twin_stream,
)
from .theory import (
    C2_LITERATURE,
    C2Estimate,
    TheoryPrediction,
    li,
    li2,
    predict,
    predict_ab_asympt,
    predict_ab_exact,
    predict_smax,
    smax_asympt,
    twin_prime_constant,
)

__version__ = "0.1.0"
