"""Bell-inequality experiments with bounded spin-coherent-state reference
frames: relational POVMs, correlation functions, violation thresholds, and
the minimal-frame-size scan."""

from .angular import (
    CgArgs,
    HalfInt,
    cg_racah,
    cg_recurrence,
    clebsch_gordan,
    ln_factorial,
    wigner_small_d,
    wigner_small_d_matrix,
)
from .bell import (
    BellResult,
    MixedFrameSpec,
    chained_chsh_parity,
    chsh_min_partner,
    chsh_pair,
    mermin_asymptotic_factor,
    mermin_min_ratio,
    mermin_mixed_violates,
    mermin_value,
    mermin_value_numeric,
)
from .correlations import (
    UNBOUNDED,
    mermin_correlation_analytic,
    mermin_correlation_numeric,
    pair_correlation_analytic,
    pair_correlation_numeric,
    parity_correlation,
)
from .errors import (
    BrefError,
    DegenerateDesign,
    DimensionTooLarge,
    InvalidSpin,
    MismatchedLengths,
    NoThresholdExists,
    ParseError,
)
from .measurements import (
    Povm,
    bounded_povm,
    bounded_povm_z,
    ideal_projectors,
    parity_observable,
)
from .search import (
    FitResult,
    NotFoundBelowCap,
    ScanRecord,
    heuristic_bound,
    heuristic_ok,
    maximize_chained_chsh,
    minimal_rf_scan,
    quadratic_fit,
)
from .states import (
    Direction,
    StateVector,
    coherent_state,
    generalized_singlet,
    ghz_state,
    rotated_singlet,
)

__version__ = "0.1.0"
