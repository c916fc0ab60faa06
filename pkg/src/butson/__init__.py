"""Classification of Butson-Hadamard matrices BH(p,p) for prime p.

Everything runs on exact exponent matrices over F_p: a backtracking search
with candidate filtering enumerates fully normalized difference matrices, a
master/worker driver splits the tree at a dividing index, and the attached
projective-plane incidence structures are built and verified exactly.
"""

from .algebra import (
    CandidateSet,
    ExponentMatrix,
    NormalizationTrace,
    PrimeModulus,
    apply_equivalence,
    check_bh_equivalence,
    cyclotomic_sum_is_zero,
    fourier_exponents,
    fully_normalize,
    is_difference_matrix,
    is_fully_normalized,
    matrices_from_text,
    matrices_to_text,
    matrix_from_text,
    matrix_to_text,
    transpose,
)
from .orders import AdmissibleOrder, builtin_order, is_admissible
from .parallel import (
    ParallelConfig,
    ProfileRow,
    RecordIntegrityError,
    RecordParseError,
    WorkerFailure,
    checkpoint_read,
    checkpoint_write,
    complete_prefix,
    default_divide,
    profile_orders,
    profile_to_csv,
    run_parallel,
    split_prefixes,
)
from .plane import (
    IncidencePlane,
    PlaneFrame,
    PlaneReport,
    PointPermutation,
    build_frame,
    build_incidence,
    canonical_frame,
    elation_symmetry,
    extract_exponent_matrix,
    find_elation_frame,
    line_permutation,
    plane_from_text,
    plane_to_text,
    shift_permutation_matrix,
    symmetry_preserves_incidence,
    verify_plane_axioms,
)
from .search import (
    PartialCore,
    PrefixRecord,
    SearchConfig,
    SearchStats,
    candidates,
    count_prefixes,
    enumerate_solutions,
    init_partial,
    prefix_counts_upto,
    search,
    seed_partial,
    values_to_matrix,
    with_transposes,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
