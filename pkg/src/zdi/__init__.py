"""Zero-dilation index, higher-rank numerical ranges and isotropic subspaces.

``d(A)`` is the largest ``k`` such that ``V*AV = 0`` for some ``n x k``
isometry ``V``.  :func:`zdi_general` computes it for any square matrix;
the special-form functions give exact answers for Hermitian, normal and
weighted permutation matrices.
"""

__version__ = "0.1.0"

from .certificates import (
    IsometryCertificate,
    SearchConfig,
    construct_diagonal_normal,
    construct_hermitian,
    construct_search,
    verify,
)
from .engine import (
    SweepConfig,
    ZdiResult,
    i_geq0_at,
    min_lambda_k,
    zdi_bruteforce_oracle,
    zdi_count_min,
    zdi_general,
)
from .errors import (
    DimensionMismatch,
    HintMismatch,
    InconsistentFormulations,
    NoConvergence,
    NotDivisible,
    NotHermitian,
    NotOnBoundary,
    NotWeightedPermutation,
    ParseError,
    SearchFailed,
    TheoremViolation,
    ValidationError,
    ZdiError,
)
from .geometry import RangePolygon, contains_zero, range_polygon, support_value
from .io import MatrixDocument, load_matrix, parse_matrix, serialize_matrix
from .matrix_core import hermitian_eig, random_unitary, signature
from .special_forms import (
    NormalSpectrum,
    cycle_pair_rule,
    decompose_weighted_permutation,
    direct_sum_zdi,
    zdi_cycle,
    zdi_hermitian,
    zdi_normal,
    zdi_normal_matrix,
    zdi_path,
    zdi_weighted_permutation,
    zdi_weighted_permutation_matrix,
)
from .structure import (
    boundary_extreme_analysis,
    characterize_n_minus_1,
    classify_3x3,
    deflate_zero,
    kippenhahn_cubic,
    sharp_two_thirds_matrix,
)
