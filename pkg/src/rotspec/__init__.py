"""rotspec: certified finite-matrix approximation of rotation-algebra spectra.

The pipeline: expand theta into continued-fraction convergents p/q,
realize the operator at each convergent by q x q clock-and-shift
matrices, compute spectra or sigma_min grids, and attach explicit error
radii so every output is a certificate rather than a heuristic picture.
"""

from .contfrac import (
    BigRational,
    ContinuedFractionExpansion,
    DecimalString,
    GapBound,
    QuadraticSurd,
    RealNumberInput,
    convergent_gap,
    expand,
    fibonacci,
    fibonacci_growth_check,
    is_convergent,
    parse_theta,
    round_nearest,
    sufficient_condition_check,
    tail_constant_enclosure,
    tail_sum_bound,
    theta_float,
)
from .errors import (
    CertificateViolation,
    ConvergenceFailure,
    EmptyCloud,
    EmptySpec,
    IndexOutOfRange,
    InsufficientTerms,
    InvalidInput,
    InvalidOrder,
    ModelsNotNormal,
    NonCanonicalSpec,
    NotCertifiable,
    NotHermitian,
    NotNormal,
    PrecisionExhausted,
    ResourceBudgetExceeded,
    RotspecError,
    ThetaRational,
)
from .matmodel import (
    MatrixModel,
    OperatorSpec,
    build_operator,
    clock_matrix,
    commutation_defect,
    matrix_csv_triplets,
    shift_matrix,
    spec_norm_bound,
    unitarity_defect,
)
from .spectral import (
    EigenvalueSet,
    circulant_four_term_eigenvalues,
    hermitian_eigenvalues,
    is_normal,
    normal_eigenvalues,
    operator_norm,
    smallest_singular_value,
)
from .pseudospectra import (
    GridParams,
    PointCloud,
    PseudospectrumGrid,
    SandwichReport,
    cloud_to_csv,
    compute_grid,
    grid_to_csv,
    grid_to_pgm,
    level_set,
    read_cloud_csv,
    read_grid_csv,
    sandwich_check,
    union_spectrum,
)
from .approx import (
    ApproximationCertificate,
    ConstantAudit,
    ConvergenceTable,
    OneSidedCertificate,
    PseudospectrumSandwich,
    certify_normal,
    certify_pseudospectrum,
    clean_bound,
    constant_audit,
    convergence_study,
    haagerup_rordam_bound,
    hausdorff_distance,
    one_sided,
    one_sided_contains,
    parameter_continuity_bound,
    sharp_bound,
    sharpness_floor,
)

__version__ = "0.1.0"
