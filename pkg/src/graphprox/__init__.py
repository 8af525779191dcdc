"""graphprox: Katz scores and commute times on sparse graphs.

Pairwise queries come with certified upper and lower bounds from the
Lanczos / Gauss-Radau quadrature connection; column queries use a local
residual-push solver (Katz) and a CG variant that estimates the diagonal
of the inverse (commute time).  Evaluation helpers cover top-k precision,
rank correlation, localization, and relative-work measurements.
"""

from .errors import (
    ConvergenceError,
    DegenerateStepError,
    IndefiniteSystemError,
    ParseError,
)
from .graph import Graph, load_edge_list, load_graph, load_matrix_market, preprocess
from .operators import (
    AdjustedLaplacianOperator,
    KatzOperator,
    LinearOperator,
    MatrixOperator,
    PreconditionedLaplacianOperator,
    adjusted_laplacian_operator,
    hard_alpha,
    katz_operator,
    one_norm,
    preconditioned_laplacian_operator,
    spectral_norm_estimate,
)
from .lanczos import LanczosFactorization, LanczosState, lanczos_run, lanczos_step
from .quadrature import (
    BoundsPair,
    GaussRadauState,
    gauss_rule_dense,
    radau_bounds_dense,
    radau_rule_dense,
    radau_step,
)
from .solvers import (
    DenseReferences,
    SolveReport,
    conjugate_gradient,
    dense_reference_matrices,
    reference_solve,
)
from .pairwise import (
    BoundsTrace,
    PairwiseEstimate,
    cg_pairwise_baseline,
    commute_pairwise_bounds,
    katz_pairwise_bounds,
)
from .commute_column import (
    CommuteColumn,
    DiagSolveResult,
    cg_lanczos_diag,
    commute_column,
    inverse_degree_heuristic,
)
from .katz_column import (
    KatzColumn,
    LocalizationReport,
    PushStats,
    katz_column_push,
    participation_trace,
    push_residual_bound,
)
from .metrics import (
    TopKSet,
    degree_sample_ranks,
    kendall_tau_on_exact_topk,
    participation_ratio,
    performance_ratio,
    precision_at_k,
    sample_vertex_pairs,
    sample_vertices,
)

__version__ = "0.1.0"
