"""Accelerated gradient methods with small-dimensional relaxation.

First-order solvers that replace fixed momentum schedules with one-dimensional
exact line searches, keep a closed-form estimating sequence whose minimum
certifies progress at every iteration, and extend to Holder-smooth, strongly
convex, restarted and linearly constrained (primal-dual) settings.
"""

from .estimate import (
    CoefficientInputs,
    EstimateState,
    add_linearization,
    psi_min_value,
    solve_coef_smooth_known_L,
    solve_coef_smooth_linesearch,
    solve_coef_strongly_convex,
    solve_coef_universal,
    solve_coef_universal_sc,
)
from .exceptions import (
    AgmsdrError,
    AlreadyOptimal,
    CertificateViolation,
    DegenerateQuadratic,
    InnerOracleFailure,
    NoDecrease,
    NoDescent,
    NonEuclideanStrongConvexity,
    NoSolution,
    UnknownOptimum,
    ZeroGradient,
)
from .linesearch import (
    LineSearchConfig,
    LineSearchResult,
    minimize_cubic_ray,
    minimize_on_interval,
    minimize_on_ray,
)
from .oracle import (
    CountingOracle,
    EuclideanProx,
    FunctionOracle,
    ObjectiveOracle,
    ProxSetup,
    check_gradient,
)
from .primal_dual import (
    AffineConstraint,
    DualProblem,
    PrimalDualReport,
    dual_value_and_grad,
    make_entropy_dual,
    make_quadratic_dual,
    pd_solve,
)
from .problems import (
    NamedProblem,
    chained_nonconvex,
    maxq,
    nesterov_worst,
    quadratic,
)
from .restarts import RestartReport, solve_sc_restart, solve_wqc
from .solvers import (
    IterationRecord,
    SmoothKnownL,
    SmoothLineSearch,
    SolveReport,
    SolverConfig,
    SolverRun,
    Status,
    StronglyConvex,
    Universal,
    UniversalSC,
    gap_bound,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "AffineConstraint", "AgmsdrError", "AlreadyOptimal", "CertificateViolation",
    "CoefficientInputs", "CountingOracle", "DegenerateQuadratic", "DualProblem",
    "EstimateState", "EuclideanProx", "FunctionOracle", "InnerOracleFailure",
    "IterationRecord", "LineSearchConfig", "LineSearchResult", "NamedProblem",
    "NoDecrease", "NoDescent", "NoSolution", "NonEuclideanStrongConvexity",
    "ObjectiveOracle", "PrimalDualReport", "ProxSetup", "RestartReport",
    "SmoothKnownL", "SmoothLineSearch", "SolveReport", "SolverConfig",
    "SolverRun", "Status", "StronglyConvex", "Universal", "UniversalSC",
    "UnknownOptimum", "ZeroGradient", "add_linearization", "chained_nonconvex",
    "check_gradient", "dual_value_and_grad", "gap_bound", "make_entropy_dual",
    "make_quadratic_dual", "maxq", "minimize_cubic_ray", "minimize_on_interval",
    "minimize_on_ray", "nesterov_worst", "pd_solve", "problems",
    "psi_min_value", "quadratic", "solve", "solve_coef_smooth_known_L",
    "solve_coef_smooth_linesearch", "solve_coef_strongly_convex",
    "solve_coef_universal", "solve_coef_universal_sc", "solve_sc_restart",
    "solve_wqc",
]
