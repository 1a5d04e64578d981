"""Boundary interpolation of Schur-class functions from higher-order jets.

Problem data are boundary points ``t_i`` with jets ``c_{i,0..2n_i}`` and
bounds ``gamma_i``.  The package builds the Pick matrix, decides whether the
problem is solvable, and returns either the unique Blaschke solution or the
linear fractional description of all solutions.  The ``analyze`` module
measures what any candidate does at the boundary.
"""

from .analyze import (
    LimitEstimate,
    RadialSchedule,
    boundary_limit_d,
    boundary_sp_matrix_jet,
    classify_equality,
    d_lower,
    dval,
    gap,
    gap_formula,
    generalized_boundary_sp,
    interior_sp_matrix,
)
from .estimator import BoundaryInterpolator
from .exceptions import (
    DegenerateDenominator,
    InterpolationError,
    NotSchurClass,
    NumericalFailure,
    PoleAtNode,
    PoleAtPoint,
    ReconstructionMismatch,
    SingularPick,
    UniqueSolutionWarning,
)
from .parametrize import (
    CoefficientMatrix,
    SchurParameter,
    coefficient_matrix_at,
    coefficient_matrix_rational,
    singular_solution,
    solve,
)
from .pickdata import (
    InterpolationNode,
    PickSystem,
    ProblemData,
    build_pick_system,
    c_top_from_gamma,
    extract_jet,
    gamma_from_jet,
    psi_matrix,
)
from .ratfun import Jet, Polynomial, RationalFunction, blaschke, lft_apply, rat_eval, rat_taylor
from .solvability import SolvabilityReport, assess, check_admissible, psd_rank, stein_residual

__version__ = "0.1.0"

__all__ = [
    "BoundaryInterpolator",
    "CoefficientMatrix",
    "DegenerateDenominator",
    "InterpolationError",
    "InterpolationNode",
    "Jet",
    "LimitEstimate",
    "NotSchurClass",
    "NumericalFailure",
    "PickSystem",
    "PoleAtNode",
    "PoleAtPoint",
    "Polynomial",
    "ProblemData",
    "RadialSchedule",
    "RationalFunction",
    "ReconstructionMismatch",
    "SchurParameter",
    "SingularPick",
    "SolvabilityReport",
    "UniqueSolutionWarning",
    "assess",
    "blaschke",
    "boundary_limit_d",
    "boundary_sp_matrix_jet",
    "build_pick_system",
    "c_top_from_gamma",
    "check_admissible",
    "classify_equality",
    "coefficient_matrix_at",
    "coefficient_matrix_rational",
    "d_lower",
    "dval",
    "extract_jet",
    "gamma_from_jet",
    "gap",
    "gap_formula",
    "generalized_boundary_sp",
    "interior_sp_matrix",
    "lft_apply",
    "psd_rank",
    "psi_matrix",
    "rat_eval",
    "rat_taylor",
    "singular_solution",
    "solve",
    "stein_residual",
]
