"""Surface-spline approximation on smooth planar domains.

Polyharmonic kernels, boundary layer potentials, local polynomial
reproduction, and the boundary-corrected quasi-interpolation scheme built
from them, plus the experiment harness that measures convergence rates.
"""

from .errors import (
    DensityUnreachableError,
    DomainValidityError,
    ExtrapolationDivergenceError,
    NearBoundaryAccuracyWarning,
    NormingFailureError,
    ProjectionFailureError,
    ReachViolationError,
    ResidualToleranceError,
    SingularEvaluationError,
    SingularSystemError,
    StarShapeError,
    SurfsplineError,
    UnderResolvedDataWarning,
)
from .geometry import (
    BoundaryGrid,
    CenterSet,
    DomainCurve,
    circle,
    curve_from_spec,
    ellipse,
    fill_distance,
    generate_centers,
    oversample_boundary,
    signed_distance,
    star,
)
from .dirichlet import (
    DirichletSolution,
    compute_Nj,
    principal_symbol_matrix,
    solve_dirichlet,
)
from .harness import (
    ErrorReport,
    ExperimentConfig,
    converge,
    greens_identity_check,
    oversampling_budget,
)
from .kernel import SplineParams, fs_constant, phi, phi_points
from .layerpot import layer_potential
from .lpr import (
    LocalReproduction,
    boundary_reproduction_matrix,
    build_boundary_lpr,
    build_interior_lpr,
    interior_reproduction_matrix,
)
from .polyspace import PolyBasis
from .scheme import (
    Approximant,
    ExtensionField,
    SchemeGrids,
    annihilation_check,
    assemble_TXi,
    error_kernel_norms,
    eval_approximant,
    eval_extension,
    extension_continuity,
    greens_representation,
    interior_quadrature,
    probe_points,
    scheme_grids,
    volume_potential,
)
from .targets import TargetFunction, named_target, target_from_callable, target_from_expression

__all__ = [
    "SplineParams",
    "fs_constant",
    "phi",
    "phi_points",
    "DomainCurve",
    "BoundaryGrid",
    "CenterSet",
    "circle",
    "ellipse",
    "star",
    "curve_from_spec",
    "signed_distance",
    "fill_distance",
    "generate_centers",
    "oversample_boundary",
    "PolyBasis",
    "TargetFunction",
    "named_target",
    "target_from_expression",
    "target_from_callable",
    "layer_potential",
    "DirichletSolution",
    "solve_dirichlet",
    "compute_Nj",
    "principal_symbol_matrix",
    "LocalReproduction",
    "build_interior_lpr",
    "build_boundary_lpr",
    "interior_reproduction_matrix",
    "boundary_reproduction_matrix",
    "SchemeGrids",
    "scheme_grids",
    "interior_quadrature",
    "volume_potential",
    "greens_representation",
    "probe_points",
    "Approximant",
    "assemble_TXi",
    "eval_approximant",
    "ExtensionField",
    "eval_extension",
    "extension_continuity",
    "annihilation_check",
    "error_kernel_norms",
    "ExperimentConfig",
    "ErrorReport",
    "converge",
    "greens_identity_check",
    "oversampling_budget",
    "SurfsplineError",
    "SingularEvaluationError",
    "DomainValidityError",
    "ProjectionFailureError",
    "ReachViolationError",
    "StarShapeError",
    "NormingFailureError",
    "SingularSystemError",
    "ResidualToleranceError",
    "ExtrapolationDivergenceError",
    "DensityUnreachableError",
    "NearBoundaryAccuracyWarning",
    "UnderResolvedDataWarning",
]
