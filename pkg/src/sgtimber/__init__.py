"""Sparse-grid stochastic collocation for timber beams with random knots.

The package builds Smolyak and adaptive sparse-grid surrogates of black-box
models over boxes of uniform parameters, post-processes them into moments,
Sobol indices and densities, and supplies the isogeometric collocation
solver for the heterogeneous elastic beam used in the studies.
"""
from .adaptive import AdaptiveState, AdaptiveStep, adapt
from .exceptions import (
    BudgetTooSmallError,
    DegenerateError,
    InvalidConfigurationError,
    InvalidCountError,
    InvalidIndexError,
    InvalidLevelError,
    InvalidSetError,
    ModelEvaluationError,
    OutOfDomainError,
    SgTimberError,
    SolverFailureError,
    UnsupportedDegreeError,
)
from .experiments import (
    ConvergenceRecord,
    ExperimentConfig,
    make_config,
    max_norm_relative_error,
    run_one_knot,
    run_two_knot,
)
from .iga import (
    BeamGeometry,
    DisplacementField,
    OneKnotMaterial,
    OpenKnotVector,
    TractionProblem,
    TwoKnotMaterial,
    alpha_one_knot,
    alpha_two_knot,
    bspline_eval,
    evaluate_displacement,
    greville_abscissae,
    l2_relative_field_error,
    open_uniform_knot_vector,
    qoi_corner,
    solve_traction_problem,
)
from .montecarlo import McEstimate, mc_expectation
from .multiindex import MultiIndexSet, combination_coefficients, is_downward_closed, reduced_margin, smolyak_set
from .params import ParameterSpace, map_affine, sample_uniform
from .postprocess import kde_pdf, moments, sobol_indices, to_legendre
from .rules import clenshaw_curtis_nodes, clenshaw_curtis_weights, level_to_knots_doubling, level_to_knots_linear
from .sparse_grid import (
    Surrogate,
    build_sparse_grid,
    evaluate_on_grid,
    interpolate,
    load_surrogate,
    quadrature,
    reduce,
    save_surrogate,
)

__version__ = "0.1.0"
