"""Robust sparse high-dimensional regression via a minimum distance Lasso.

The package provides the robust log-sum-exp loss and its composite
gradient solver, an iteratively reweighted approximation, classical
baselines (Lasso, LAD-Lasso, trimmed Lasso, extended Lasso), computable
theory-bound calculators, and a reproducible simulation benchmark with a
command line front end (``mdlasso``).
"""

from .bounds import (
    CURVATURE_CONSTANT,
    TAIL_THRESHOLD,
    BoundInputs,
    RateBound,
    RscConstants,
    TailConditionError,
    estimate_M,
    estimate_kappa_re,
    global_solution_radius,
    min_c_for_rsc,
    psi_clip,
    rate_bound,
    rsc_constants,
    scaling_curve,
    xi_bound,
    zeta_bound,
)
from .data import (
    Coefficients,
    CsvFormatError,
    Dataset,
    FitResult,
    Standardizer,
    destandardize_coefficients,
    load_dataset,
    residuals,
    standardize,
)
from .distributions import (
    DISTRIBUTION_KINDS,
    ErrorDistribution,
    cauchy,
    damped_second_moment,
    gauss_mixture,
    has_finite_variance,
    laplace,
    normal,
    student_t,
    tail_prob,
)
from .estimators import (
    ESTIMATOR_KINDS,
    EstimatorSpec,
    TuningResult,
    default_lambda_grid,
    fit,
    tune,
)
from .loss import (
    MdLossParams,
    empirical_md_criterion,
    influence,
    md_gradient,
    md_hessian_quadratic_form,
    md_loss,
    md_weights,
)
from .simulate import (
    DesignModel,
    FactorCovariance,
    MetricReport,
    SimConfig,
    SimRecord,
    SimTruth,
    ToeplitzCovariance,
    bootstrap_stability,
    f1_score,
    generate_design,
    generate_errors,
    generate_truth,
    model_error,
    report_csv_text,
    report_json_text,
    run_benchmark,
    stability_csv_text,
    toeplitz_design,
    two_factor_design,
)
from .solver import (
    OptimizerConfig,
    SolveTrace,
    composite_gradient_step,
    default_safety_radius,
    project_l1_ball,
    soft_threshold,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "CURVATURE_CONSTANT",
    "TAIL_THRESHOLD",
    "BoundInputs",
    "RateBound",
    "RscConstants",
    "TailConditionError",
    "estimate_M",
    "estimate_kappa_re",
    "global_solution_radius",
    "min_c_for_rsc",
    "psi_clip",
    "rate_bound",
    "rsc_constants",
    "scaling_curve",
    "xi_bound",
    "zeta_bound",
    "Coefficients",
    "CsvFormatError",
    "Dataset",
    "FitResult",
    "Standardizer",
    "destandardize_coefficients",
    "load_dataset",
    "residuals",
    "standardize",
    "DISTRIBUTION_KINDS",
    "ErrorDistribution",
    "cauchy",
    "damped_second_moment",
    "gauss_mixture",
    "has_finite_variance",
    "laplace",
    "normal",
    "student_t",
    "tail_prob",
    "ESTIMATOR_KINDS",
    "EstimatorSpec",
    "TuningResult",
    "default_lambda_grid",
    "fit",
    "tune",
    "MdLossParams",
    "empirical_md_criterion",
    "influence",
    "md_gradient",
    "md_hessian_quadratic_form",
    "md_loss",
    "md_weights",
    "DesignModel",
    "FactorCovariance",
    "MetricReport",
    "SimConfig",
    "SimRecord",
    "SimTruth",
    "ToeplitzCovariance",
    "bootstrap_stability",
    "f1_score",
    "generate_design",
    "generate_errors",
    "generate_truth",
    "model_error",
    "report_csv_text",
    "report_json_text",
    "run_benchmark",
    "stability_csv_text",
    "toeplitz_design",
    "two_factor_design",
    "OptimizerConfig",
    "SolveTrace",
    "composite_gradient_step",
    "default_safety_radius",
    "project_l1_ball",
    "soft_threshold",
    "solve",
    "__version__",
]
