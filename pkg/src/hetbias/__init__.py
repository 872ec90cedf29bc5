"""Exact bias and minimax scaling of Eicker-White slope-variance estimates."""

__version__ = "0.1.0"

from .bias import (
    BiasPolynomial,
    EstimatorLabel,
    EstimatorSpec,
    VariancePattern,
    bias,
    bias_via_residuals,
    build_polynomial,
    estimator_value,
    expected_sq_residual,
    expected_sq_residuals,
    hat_entry,
    true_variance,
)
from .errors import *  # noqa: F401,F403
from .experiments import ExperimentConfig, InvarianceRow, mc_validate_bias, run_invariance_study
from .inference import (
    HccmeReport,
    OlsFit,
    RegressionDataset,
    ScreeningVerdict,
    Verdict,
    hccme_report,
    ols_fit,
    screening,
)
from .minimax import (
    BiasProfile,
    LeastFavorableConfig,
    Normalization,
    a_star_analytic,
    asymptotic_performance,
    bias_profile,
    minimax_a_numeric,
    normal_asymptotic_biases,
    normal_asymptotic_root,
    three_point_biases,
    three_point_root,
    worst_case_negative,
    worst_case_positive,
)
from .regressors import (
    MomentTarget,
    RegressorSequence,
    generate_with_moments,
    standardize,
    three_point_sequence,
)
