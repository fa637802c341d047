"""Polychoric correlation from ordinal data.

Estimates the correlation of a latent bivariate standard normal pair that
generated two observed ordinal variables through thresholds.  Alongside
classic maximum likelihood and the fast two-step estimator, the package
implements a generalized ML estimator that stays accurate when an unknown
fraction of responses (careless respondents, misresponses) was not
generated by the latent normal model: cells whose Pearson residual exceeds
a tuning constant ``c`` contribute linearly to the fitting loss instead of
super-linearly, bounding their influence.  ``c = inf`` recovers ML exactly.

Entry points
------------
- :func:`fit`, :func:`fit_twostep`, :func:`pearson_sample_correlation`
- :func:`sandwich_covariance`, :func:`pearson_residuals`,
  :func:`flag_misfit_cells`, :func:`confidence_interval`
- :func:`fit_matrix` for pairwise correlation matrices
- :mod:`polychoric.simulation` for data generators and study drivers
- the ``polychoric`` command-line tool (see README)
"""

from .bvn import (
    RHO_CLAMP_BOUND,
    biv_cdf,
    biv_pdf,
    clamp_correlation,
    uni_cdf,
    uni_pdf,
    uni_quantile,
)
from .errors import (
    CodeError,
    ConfigError,
    DegenerateMargin,
    DomainError,
    EmptyCategory,
    EmptyTable,
    InvalidTheta,
    NearZeroCell,
    NoConvergence,
    NotPositiveDefinite,
    ParseError,
    PolychoricError,
)
from .estimation import (
    THRESHOLD_GAP_CUTOFF,
    DiscrepancyConfig,
    EstimateResult,
    FitOptions,
    detect_instability,
    fit,
    fit_frequencies,
    fit_twostep,
    loss,
    pearson_sample_correlation,
    phi,
)
from .inference import (
    ConfidenceInterval,
    CovarianceComponents,
    confidence_interval,
    flag_misfit_cells,
    ml_covariance,
    pearson_residuals,
    sandwich_covariance,
    score,
)
from .model import (
    CellGrid,
    ContingencyTable,
    Theta,
    cell_prob_grad,
    cell_prob_hessian,
    cell_probs,
    empirical_frequencies,
)
from .pairwise import CorrelationMatrixResult, OrdinalDataset, fit_matrix
from .simulation import (
    BivariateNormalComponent,
    IndependentGumbelComponent,
    MixtureSpec,
    PerformanceReport,
    generate_multivariate,
    generate_pair,
    mixture_cell_probs,
    run_matrix_study,
    run_study,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # numerics
    "RHO_CLAMP_BOUND", "uni_pdf", "uni_cdf", "uni_quantile",
    "biv_pdf", "biv_cdf", "clamp_correlation",
    # model
    "Theta", "ContingencyTable", "CellGrid",
    "cell_probs", "cell_prob_grad", "cell_prob_hessian", "empirical_frequencies",
    # estimation
    "DiscrepancyConfig", "FitOptions", "EstimateResult",
    "phi", "loss", "fit", "fit_frequencies", "fit_twostep",
    "pearson_sample_correlation", "detect_instability", "THRESHOLD_GAP_CUTOFF",
    # inference
    "CovarianceComponents", "ConfidenceInterval",
    "score", "sandwich_covariance", "ml_covariance", "confidence_interval",
    "pearson_residuals", "flag_misfit_cells",
    # matrices
    "OrdinalDataset", "CorrelationMatrixResult", "fit_matrix",
    # simulation
    "MixtureSpec", "BivariateNormalComponent", "IndependentGumbelComponent",
    "PerformanceReport", "generate_pair", "generate_multivariate",
    "mixture_cell_probs", "run_study", "run_matrix_study",
    # errors
    "PolychoricError", "DomainError", "InvalidTheta", "EmptyTable",
    "EmptyCategory", "DegenerateMargin", "NoConvergence", "NearZeroCell",
    "NotPositiveDefinite", "ParseError", "CodeError", "ConfigError",
]
