"""Weighted-moment estimation for mixtures with varying concentrations.

Minimax-weighted component means, a linear-time jackknife estimator of
their asymptotic covariance, orthogonal errors-in-variables regression
per mixture component, and chi-square confidence sets built from the
jackknife covariance.
"""

from .errors import (
    ConfigError,
    DegenerateSlope,
    DimensionMismatch,
    DomainError,
    EntryOutOfRange,
    LeverageAtOne,
    MvcError,
    NegativeVariance,
    ParseError,
    RowSumViolation,
    SingularACM,
    SingularGram,
    StatisticEvaluationError,
    UnsupportedDimension,
)
from .mvc_core import (
    ComponentMeans,
    ConcentrationMatrix,
    GramMatrix,
    ObservationMatrix,
    WeightMatrix,
    gram,
    minimax_weights,
    validate_concentrations,
    weighted_means,
)
from .jackknife import (
    JackknifeACM,
    LeverageVector,
    SmoothStatistic,
    jackknife_acm_all,
    jackknife_acm_fast,
    jackknife_acm_naive,
    leverages,
    loo_gram_inverse,
    loo_mean_update,
)
from .eiv_regression import (
    ComponentFit,
    PairedSample,
    RegressionCoefficients,
    centered_moments,
    expand_observations,
    fit_mixture_eiv,
    orthogonal_fit,
    regression_statistic,
)
from .inference import (
    ConfidenceEllipsoid,
    ConfidenceInterval,
    chi2_quantile_2df,
    ellipsoid,
    interval,
    normal_quantile,
    t_statistic,
)
from .sim_harness import (
    ComponentCoverage,
    CoverageReport,
    ExperimentConfig,
    design_concentrations,
    gen_sample,
    preset,
    run_experiment,
    student_t_sample,
)

__version__ = "0.1.0"
