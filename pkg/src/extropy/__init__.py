"""Nonparametric U-statistic estimators of cumulative residual extropy and
negative cumulative extropy for complete and right-censored lifetimes."""

__version__ = "0.1.0"

from .censored import IpcwWeights, estimate_ce_censored, estimate_cre_censored, ipcw_weights
from .complete import (
    EstimateResult,
    Measure,
    estimate_ce,
    estimate_ce_plugin,
    estimate_cre,
    estimate_cre_plugin,
    estimate_dynamic_cumulative_extropy,
    estimate_dynamic_survival_extropy,
    estimate_weighted_cumulative_extropy,
    estimate_weighted_dynamic_cumulative_extropy,
    estimate_weighted_dynamic_survival_extropy,
    estimate_weighted_survival_extropy,
)
from .errors import *  # noqa: F401,F403
from .inference import (
    InferenceMethod,
    InferenceResult,
    Kernel,
    bootstrap_censored,
    projection_values,
    variance_complete,
)
from .oracles import (
    Distribution,
    Family,
    PairKernel,
    calibrate_censoring_rate,
    naive_pairwise_oracle,
    true_ce,
    true_cre,
)
from .samples import (
    CensoredSample,
    EmpiricalDistribution,
    Sample,
    SortedSample,
    StepSurvival,
    empirical_cdf,
    km_censoring_survival,
    left_limit,
    sort_sample,
)
