"""Fitting, testing and automated order selection for r-largest extremes."""

from .distributions import (
    GevParams,
    KumGevParams,
    RLargestSample,
    gev_cdf,
    gev_quantile,
    gevr_log_likelihood,
    kumgev_cdf,
    kumgev_quantile,
    sample_gevr,
    sample_truncated_kumgev,
)
from .inference import (
    FitResult,
    ReturnLevelEstimate,
    block_score,
    expected_information,
    expected_moment_h,
    fit_gevr,
    information,
    profile_ci_return_level,
    return_level,
)

__version__ = "0.1.0"
