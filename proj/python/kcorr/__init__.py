"""Kernel correlation between random probability measures."""

from ._kcorr import (
    CapacityError,
    DegenerateVarianceError,
    FeasibilityError,
    InputError,
    InternalConsistencyError,
    KcorrError,
    calibrate_gaussian,
    calibrate_hdp,
    corr_hat,
    gen_data,
    kernel_corr_gauss_prior,
    kernel_eval,
    normalize_kernel,
    param_posterior_corr,
    posterior_corr_analytics,
    posterior_corr_sampling,
    prior_blocks,
    prior_corr_closed,
    prior_corr_sampling,
    run_convergence,
)

__all__ = [
    "CapacityError",
    "DegenerateVarianceError",
    "FeasibilityError",
    "InputError",
    "InternalConsistencyError",
    "KcorrError",
    "calibrate_gaussian",
    "calibrate_hdp",
    "corr_hat",
    "gen_data",
    "kernel_corr_gauss_prior",
    "kernel_eval",
    "normalize_kernel",
    "param_posterior_corr",
    "posterior_corr_analytics",
    "posterior_corr_sampling",
    "prior_blocks",
    "prior_corr_closed",
    "prior_corr_sampling",
    "run_convergence",
]
