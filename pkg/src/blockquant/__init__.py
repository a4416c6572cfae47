"""Sample quantiles of dependent data and the circular block bootstrap.

Submodules
----------
dist_models
    Marginal models with a local power law at the quantile, and ``g``.
process_gen
    Seeded stationary processes with a prescribed marginal.
quantile_core
    Empirical distribution, empirical quantile, Bahadur decomposition.
block_bootstrap
    Circular block bootstrap and block-length schedules.
experiments
    Monte Carlo experiments and their reports.
cli
    Command-line front end (``blockquant`` / ``python -m blockquant``).
"""
from .block_bootstrap import (
    BlockLengthSchedule,
    BootstrapPlan,
    BootstrapSample,
    block_length,
    bootstrap_bahadur_decompose,
    bootstrap_ecdf,
    bootstrap_quantile,
    expected_bootstrap_ecdf,
    resample,
)
from .dist_models import (
    GaussianModel,
    GTransform,
    PowerLocalModel,
    cdf,
    g_apply,
    g_inverse,
    local_expansion,
    model_from_dict,
    quantile,
)
from .experiments import (
    DegenerateVarianceError,
    ExperimentReport,
    LimitLawSpec,
    McConfig,
    ks_distance,
    long_run_variance_oracle,
    run_bahadur_experiment,
    run_bootstrap_consistency_experiment,
    run_clt_experiment,
    run_fixed_stream_experiment,
    run_inconsistency_experiment,
    sample_limit_law,
    z_rho_sampler,
)
from .process_gen import ProcessSpec, Sample, generate
from .quantile_core import BahadurDecomposition, Ecdf, bahadur_decompose, ecdf_eval, empirical_quantile

__version__ = "0.1.0"

__all__ = [
    "bahadur_decompose",
    "BahadurDecomposition",
    "block_length",
    "BlockLengthSchedule",
    "bootstrap_bahadur_decompose",
    "bootstrap_ecdf",
    "bootstrap_quantile",
    "BootstrapPlan",
    "BootstrapSample",
    "cdf",
    "DegenerateVarianceError",
    "Ecdf",
    "ecdf_eval",
    "empirical_quantile",
    "expected_bootstrap_ecdf",
    "ExperimentReport",
    "g_apply",
    "g_inverse",
    "GaussianModel",
    "generate",
    "GTransform",
    "ks_distance",
    "LimitLawSpec",
    "local_expansion",
    "long_run_variance_oracle",
    "McConfig",
    "model_from_dict",
    "PowerLocalModel",
    "ProcessSpec",
    "quantile",
    "resample",
    "run_bahadur_experiment",
    "run_bootstrap_consistency_experiment",
    "run_clt_experiment",
    "run_fixed_stream_experiment",
    "run_inconsistency_experiment",
    "Sample",
    "sample_limit_law",
    "z_rho_sampler",
]
