"""Classical mockup sampling and benchmarking for Gaussian boson sampling
experiments with threshold detectors."""

from .gaussian_state import (
    GBSInstance,
    GaussianState,
    build_input_covariance,
    build_output_covariance,
    reduce_state,
)
from .instances import random_instance
from .probability import (
    ClickPattern,
    MarginalTable,
    bitstring_probability,
    marginal_table,
    spin_moments,
    torontonian,
)
from .samplers import (
    BoltzmannMachine,
    IsingModel,
    SampleSet,
    as_marginal_oracle,
    bm_exact_distribution,
    decorrelate,
    fit_tap,
    gibbs_sample,
    greedy_sample,
    sample_thermal,
    sample_uniform,
    train_exact_bm,
)
from .metrics import (
    MetricReport,
    UrsellValue,
    click_moments_empirical,
    click_moments_theoretical,
    delta_bounds,
    empirical_marginal_table,
    fit_click_gaussian,
    hog_rate,
    kl,
    pearson_bootstrap,
    surjection_count,
    tvd,
    ursell,
    ursell_empirical,
    ursell_mgf,
    xe_estimate,
)
from .data_io import (
    import_ustc,
    load_instance,
    load_report,
    load_samples,
    save_instance,
    save_report,
    save_samples,
)

__version__ = "0.1.0"

__all__ = [
    "GBSInstance",
    "GaussianState",
    "build_input_covariance",
    "build_output_covariance",
    "reduce_state",
    "random_instance",
    "ClickPattern",
    "MarginalTable",
    "bitstring_probability",
    "marginal_table",
    "spin_moments",
    "torontonian",
    "BoltzmannMachine",
    "IsingModel",
    "SampleSet",
    "as_marginal_oracle",
    "bm_exact_distribution",
    "decorrelate",
    "fit_tap",
    "gibbs_sample",
    "greedy_sample",
    "sample_thermal",
    "sample_uniform",
    "train_exact_bm",
    "MetricReport",
    "UrsellValue",
    "click_moments_empirical",
    "click_moments_theoretical",
    "delta_bounds",
    "empirical_marginal_table",
    "fit_click_gaussian",
    "hog_rate",
    "kl",
    "pearson_bootstrap",
    "surjection_count",
    "tvd",
    "ursell",
    "ursell_empirical",
    "ursell_mgf",
    "xe_estimate",
    "import_ustc",
    "load_instance",
    "load_report",
    "load_samples",
    "save_instance",
    "save_report",
    "save_samples",
]
