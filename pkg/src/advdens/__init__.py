"""Adversarial nonparametric density estimation on the unit cube.

Spectral (cosine-basis) densities and estimators, closed-form integral
probability metrics over Sobolev ellipsoids, a coefficient-space GAN
projection solver with oracle-inequality checks, minimax lower-bound
constructions (Fano / Varshamov-Gilbert), and ReLU discriminator bound
calculators, with a CLI harness for rate-of-convergence experiments.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .estimators import (
    bias_variance_bound,
    empirical_coeffs,
    kde_estimator,
    optimal_cutoff,
    smoothed_estimator,
)
from .gan import GeneratorClass, gan_solve, oracle_check_matched, oracle_check_mismatched
from .harness import (
    RateExperimentConfig,
    RateReport,
    emit_report,
    load_report,
    run_rate_experiment,
    theoretical_exponent,
)
from .lowerbound import (
    VGCode,
    fano_bound,
    freq_hypotheses,
    kl_gaussian_sequence,
    separation,
    spatial_bump_family,
    vg_code,
)
from .metrics import (
    lipschitz_norm_report,
    sobolev_ipm,
    total_variation_band,
    wasserstein1_1d,
)
from .networks import (
    ReluNetwork,
    covering_bound,
    dudley_bound,
    lipschitz_cert,
    net_eval,
    rate_comparison,
    sobolev_enclosure,
)
from .sampling import (
    GaussianSequenceObservation,
    SampleSet,
    gaussian_sequence_observe,
    inverse_cdf_sample_1d,
    rejection_sample,
)
from .spectral import (
    CoefficientField,
    SobolevEllipsoid,
    basis_eval,
    density_eval,
    ellipsoid_norm,
    synth_density,
    uniform_density,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "CoefficientField",
    "SobolevEllipsoid",
    "basis_eval",
    "density_eval",
    "ellipsoid_norm",
    "synth_density",
    "uniform_density",
    "SampleSet",
    "GaussianSequenceObservation",
    "rejection_sample",
    "inverse_cdf_sample_1d",
    "gaussian_sequence_observe",
    "empirical_coeffs",
    "smoothed_estimator",
    "optimal_cutoff",
    "bias_variance_bound",
    "kde_estimator",
    "sobolev_ipm",
    "total_variation_band",
    "wasserstein1_1d",
    "lipschitz_norm_report",
    "GeneratorClass",
    "gan_solve",
    "oracle_check_matched",
    "oracle_check_mismatched",
    "VGCode",
    "vg_code",
    "freq_hypotheses",
    "separation",
    "kl_gaussian_sequence",
    "fano_bound",
    "spatial_bump_family",
    "ReluNetwork",
    "net_eval",
    "lipschitz_cert",
    "sobolev_enclosure",
    "covering_bound",
    "dudley_bound",
    "rate_comparison",
    "RateExperimentConfig",
    "RateReport",
    "run_rate_experiment",
    "theoretical_exponent",
    "emit_report",
    "load_report",
]
