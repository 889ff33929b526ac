"""Sign tests for weakly identified principal directions."""

from .errors import (
    ConvergenceError,
    DimensionError,
    DomainError,
    InsufficientDataError,
    NumericFailure,
    RankDeficiencyError,
    WeakPCAError,
)
from .linalg import SpectralDecomp, commutation_matrix, gram_schmidt_against, j_matrix, spike_power, sym_eigen
from .chisq import chi2_cdf, chi2_quantile, chi2_sf, noncentral_chi2_cdf
from .distributions import (
    EllipticalSpec,
    RngStream,
    angular_gaussian_logpdf,
    sample_angular_gaussian,
    sample_elliptical,
    sample_sphere,
    spatial_signs,
)
from .shape import constrained_shape, constrained_shape_single_spike, fit_tyler, sign_cov, tyler_shape
from .stattests import TestOutcome, anderson_lrt, oracle_sign_test, sign_statistic, sign_test, tyler_lrt
from .lecam import (
    Perturbation,
    RegimeTag,
    SpikeModel,
    build_alt_shape,
    build_null_shape,
    central_sequence,
    gamma_n,
    lan_quadratic,
    log_likelihood_ratio,
    make_perturbation,
    upsilon_matrix,
)
from .power import PowerQuery, asymptotic_power, noncentrality, theoretical_curve
from .montecarlo import ScenarioConfig, ResultRow, build_scatter, compare_to_theory, preset, run_scenario

__version__ = "0.1.0"
