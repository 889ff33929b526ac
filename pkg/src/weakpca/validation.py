"""Seeded Monte Carlo experiments that check the asymptotic theory numerically.

Each function draws replication r from stream (seed, tag * 2^32 + r), where
``tag`` identifies the experiment, so the values are reproducible and
independent across experiments sharing a seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chisq import chi2_cdf
from .distributions import RngStream, angular_gaussian_logpdf, sample_angular_gaussian
from .lecam import (
    Perturbation,
    SpikeModel,
    build_alt_shape,
    build_null_shape,
    central_sequence,
    lan_quadratic,
    log_likelihood_ratio,
    make_perturbation,
    nu_n,
    upsilon_matrix,
)
from .linalg import commutation_matrix, j_matrix, spike_power, sym_eigen, vec
from .shape import constrained_decomposition, fit_tyler
from .stattests import _sign_statistic_root, _tyler_lrt_stat

DEFAULT_SEED = 20190705


def _stream(seed: int, tag: int, r: int) -> RngStream:
    return RngStream(seed, (tag << 32) | r)


def _e(p: int, k: int = 0) -> np.ndarray:
    e = np.zeros(p)
    e[k] = 1.0
    return e


# ---------------------------------------------------------------- sign tests


@dataclass(frozen=True)
class EquivalenceGaps:
    n: int
    M: int
    mean_abs_oracle_gap: float
    mean_abs_lrt_gap: float


def equivalence_gaps(n: int, M: int = 500, p: int = 6, delta: float = 1.0, xi: float = 1.0, seed: int = DEFAULT_SEED) -> EquivalenceGaps:
    """Mean |T(V~0) - T(V0)| and mean |T(V~0) - L| under a single-spike null."""
    theta0 = _e(p)
    V0 = spike_power(p, theta0, delta * xi, 1.0)
    W0 = spike_power(p, theta0, delta * xi, -0.5)
    oracle_gap = lrt_gap = 0.0
    for r in range(M):
        U = sample_angular_gaussian(V0, n, _stream(seed, 4, r))
        vhat = sym_eigen(fit_tyler(U).shape)
        t_hat = _sign_statistic_root(U, constrained_decomposition(vhat, theta0).power(-0.5), theta0)
        oracle_gap += abs(t_hat - _sign_statistic_root(U, W0, theta0))
        lrt_gap += abs(t_hat - _tyler_lrt_stat(n, vhat, theta0, 1))
    return EquivalenceGaps(n, M, float(oracle_gap / M), float(lrt_gap / M))


def ks_statistic_chi2(values, df: int) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF of ``values`` and chi2_df."""
    x = np.sort(np.asarray(values, dtype=float))
    m = x.shape[0]
    F = np.array([chi2_cdf(max(v, 0.0), df) for v in x])
    upper = np.arange(1, m + 1) / m - F
    lower = F - np.arange(0, m) / m
    return float(max(upper.max(), lower.max()))


def null_sign_statistics(scatter, n: int, M: int, theta0=None, seed: int = DEFAULT_SEED, tag: int = 5) -> np.ndarray:
    """M draws of the feasible sign statistic under a null with the given scatter.

    ``theta0`` defaults to the leading eigenvector of ``scatter``.
    """
    scatter = np.asarray(scatter, dtype=float)
    scatter = scatter * scatter.shape[0] / np.trace(scatter)
    if theta0 is None:
        theta0 = sym_eigen(scatter).eigenvectors[:, 0]
    out = np.empty(M)
    for r in range(M):
        U = sample_angular_gaussian(scatter, n, _stream(seed, tag, r))
        vhat = sym_eigen(fit_tyler(U).shape)
        out[r] = _sign_statistic_root(U, constrained_decomposition(vhat, theta0).power(-0.5), theta0)
    return out


# ------------------------------------------------------------ Le Cam checks


def llr_logpdf_discrepancy(cases: int = 1000, seed: int = DEFAULT_SEED) -> float:
    """Largest |exact LLR - summed logpdf difference| over random models and samples."""
    worst = 0.0
    for r in range(cases):
        rng = _stream(seed, 1, r).generator()
        p = int(rng.integers(2, 9))
        n = int(rng.integers(1, 60))
        theta0 = rng.standard_normal(p)
        theta0 /= np.linalg.norm(theta0)
        xi = float(rng.uniform(0.2, 3.0))
        delta = float(rng.uniform(0.01, 0.99)) * p / xi
        model = SpikeModel(p, theta0, xi, delta)
        nu = float(rng.uniform(0.05, 1.0))
        ell = float(rng.uniform(0.0, 2.0 / nu))
        pert = make_perturbation(theta0, rng.standard_normal(p), ell, nu)
        U = sample_angular_gaussian(build_null_shape(model), n, rng)
        exact = log_likelihood_ratio(U, model, pert)
        direct = float(np.sum(angular_gaussian_logpdf(U, build_alt_shape(model, pert))
                              - angular_gaussian_logpdf(U, build_null_shape(model))))
        worst = max(worst, abs(exact - direct))
    return worst


@dataclass(frozen=True)
class RegimeSetup:
    """Spike strength delta_n = n^-rate and the perturbation step for one regime."""

    kind: str
    rate: float
    xi: float = 1.0
    critical_shortcut: bool = False

    def model(self, p: int, n: int) -> SpikeModel:
        return SpikeModel(p, _e(p), self.xi, float(n) ** (-self.rate))

    def perturbation(self, model: SpikeModel, n: int, ell: float) -> Perturbation:
        nu = nu_n(model, n, self.critical_shortcut)
        return make_perturbation(model.theta0, _e(model.p, 1), ell, nu)


REGIME_SETUPS = {
    "classical": RegimeSetup("classical", 0.0),
    "weak": RegimeSetup("weak", 0.25),
    "critical": RegimeSetup("critical", 0.5),
    "degenerate": RegimeSetup("degenerate", 0.75, critical_shortcut=True),
}


def llr_draws(setup: RegimeSetup, n: int, ell: float, M: int, p: int = 6, seed: int = DEFAULT_SEED,
              with_quadratic: bool = False):
    """M exact log-likelihood ratios under H0 (and, optionally, the LAN/LAQ approximations)."""
    model = setup.model(p, n)
    pert = setup.perturbation(model, n, ell)
    V0 = build_null_shape(model)
    llr = np.empty(M)
    quad = np.empty(M) if with_quadratic else None
    tag = 10 + list(REGIME_SETUPS).index(setup.kind) if setup.kind in REGIME_SETUPS else 19
    for r in range(M):
        U = sample_angular_gaussian(V0, n, _stream(seed, tag, r))
        llr[r] = log_likelihood_ratio(U, model, pert)
        if with_quadratic:
            if setup.kind == "critical":
                stat = upsilon_matrix(U, model)
            else:
                stat = central_sequence(U, model, setup.kind)
            quad[r] = lan_quadratic(setup.kind, pert.tau, model.theta0, model.xi, stat)
    return (llr, quad) if with_quadratic else llr


def lan_remainder_median(kind: str, n: int, ell: float, M: int = 1000, p: int = 6, seed: int = DEFAULT_SEED) -> float:
    llr, quad = llr_draws(REGIME_SETUPS[kind], n, ell, M, p, seed, with_quadratic=True)
    return float(np.median(np.abs(llr - quad)))


def degenerate_llr_quantile(n: int, ell: float, M: int = 2000, q: float = 0.95, p: int = 6, seed: int = DEFAULT_SEED) -> float:
    llr = llr_draws(REGIME_SETUPS["degenerate"], n, ell, M, p, seed)
    return float(np.quantile(np.abs(llr), q))


def mean_likelihood_ratio(kind: str, n: int, ell: float, M: int = 2000, p: int = 6, seed: int = DEFAULT_SEED) -> float:
    return float(np.mean(np.exp(llr_draws(REGIME_SETUPS[kind], n, ell, M, p, seed))))


def central_sequence_covariance(n: int, M: int = 2000, p: int = 6, kind: str = "weak", seed: int = DEFAULT_SEED):
    """Empirical covariance of Delta under H0 and the information matrix it should match."""
    setup = REGIME_SETUPS[kind]
    model = setup.model(p, n)
    V0 = build_null_shape(model)
    D = np.empty((M, p))
    for r in range(M):
        D[r] = central_sequence(sample_angular_gaussian(V0, n, _stream(seed, 20, r)), model, kind)
    P = np.eye(p) - np.outer(model.theta0, model.theta0)
    return np.cov(D, rowvar=False), p / (p + 2) * P


def upsilon_covariance(n: int, M: int = 2000, p: int = 3, seed: int = DEFAULT_SEED):
    """Empirical covariance of vec(Upsilon) under H0 and (p/(p+2))(I + K + J) - J."""
    setup = REGIME_SETUPS["critical"]
    model = setup.model(p, n)
    V0 = build_null_shape(model)
    Y = np.empty((M, p * p))
    for r in range(M):
        Y[r] = vec(upsilon_matrix(sample_angular_gaussian(V0, n, _stream(seed, 21, r)), model))
    J = j_matrix(p)
    target = p / (p + 2) * (np.eye(p * p) + commutation_matrix(p) + J) - J
    return np.cov(Y, rowvar=False), target
