"""Tests of H0: theta_j = theta0 for an eigenvector of the shape matrix.

* ``sign_test``: the sign statistic evaluated at the constrained Tyler shape.
* ``oracle_sign_test``: the same statistic at the true null shape (simulation only).
* ``tyler_lrt``: Tyler's likelihood-ratio-type test based on the M-estimator.
* ``anderson_lrt``: the Gaussian likelihood ratio test on the sample covariance.

All four are referred to the chi-square distribution with p - 1 degrees of freedom.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .chisq import chi2_quantile, chi2_sf
from .distributions import spatial_signs
from .errors import DimensionError, DomainError
from .linalg import SpectralDecomp, as_unit_vector, sym_eigen
from .shape import (
    _check_signs,
    _sign_cov_whitened,
    constrained_decomposition,
    fit_tyler,
    single_spike_decomposition,
)

METHODS = ("sign", "sign_oracle", "tyler_lrt", "anderson")


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False  # keep pytest from collecting this class

    statistic: float
    df: int
    p_value: float
    reject: bool
    method: str
    alpha: float


def make_outcome(statistic: float, df: int, alpha: float, method: str) -> TestOutcome:
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    statistic = max(float(statistic), 0.0)
    p_value = chi2_sf(statistic, df)
    reject = statistic > chi2_quantile(1.0 - alpha, df)
    return TestOutcome(statistic, df, p_value, bool(reject), method, alpha)


def _prepare(data, theta0, center=None):
    X = np.asarray(data, dtype=float)
    if X.ndim != 2:
        raise DimensionError("data must be an n x p matrix")
    if center is not None:
        center = np.asarray(center, dtype=float)
        if center.shape != (X.shape[1],):
            raise DimensionError("center has the wrong dimension")
        X = X - center
    theta0 = as_unit_vector(theta0, tol=1e-10)
    if theta0.shape[0] != X.shape[1]:
        raise DimensionError(f"theta0 has dimension {theta0.shape[0]}, data has {X.shape[1]} columns")
    return X, theta0


def _sign_statistic_root(U, W, theta0) -> float:
    n, p = U.shape
    S = _sign_cov_whitened(U, W)
    v = S @ theta0
    v -= theta0 * (theta0 @ v)
    return n * p * (p + 2) * float(v @ v)


def sign_statistic(U, V, theta0) -> float:
    """n p (p+2) |(I - theta0 theta0') S_n(V) theta0|^2."""
    U = _check_signs(U)
    theta0 = as_unit_vector(theta0, tol=1e-10)
    decomp = V if isinstance(V, SpectralDecomp) else sym_eigen(V)
    if not (U.shape[1] == decomp.dim == theta0.shape[0]):
        raise DimensionError("dimension mismatch between signs, shape and theta0")
    return _sign_statistic_root(U, decomp.power(-0.5), theta0)


def _tyler_lrt_stat(n: int, decomp: SpectralDecomp, theta0, j: int) -> float:
    p = decomp.dim
    lam = decomp.eigenvalues
    coef = decomp.eigenvectors.T @ theta0
    quad_inv = float(np.sum(coef**2 / lam))
    quad = float(np.sum(coef**2 * lam))
    lj = lam[j - 1]
    return n * p / (p + 2) * (lj * quad_inv + quad / lj - 2.0)


def _anderson_stat(X, theta0, j: int) -> float:
    n = X.shape[0]
    decomp = sym_eigen(X.T @ X / n)
    if decomp.eigenvalues[-1] <= 0:
        raise DomainError("sample covariance is singular")
    lam = decomp.eigenvalues
    coef = decomp.eigenvectors.T @ theta0
    lj = lam[j - 1]
    return n * (lj * float(np.sum(coef**2 / lam)) + float(np.sum(coef**2 * lam)) / lj - 2.0)


def _check_index(j: int, p: int, single_spike: bool = False) -> None:
    if not 1 <= j <= p:
        raise DomainError(f"eigen index must lie in 1..{p}, got {j}")
    if single_spike and j != 1:
        raise DomainError("the single-spike null shape is only defined for the leading eigenvector")


def sign_test(data, theta0, alpha: float = 0.05, j: int = 1, single_spike: bool = False, center=None) -> TestOutcome:
    """Sign test: signs -> Tyler shape -> constrained null shape -> sign statistic."""
    X, theta0 = _prepare(data, theta0, center)
    U = spatial_signs(X)
    _check_index(j, U.shape[1], single_spike)
    vhat = sym_eigen(fit_tyler(U).shape)
    null = single_spike_decomposition(vhat, theta0) if single_spike else constrained_decomposition(vhat, theta0, j)
    stat = _sign_statistic_root(U, null.power(-0.5), theta0)
    return make_outcome(stat, U.shape[1] - 1, alpha, "sign")


def tyler_lrt(data, theta0, alpha: float = 0.05, j: int = 1, center=None) -> TestOutcome:
    """(np/(p+2)) (l_j theta0' V^-1 theta0 + theta0' V theta0 / l_j - 2) with V Tyler's shape."""
    X, theta0 = _prepare(data, theta0, center)
    U = spatial_signs(X)
    _check_index(j, U.shape[1])
    vhat = sym_eigen(fit_tyler(U).shape)
    stat = _tyler_lrt_stat(U.shape[0], vhat, theta0, j)
    return make_outcome(stat, U.shape[1] - 1, alpha, "tyler_lrt")


def anderson_lrt(data, theta0, alpha: float = 0.05, j: int = 1, center=None) -> TestOutcome:
    """n (l_j theta0' S^-1 theta0 + theta0' S theta0 / l_j - 2), S = X'X/n (known zero location)."""
    X, theta0 = _prepare(data, theta0, center)
    n, p = X.shape
    if n <= p:
        raise DomainError(f"Anderson's test needs n > p (got n={n}, p={p})")
    _check_index(j, p)
    return make_outcome(_anderson_stat(X, theta0, j), p - 1, alpha, "anderson")


def oracle_sign_test(U, V0, theta0, alpha: float = 0.05) -> TestOutcome:
    """Infeasible sign test using the true null shape V0."""
    U = _check_signs(U)
    stat = sign_statistic(U, V0, theta0)
    return make_outcome(stat, U.shape[1] - 1, alpha, "sign_oracle")


def run_methods(
    data,
    theta0,
    methods: Iterable[str],
    alpha: float = 0.05,
    null_shape: Optional[SpectralDecomp] = None,
    j: int = 1,
) -> dict:
    """Evaluate several tests on one sample, fitting Tyler's estimator once.

    ``null_shape`` (the true V0, as a decomposition) is required for
    ``sign_oracle``. Returns a dict method -> TestOutcome.
    """
    methods = list(methods)
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise DomainError(f"unknown methods {sorted(unknown)}")
    X, theta0 = _prepare(data, theta0)
    n, p = X.shape
    df = p - 1
    out = {}
    U = None
    if any(m != "anderson" for m in methods):
        U = spatial_signs(X)
    vhat = None
    if "sign" in methods or "tyler_lrt" in methods:
        vhat = sym_eigen(fit_tyler(U).shape)
    for m in methods:
        if m == "sign":
            null = constrained_decomposition(vhat, theta0, j)
            stat = _sign_statistic_root(U, null.power(-0.5), theta0)
        elif m == "tyler_lrt":
            stat = _tyler_lrt_stat(n, vhat, theta0, j)
        elif m == "anderson":
            stat = _anderson_stat(X, theta0, j)
        else:
            if null_shape is None:
                raise DomainError("sign_oracle needs the true null shape")
            stat = _sign_statistic_root(U, null_shape.power(-0.5), theta0)
        out[m] = make_outcome(stat, df, alpha, m)
    return out
