"""Sign covariance, Tyler's shape estimator and the constrained null shape."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ConvergenceError, DimensionError, DomainError, InsufficientDataError
from .linalg import SpectralDecomp, as_unit_vector, gram_schmidt_against, sym_eigen, symmetrize

TYLER_TOL = 1e-10
TYLER_MAX_ITER = 500
GENERAL_POSITION_COND = 1e12


def _check_signs(U) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    if U.ndim != 2 or U.shape[0] < 1:
        raise DimensionError("signs must be an n x p array with n >= 1")
    if np.max(np.abs(np.linalg.norm(U, axis=1) - 1.0)) > 1e-8:
        raise DomainError("sign sample rows must be unit vectors")
    return U


def _sign_cov_whitened(U: np.ndarray, W: np.ndarray) -> np.ndarray:
    # rows of U @ W are V^{-1/2} u_i when W is the symmetric root V^{-1/2}
    Z = U @ W
    Z /= np.linalg.norm(Z, axis=1)[:, None]
    return symmetrize(Z.T @ Z / U.shape[0])


def sign_cov(U, V) -> np.ndarray:
    """S_n(V) = mean of V^{-1/2} u u' V^{-1/2} / |V^{-1/2} u|^2 (symmetric root)."""
    U = _check_signs(U)
    decomp = V if isinstance(V, SpectralDecomp) else sym_eigen(V)
    if decomp.dim != U.shape[1]:
        raise DimensionError("sample and shape dimensions differ")
    return _sign_cov_whitened(U, decomp.power(-0.5))


@dataclass(frozen=True)
class TylerFit:
    shape: np.ndarray
    residual: float
    iterations: int


def fit_tyler(U, tol: float = TYLER_TOL, max_iter: int = TYLER_MAX_ITER) -> TylerFit:
    """Tyler's M-estimator of shape by fixed-point iteration from the identity.

    Each step is V <- sum u u' / (u' V^{-1} u), rescaled to trace p. The stopping
    rule is |S_n(V) - I/p|_F <= tol. The residual is evaluated through the
    Cholesky factor L of V instead of the symmetric root: L^{-1} = Q V^{-1/2}
    with Q orthogonal, so the Frobenius distance to I/p is the same.
    """
    U = _check_signs(U)
    n, p = U.shape
    if n <= p:
        raise InsufficientDataError(f"Tyler's estimator needs n > p (got n={n}, p={p})")
    if np.linalg.cond(U.T @ U) > GENERAL_POSITION_COND:
        raise DomainError("signs are not in general position (scatter of signs is singular)")

    target = np.eye(p) / p
    V = np.eye(p)
    residual = np.inf
    for it in range(max_iter + 1):
        L = np.linalg.cholesky(V)
        Z = solve_triangular(L, U.T, lower=True, check_finite=False)
        Z /= np.sqrt(np.einsum("ij,ij->j", Z, Z))
        S = Z @ Z.T / n
        residual = float(np.linalg.norm(S - target))
        if residual <= tol:
            return TylerFit(symmetrize(V), residual, it)
        if it == max_iter:
            break
        V = symmetrize(L @ S @ L.T)
        V *= p / np.trace(V)
    raise ConvergenceError(
        f"Tyler iteration did not reach tolerance {tol:g} in {max_iter} steps (residual {residual:.3e})",
        residual=residual,
        iterations=max_iter,
    )


def tyler_shape(U, tol: float = TYLER_TOL, max_iter: int = TYLER_MAX_ITER) -> np.ndarray:
    """Shape matrix V (trace p) solving S_n(V) = I/p."""
    return fit_tyler(U, tol=tol, max_iter=max_iter).shape


def constrained_decomposition(vhat, theta0, j: int = 1) -> SpectralDecomp:
    """Spectral decomposition of the null-constrained shape estimate.

    Keeps the eigenvalues of ``vhat`` and puts ``theta0`` in position j; the
    other Tyler eigenvectors, in descending-eigenvalue order with the j-th one
    removed, are Gram-Schmidt orthogonalised against theta0 to fill the rest.
    """
    decomp = vhat if isinstance(vhat, SpectralDecomp) else sym_eigen(vhat)
    theta0 = as_unit_vector(theta0, tol=1e-10)
    p = decomp.dim
    if theta0.shape[0] != p:
        raise DimensionError("theta0 and shape dimensions differ")
    if not 1 <= j <= p:
        raise DomainError(f"eigen index must lie in 1..{p}, got {j}")
    others = [decomp.eigenvectors[:, k] for k in range(p) if k != j - 1]
    rest = gram_schmidt_against(theta0, others)
    basis = rest[: j - 1] + [theta0] + rest[j - 1 :]
    return SpectralDecomp(decomp.eigenvalues.copy(), np.column_stack(basis))


def constrained_shape(vhat, theta0, j: int = 1) -> np.ndarray:
    """Null shape estimate lambda_j theta0 theta0' + sum_{k != j} lambda_k t_k t_k'."""
    return constrained_decomposition(vhat, theta0, j).reconstruct()


def single_spike_decomposition(vhat, theta0) -> SpectralDecomp:
    decomp = vhat if isinstance(vhat, SpectralDecomp) else sym_eigen(vhat)
    theta0 = as_unit_vector(theta0, tol=1e-10)
    p = decomp.dim
    if theta0.shape[0] != p:
        raise DimensionError("theta0 and shape dimensions differ")
    lam = decomp.eigenvalues
    rest = lam[1:].sum() / (p - 1)
    # any orthonormal completion of theta0 will do; the spectrum is flat there
    E = np.eye(p)
    start = [E[:, k] for k in range(p) if k != int(np.argmax(np.abs(theta0)))]
    basis = [theta0] + gram_schmidt_against(theta0, start)
    return SpectralDecomp(np.concatenate([[lam[0]], np.full(p - 1, rest)]), np.column_stack(basis))


def constrained_shape_single_spike(vhat, theta0) -> np.ndarray:
    """lambda_1 theta0 theta0' + mean(lambda_2..lambda_p) (I - theta0 theta0')."""
    decomp = vhat if isinstance(vhat, SpectralDecomp) else sym_eigen(vhat)
    theta0 = as_unit_vector(theta0, tol=1e-10)
    p = decomp.dim
    lam = decomp.eigenvalues
    rest = lam[1:].sum() / (p - 1)
    P = np.outer(theta0, theta0)
    return symmetrize(lam[0] * P + rest * (np.eye(p) - P))
