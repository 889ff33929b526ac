"""Small dense symmetric linear algebra.

Everything here works on p x p matrices with p at most a few dozen, so the
eigensolver is a cyclic Jacobi method written on plain Python lists, which
beats numpy's per-call overhead at these sizes and is accurate to a few ulps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError, NumericFailure, RankDeficiencyError

JACOBI_MAX_SWEEPS = 100
JACOBI_TOL = 1e-12
SIGN_THRESHOLD = 1e-9
GS_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class SpectralDecomp:
    """Eigenvalues sorted descending, eigenvectors as matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        return self.apply(lambda lam: lam)

    def apply(self, func) -> np.ndarray:
        """Return sum_j func(lambda_j) theta_j theta_j'."""
        Q = self.eigenvectors
        M = (Q * func(self.eigenvalues)) @ Q.T
        return symmetrize(M)

    def power(self, a: float) -> np.ndarray:
        if np.any(self.eigenvalues <= 0):
            raise DomainError("matrix power of a non positive-definite matrix")
        return self.apply(lambda lam: lam**a)


def symmetrize(A) -> np.ndarray:
    """Return (A + A')/2, which is exactly symmetric in floating point."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    return 0.5 * (A + A.T)


def as_unit_vector(v, tol: float = 1e-12) -> np.ndarray:
    """Validate that ``v`` is a unit vector and return it as a float array."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DimensionError("expected a 1-d vector")
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise DomainError(f"vector is not of unit norm (|v| = {np.linalg.norm(v)!r})")
    return v


def jacobi_eigen(A, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigenvalue iteration.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` in the order the rotations
    leave them (unsorted). Convergence is declared once the off-diagonal
    Frobenius norm is at most ``tol`` times the Frobenius norm of ``A``.
    """
    A = symmetrize(A)
    p = A.shape[0]
    a = A.tolist()
    q = np.eye(p).tolist()
    scale = math.sqrt(sum(x * x for row in a for x in row))
    threshold = tol * scale

    for sweep in range(max_sweeps + 1):
        off = math.sqrt(sum(a[i][j] ** 2 for i in range(p) for j in range(p) if i != j))
        if off <= threshold:
            values = np.array([a[i][i] for i in range(p)])
            return values, np.array(q), sweep
        if sweep == max_sweeps:
            break
        for i in range(p - 1):
            for j in range(i + 1, p):
                aij = a[i][j]
                if aij == 0.0:
                    continue
                theta = (a[j][j] - a[i][i]) / (2.0 * aij)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for row in a:
                    x, y = row[i], row[j]
                    row[i] = c * x - s * y
                    row[j] = s * x + c * y
                ai, aj = a[i], a[j]
                for k in range(p):
                    x, y = ai[k], aj[k]
                    ai[k] = c * x - s * y
                    aj[k] = s * x + c * y
                for row in q:
                    x, y = row[i], row[j]
                    row[i] = c * x - s * y
                    row[j] = s * x + c * y
    raise NumericFailure(
        f"Jacobi eigensolver did not converge in {max_sweeps} sweeps (off-diagonal norm {off:.3e})"
    )


def fix_signs(Q: np.ndarray, threshold: float = SIGN_THRESHOLD) -> np.ndarray:
    """Flip columns so the first entry with |x| > threshold is positive."""
    Q = np.array(Q, dtype=float)
    for j in range(Q.shape[1]):
        col = Q[:, j]
        big = np.flatnonzero(np.abs(col) > threshold)
        if big.size and col[big[0]] < 0:
            Q[:, j] = -col
    return Q


def sym_eigen(A) -> SpectralDecomp:
    """Eigendecomposition of a symmetric matrix with a deterministic sign convention."""
    values, vectors, _ = jacobi_eigen(A)
    order = np.argsort(-values, kind="stable")
    return SpectralDecomp(values[order], fix_signs(vectors[:, order]))


def sym_power(A, a: float) -> np.ndarray:
    """Generic matrix power of a symmetric positive-definite matrix."""
    return sym_eigen(A).power(a)


def projector(theta) -> np.ndarray:
    """Orthogonal projector I - theta theta' onto the complement of a unit vector."""
    theta = np.asarray(theta, dtype=float)
    return np.eye(theta.shape[0]) - np.outer(theta, theta)


def _spike_eigenvalues(p: int, deltaxi: float):
    r = 1.0 - deltaxi / p
    s = 1.0 + (p - 1) * deltaxi / p
    if r <= 0 or s <= 0:
        raise DomainError(f"spike strength {deltaxi!r} does not give a positive-definite shape for p={p}")
    return r, s


def spike_power(p: int, theta0, deltaxi: float, a: float) -> np.ndarray:
    """a-th power of (1 - dxi/p) I + dxi theta0 theta0' in closed form.

    With r = 1 - dxi/p and s = 1 + (p-1) dxi/p the result is
    r^a I + (s^a - r^a) theta0 theta0'.
    """
    theta0 = as_unit_vector(theta0, tol=1e-10)
    if theta0.shape[0] != p:
        raise DimensionError("theta0 has the wrong dimension")
    r, s = _spike_eigenvalues(p, deltaxi)
    lam_a = s**a - r**a
    return symmetrize(r**a * np.eye(p) + lam_a * np.outer(theta0, theta0))


def spike_lambda(p: int, deltaxi: float, a: float) -> float:
    """The coefficient s^a - r^a of theta0 theta0' in :func:`spike_power`."""
    r, s = _spike_eigenvalues(p, deltaxi)
    return s**a - r**a


def gram_schmidt_against(theta0, vecs: Sequence, tol: float = GS_RESIDUAL_TOL) -> list:
    """Orthonormalise ``vecs`` against ``theta0`` and against each other, in order.

    Each output is (I - theta0 theta0' - sum_{k<j} t_k t_k') v_j normalised,
    the classical recursion. Raises RankDeficiencyError when a projected
    residual has norm below ``tol``.
    """
    theta0 = as_unit_vector(theta0, tol=1e-10)
    p = theta0.shape[0]
    if len(vecs) != p - 1:
        raise DimensionError(f"expected {p - 1} vectors, got {len(vecs)}")
    basis = [theta0]
    out = []
    for j, v in enumerate(vecs):
        v = np.asarray(v, dtype=float)
        if v.shape != (p,):
            raise DimensionError("vector dimension mismatch")
        resid = v.copy()
        for b in basis:
            resid -= b * (b @ v)
        norm = np.linalg.norm(resid)
        if norm < tol:
            raise RankDeficiencyError(f"vector {j} is (numerically) in the span of its predecessors")
        t = resid / norm
        basis.append(t)
        out.append(t)
    return out


def vec(A) -> np.ndarray:
    """Stack the columns of A."""
    return np.asarray(A).reshape(-1, order="F")


def commutation_matrix(p: int) -> np.ndarray:
    """K_p, the p^2 x p^2 matrix with K_p vec(A) = vec(A')."""
    if p < 2:
        raise DomainError("p must be at least 2")
    K = np.zeros((p * p, p * p))
    for i in range(p):
        for j in range(p):
            K[j * p + i, i * p + j] = 1.0
    return K


def j_matrix(p: int) -> np.ndarray:
    """J_p = vec(I_p) vec(I_p)'."""
    if p < 2:
        raise DomainError("p must be at least 2")
    v = vec(np.eye(p))
    return np.outer(v, v)
