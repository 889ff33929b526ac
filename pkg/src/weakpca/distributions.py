"""Reproducible sampling: uniform sphere, Gaussian / Student t, angular Gaussian.

Random streams are Philox (counter-based) generators keyed by a master seed
and a stream index through ``numpy.random.SeedSequence``; any replication of
any experiment can be regenerated in isolation from ``(seed, index)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import DimensionError, DomainError
from .linalg import SpectralDecomp, sym_eigen, symmetrize

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """A (master seed, stream index) pair naming an independent random stream."""

    seed: int
    index: int = 0

    def __post_init__(self):
        if not (0 <= self.seed <= _MASK64 and 0 <= self.index <= _MASK64):
            raise DomainError("seed and stream index must be 64-bit unsigned integers")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.index,))
        return np.random.Generator(np.random.Philox(ss))


RngLike = Union[RngStream, np.random.Generator, int]


def as_generator(rng: RngLike) -> np.random.Generator:
    """Accept a stream, a ready generator, or a bare integer seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng)).generator()
    raise TypeError(f"cannot build a random generator from {type(rng).__name__}")


@dataclass(frozen=True)
class EllipticalSpec:
    """A centred Gaussian or Student-t law with the given scatter matrix.

    ``df`` is only used by the ``"student"`` family and may be any positive
    real (``df <= 2`` is allowed: sign procedures never see the radii).
    """

    family: str
    scatter: np.ndarray
    df: Optional[float] = None
    _decomp: SpectralDecomp = field(init=False, repr=False, compare=False)
    _root: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in ("gaussian", "student"):
            raise DomainError(f"unknown family {self.family!r}")
        if self.family == "student" and not (self.df is not None and self.df > 0):
            raise DomainError("student family needs df > 0")
        scatter = symmetrize(self.scatter)
        if scatter.shape[0] < 2:
            raise DimensionError("dimension must be at least 2")
        decomp = sym_eigen(scatter)
        if decomp.eigenvalues[-1] <= 0:
            raise DomainError("scatter matrix is not positive definite")
        object.__setattr__(self, "scatter", scatter)
        object.__setattr__(self, "_decomp", decomp)
        object.__setattr__(self, "_root", decomp.power(0.5))

    @property
    def dim(self) -> int:
        return self.scatter.shape[0]

    @property
    def root(self) -> np.ndarray:
        """Symmetric square root of the scatter matrix."""
        return self._root

    @classmethod
    def gaussian(cls, scatter) -> "EllipticalSpec":
        return cls("gaussian", np.asarray(scatter, dtype=float))

    @classmethod
    def student(cls, scatter, df: float) -> "EllipticalSpec":
        return cls("student", np.asarray(scatter, dtype=float), float(df))


def sample_sphere(p: int, rng: RngLike, size: Optional[int] = None) -> np.ndarray:
    """Uniform draws on the unit sphere of R^p (one vector, or ``size`` rows)."""
    if p < 2:
        raise DomainError("p must be at least 2")
    gen = as_generator(rng)
    n = 1 if size is None else size
    z = gen.standard_normal((n, p))
    norms = np.linalg.norm(z, axis=1)
    while np.any(norms == 0):  # probability zero, kept for completeness
        bad = norms == 0
        z[bad] = gen.standard_normal((int(bad.sum()), p))
        norms = np.linalg.norm(z, axis=1)
    u = z / norms[:, None]
    return u[0] if size is None else u


def sample_elliptical(spec: EllipticalSpec, n: int, rng: RngLike) -> np.ndarray:
    """n x p sample; Student rows are Gaussian rows divided by sqrt(chi2_df / df)."""
    if n < 1:
        raise DomainError("n must be positive")
    gen = as_generator(rng)
    p = spec.dim
    z = gen.standard_normal((n, p))
    x = z @ spec.root
    if spec.family == "student":
        w = gen.chisquare(spec.df, size=n)
        x = x / np.sqrt(w / spec.df)[:, None]
    zero = ~np.any(x != 0, axis=1)
    if np.any(zero):
        x[zero] = sample_elliptical(spec, int(zero.sum()), gen)
    return x


def spatial_signs(X) -> np.ndarray:
    """Rows of X divided by their Euclidean norms."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionError("data must be an n x p matrix")
    norms = np.linalg.norm(X, axis=1)
    if np.any(norms == 0) or not np.all(np.isfinite(norms)):
        bad = np.flatnonzero((norms == 0) | ~np.isfinite(norms))
        raise DomainError(f"rows {bad[:10].tolist()} are zero or non-finite; spatial signs undefined")
    return X / norms[:, None]


def sample_angular_gaussian(V, n: int, rng: RngLike) -> np.ndarray:
    """Spatial signs of n draws from N(0, V)."""
    return spatial_signs(sample_elliptical(EllipticalSpec.gaussian(V), n, rng))


def angular_gaussian_logpdf(u, V) -> np.ndarray:
    """Log-density of the angular Gaussian law w.r.t. surface measure on the sphere.

    log Gamma(p/2) - log(2 pi^{p/2}) - (1/2) log det V - (p/2) log(u' V^{-1} u).
    ``u`` may be one vector or an n x p array of unit rows.
    """
    u = np.asarray(u, dtype=float)
    decomp = sym_eigen(V)
    lam = decomp.eigenvalues
    if lam[-1] <= 0:
        raise DomainError("shape matrix is not positive definite")
    p = lam.shape[0]
    if u.shape[-1] != p:
        raise DimensionError("u and V have incompatible dimensions")
    proj = u @ decomp.eigenvectors
    quad = np.sum(proj**2 / lam, axis=-1)
    const = math.lgamma(p / 2.0) - math.log(2.0) - (p / 2.0) * math.log(math.pi) - 0.5 * np.sum(np.log(lam))
    return const - (p / 2.0) * np.log(quad)
