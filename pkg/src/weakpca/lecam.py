"""Single-spike angular Gaussian models and their exact log-likelihood ratios.

Used to check numerically how the log-likelihood ratio between the null
shape V0 = (1 - d xi/p) I + d xi theta0 theta0' and its rotated alternative
behaves in each of the four identifiability regimes (classical, weak,
critical, degenerate) and how well the quadratic approximations track it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .linalg import as_unit_vector, projector, spike_power, symmetrize
from .shape import _check_signs, _sign_cov_whitened

REGIMES = ("classical", "weak", "critical", "degenerate")
_ROMAN = {"i": "classical", "ii": "weak", "iii": "critical", "iv": "degenerate"}


def regime_kind(name: str) -> str:
    """Normalise 'i'..'iv' or the spelled-out names to one of REGIMES."""
    key = str(name).strip().lower()
    key = _ROMAN.get(key, key)
    if key not in REGIMES:
        raise DomainError(f"unknown regime {name!r}")
    return key


@dataclass(frozen=True)
class RegimeTag:
    """Spike strength delta_n = n^-rate; the rate determines the regime."""

    kind: str
    rate: float

    def __post_init__(self):
        kind = regime_kind(self.kind)
        object.__setattr__(self, "kind", kind)
        ok = {
            "classical": self.rate == 0,
            "weak": 0 < self.rate < 0.5,
            "critical": self.rate == 0.5,
            "degenerate": self.rate > 0.5,
        }[kind]
        if not ok:
            raise DomainError(f"rate {self.rate!r} is inconsistent with the {kind} regime")

    @classmethod
    def from_rate(cls, rate: float) -> "RegimeTag":
        if rate == 0:
            return cls("classical", 0.0)
        if rate == 0.5:
            return cls("critical", 0.5)
        return cls("weak" if rate < 0.5 else "degenerate", float(rate))

    def delta(self, n: int) -> float:
        return float(n) ** (-self.rate)


@dataclass(frozen=True)
class SpikeModel:
    p: int
    theta0: np.ndarray
    xi: float
    delta: float

    def __post_init__(self):
        theta0 = as_unit_vector(self.theta0, tol=1e-12)
        if theta0.shape[0] != self.p or self.p < 2:
            raise DimensionError("theta0 must be a unit p-vector with p >= 2")
        if not (self.xi > 0 and self.delta > 0):
            raise DomainError("xi and delta must be positive")
        if 1.0 - self.delta * self.xi / self.p <= 0:
            raise DomainError("delta * xi must be below p for a positive-definite shape")
        object.__setattr__(self, "theta0", theta0)

    @property
    def deltaxi(self) -> float:
        return self.delta * self.xi


@dataclass(frozen=True)
class Perturbation:
    """Local perturbation theta0 -> theta0 + nu tau that stays on the sphere."""

    tau: np.ndarray
    nu: float

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.tau))

    def check(self, theta0, tol: float = 1e-12) -> None:
        tau = np.asarray(self.tau, dtype=float)
        lhs = float(theta0 @ tau)
        rhs = -0.5 * self.nu * float(tau @ tau)
        if abs(lhs - rhs) > tol or abs(np.linalg.norm(theta0 + self.nu * tau) - 1.0) > tol:
            raise DomainError("perturbation leaves the unit sphere")


def gamma_n(model: SpikeModel) -> float:
    """p d xi / (p + (p - 1) d xi)."""
    p, dx = model.p, model.deltaxi
    return p * dx / (p + (p - 1) * dx)


def nu_n(model: SpikeModel, n: int, critical_shortcut: bool = False) -> float:
    """Perturbation step 1/(sqrt(n) gamma_n), or 1/xi if ``critical_shortcut``."""
    if critical_shortcut:
        return 1.0 / model.xi
    return 1.0 / (math.sqrt(n) * gamma_n(model))


def build_null_shape(model: SpikeModel) -> np.ndarray:
    return spike_power(model.p, model.theta0, model.deltaxi, 1.0)


def build_alt_shape(model: SpikeModel, pert: Perturbation) -> np.ndarray:
    pert.check(model.theta0)
    theta1 = model.theta0 + pert.nu * np.asarray(pert.tau, dtype=float)
    p, dx = model.p, model.deltaxi
    return symmetrize((1.0 - dx / p) * np.eye(p) + dx * np.outer(theta1, theta1))


def make_perturbation(theta0, direction, ell: float, nu: float) -> Perturbation:
    """Rotate theta0 towards ``direction`` by 2 arcsin(ell nu / 2).

    The resulting tau = (theta1 - theta0)/nu has norm ell and satisfies
    theta0'tau = -(nu/2) |tau|^2.
    """
    theta0 = as_unit_vector(theta0, tol=1e-12)
    if ell < 0 or nu <= 0:
        raise DomainError("ell must be >= 0 and nu > 0")
    half = ell * nu / 2.0
    if half > 1.0:
        raise DomainError(f"no unit perturbation with ell * nu / 2 = {half:.6g} > 1")
    d = np.asarray(direction, dtype=float)
    d = d - theta0 * (theta0 @ d)
    norm = np.linalg.norm(d)
    if norm < 1e-12:
        raise DomainError("direction must not be parallel to theta0")
    d /= norm
    alpha = 2.0 * math.asin(half)
    theta1 = math.cos(alpha) * theta0 + math.sin(alpha) * d
    return Perturbation((theta1 - theta0) / nu, float(nu))


def log_likelihood_ratio(U, model: SpikeModel, pert: Perturbation) -> float:
    """Exact log dP(V1)/dP(V0) for a sample of signs.

    -(p/2) sum [log(1 - g (u'theta1)^2) - log(1 - g (u'theta0)^2)], the
    determinants cancelling because V0 and V1 share their spectrum.
    """
    U = _check_signs(U)
    pert.check(model.theta0)
    g = gamma_n(model)
    theta1 = model.theta0 + pert.nu * np.asarray(pert.tau, dtype=float)
    a1 = (U @ theta1) ** 2
    a0 = (U @ model.theta0) ** 2
    return float(-0.5 * model.p * np.sum(np.log1p(-g * a1) - np.log1p(-g * a0)))


def _centered_sign_cov(U, model: SpikeModel) -> np.ndarray:
    U = _check_signs(U)
    if U.shape[1] != model.p:
        raise DimensionError("sample and model dimensions differ")
    W = spike_power(model.p, model.theta0, model.deltaxi, -0.5)
    return _sign_cov_whitened(U, W) - np.eye(model.p) / model.p


def upsilon_matrix(U, model: SpikeModel) -> np.ndarray:
    """p sqrt(n) (S_n(V0) - I/p)."""
    n = np.asarray(U).shape[0]
    return model.p * math.sqrt(n) * _centered_sign_cov(U, model)


def central_sequence(U, model: SpikeModel, regime: str = "weak") -> np.ndarray:
    """p (I - theta0 theta0') sqrt(n) (S_n(V0) - I/p) theta0.

    In the classical regime the vector is further multiplied by
    sqrt(p + (p-1) xi) / sqrt(p - xi), which requires xi < p.
    """
    kind = regime_kind(regime)
    theta0 = model.theta0
    delta = projector(theta0) @ (upsilon_matrix(U, model) @ theta0)
    if kind == "classical":
        p, xi = model.p, model.xi
        if xi >= p:
            raise DomainError("the classical-regime scaling requires xi < p")
        delta = delta * math.sqrt(p + (p - 1) * xi) / math.sqrt(p - xi)
    return delta


def fisher_information(regime: str, p: int, xi: float, theta0) -> np.ndarray:
    kind = regime_kind(regime)
    P = projector(theta0)
    if kind == "classical":
        if xi >= p:
            raise DomainError("the classical regime requires xi < p")
        return p * (p + (p - 1) * xi) / ((p + 2) * (p - xi)) * P
    if kind == "weak":
        return p / (p + 2) * P
    raise DomainError(f"no Fisher information in the {kind} regime")


def lan_quadratic(regime: str, tau, theta0, xi: float, stat) -> float:
    """Quadratic approximation of the log-likelihood ratio.

    classical / weak: tau' Delta - tau' Gamma tau / 2, with ``stat`` = Delta.
    critical: tau' Y theta0 + tau' Y tau / (2 xi)
              - (p/(2(p+2))) (|tau|^2 - |tau|^4 / (4 xi^2)), with ``stat`` = Y.
    """
    kind = regime_kind(regime)
    tau = np.asarray(tau, dtype=float)
    theta0 = np.asarray(theta0, dtype=float)
    p = tau.shape[0]
    if kind == "degenerate":
        raise DomainError("the log-likelihood ratio is asymptotically zero in the degenerate regime")
    if kind in ("classical", "weak"):
        Gamma = fisher_information(kind, p, xi, theta0)
        return float(tau @ np.asarray(stat) - 0.5 * tau @ Gamma @ tau)
    Y = np.asarray(stat)
    t2 = float(tau @ tau)
    return float(tau @ Y @ theta0 + tau @ Y @ tau / (2.0 * xi) - p / (2.0 * (p + 2)) * (t2 - t2**2 / (4.0 * xi**2)))
