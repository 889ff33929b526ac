"""Central and noncentral chi-square distribution functions.

The regularised incomplete gamma function uses the power series below
x < a + 1 and a modified Lentz continued fraction above, so both tails are
computed without cancellation.
"""
from __future__ import annotations

import math
from functools import lru_cache

from .errors import DomainError, NumericFailure

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000
NCP_TAIL_TOL = 1e-12
NCP_MAX_TERMS = 100_000


def _gamma_series(a: float, x: float) -> float:
    # P(a, x) = x^a e^-x / Gamma(a+1) * sum_k x^k / ((a+1)...(a+k))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise NumericFailure(f"incomplete gamma series failed for a={a}, x={x}")


def _gamma_cf(a: float, x: float) -> float:
    # Q(a, x) via the Legendre continued fraction, modified Lentz.
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise NumericFailure(f"incomplete gamma continued fraction failed for a={a}, x={x}")


def gammainc_lower(a: float, x: float) -> float:
    """Regularised lower incomplete gamma P(a, x)."""
    if a <= 0 or x < 0:
        raise DomainError("gammainc requires a > 0 and x >= 0")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_cf(a, x)


def gammainc_upper(a: float, x: float) -> float:
    """Regularised upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    if a <= 0 or x < 0:
        raise DomainError("gammainc requires a > 0 and x >= 0")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cf(a, x)


def _check(x: float, df: float) -> None:
    if not df >= 1:
        raise DomainError(f"degrees of freedom must be >= 1, got {df!r}")
    if not x >= 0:
        raise DomainError(f"chi-square argument must be >= 0, got {x!r}")


def chi2_pdf(x: float, df: float) -> float:
    _check(x, df)
    k = df / 2.0
    if x == 0:
        return 0.5 if df == 2 else (math.inf if df < 2 else 0.0)
    return math.exp((k - 1.0) * math.log(x) - x / 2.0 - k * math.log(2.0) - math.lgamma(k))


def chi2_cdf(x: float, df: float) -> float:
    _check(x, df)
    return gammainc_lower(df / 2.0, x / 2.0)


def chi2_sf(x: float, df: float) -> float:
    """Upper tail 1 - CDF, accurate far into the tail."""
    _check(x, df)
    return gammainc_upper(df / 2.0, x / 2.0)


@lru_cache(maxsize=256)
def chi2_quantile(q: float, df: float, tol: float = 1e-12) -> float:
    """Inverse CDF by bracketing followed by safeguarded Newton steps."""
    if not 0 < q < 1:
        raise DomainError(f"quantile level must lie in (0, 1), got {q!r}")
    if not df >= 1:
        raise DomainError(f"degrees of freedom must be >= 1, got {df!r}")
    lo, hi = 0.0, max(1.0, float(df))
    while chi2_cdf(hi, df) < q:
        lo, hi = hi, 2.0 * hi
    x = 0.5 * (lo + hi)
    for _ in range(200):
        err = chi2_cdf(x, df) - q
        if abs(err) <= tol:
            return x
        if err > 0:
            hi = x
        else:
            lo = x
        dens = chi2_pdf(x, df)
        step = x - err / dens if dens > 0 and math.isfinite(dens) else None
        x = step if step is not None and lo < step < hi else 0.5 * (lo + hi)
        if hi - lo <= 4 * _EPS * hi:
            return x
    raise NumericFailure(f"chi2_quantile did not converge for q={q}, df={df}")


def _poisson_log_weight(j: int, lam: float) -> float:
    return -lam + j * math.log(lam) - math.lgamma(j + 1.0)


def _poisson_outside(down: int, up: int, lam: float) -> float:
    """P(N <= down) + P(N >= up) for N ~ Poisson(lam), via the incomplete gamma."""
    upper_tail = gammainc_lower(float(up), lam) if up >= 1 else 1.0
    lower_tail = gammainc_upper(down + 1.0, lam) if down >= 0 else 0.0
    return upper_tail + lower_tail


def noncentral_chi2_cdf(x: float, df: float, ncp: float) -> float:
    """Noncentral chi-square CDF as a Poisson(ncp/2) mixture of central CDFs.

    Terms are summed outward from the Poisson mode until the unvisited
    Poisson mass drops below 1e-12.
    """
    _check(x, df)
    if not ncp >= 0:
        raise DomainError(f"noncentrality must be >= 0, got {ncp!r}")
    if ncp == 0:
        return chi2_cdf(x, df)
    if x == 0:
        return 0.0
    lam = ncp / 2.0
    if lam == 0.0:  # subnormal ncp
        return chi2_cdf(x, df)
    mode = int(lam)
    total = 0.0
    up, down = mode, mode - 1
    for k in range(NCP_MAX_TERMS):
        total += math.exp(_poisson_log_weight(up, lam)) * gammainc_lower(df / 2.0 + up, x / 2.0)
        up += 1
        if down >= 0:
            total += math.exp(_poisson_log_weight(down, lam)) * gammainc_lower(df / 2.0 + down, x / 2.0)
            down -= 1
        if k % 8 == 7 and _poisson_outside(down, up, lam) < NCP_TAIL_TOL:
            return min(max(total, 0.0), 1.0)
    raise NumericFailure(f"noncentral chi-square series exceeded {NCP_MAX_TERMS} terms")


def noncentral_chi2_sf(x: float, df: float, ncp: float) -> float:
    return 1.0 - noncentral_chi2_cdf(x, df, ncp)
