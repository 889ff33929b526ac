"""Local asymptotic power of the sign test under single-spike alternatives."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

from .chisq import chi2_quantile, noncentral_chi2_sf
from .errors import DomainError
from .lecam import regime_kind

DEFAULT_ELL_GRID = (0, 1, 2, 3, 4)
POWER_COLUMNS = ("regime", "p", "xi", "alpha", "ell", "ncp", "power")
_ROMAN_OF = {"classical": "i", "weak": "ii", "critical": "iii", "degenerate": "iv"}


@dataclass(frozen=True)
class PowerQuery:
    p: int
    alpha: float
    xi: float
    tau_norm: float
    regime: str

    def __post_init__(self):
        object.__setattr__(self, "regime", regime_kind(self.regime))
        if self.p < 2 or not 0 < self.alpha < 1 or self.xi <= 0 or self.tau_norm < 0:
            raise DomainError("need p >= 2, 0 < alpha < 1, xi > 0 and tau_norm >= 0")
        if self.regime == "classical" and self.xi >= self.p:
            raise DomainError("the classical regime requires xi < p")
        if self.regime == "critical" and self.tau_norm > 2.0 * self.xi:
            raise DomainError("|tau| cannot exceed 2 xi in the critical regime (perturbation leaves the sphere)")


def noncentrality(q: PowerQuery) -> float:
    p, xi, t2 = q.p, q.xi, q.tau_norm**2
    if q.regime == "classical":
        return p * (p + (p - 1) * xi) / ((p + 2) * (p - xi)) * t2
    if q.regime == "weak":
        return p / (p + 2) * t2
    if q.regime == "critical":
        return p / (p + 2) * t2 * (1.0 - t2 / (2.0 * xi**2)) ** 2 * (1.0 - t2 / (4.0 * xi**2))
    return 0.0


def power_from_ncp(ncp: float, p: int, alpha: float) -> float:
    """P(noncentral chi2_{p-1}(ncp) > upper-alpha quantile of chi2_{p-1})."""
    if ncp == 0:
        return alpha
    return noncentral_chi2_sf(chi2_quantile(1.0 - alpha, p - 1), p - 1, ncp)


def asymptotic_power(q: PowerQuery) -> float:
    return power_from_ncp(noncentrality(q), q.p, q.alpha)


@dataclass(frozen=True)
class PowerRow:
    regime: str
    p: int
    xi: float
    alpha: float
    ell: float
    ncp: float
    power: float


def theoretical_curve(p: int, alpha: float, xi: float, regime: str, ell_grid: Sequence[float] = DEFAULT_ELL_GRID) -> list:
    rows = []
    for ell in ell_grid:
        q = PowerQuery(p, alpha, xi, ell, regime)
        ncp = noncentrality(q)
        rows.append(PowerRow(_ROMAN_OF[q.regime], p, xi, alpha, ell, ncp, power_from_ncp(ncp, p, alpha)))
    return rows


def format_number(x) -> str:
    """Shortest round-trip text for a number, '.' decimal separator."""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    x = float(x)
    return str(int(x)) if x.is_integer() and abs(x) < 1e15 else repr(x)


def power_csv(rows: Iterable[PowerRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(POWER_COLUMNS)
    for r in rows:
        writer.writerow([r.regime] + [format_number(getattr(r, c)) for c in POWER_COLUMNS[1:]])
    return buf.getvalue()
