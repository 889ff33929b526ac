"""Monte Carlo harness for size and power experiments.

An experiment is a grid of cells (distribution, w, ell). Each cell draws M
samples of size n from an elliptical law whose scatter has a spike of
strength n^(-w/k) pointing at theta0 (null, ell = 0) or at a rotated
direction (alternatives), runs the requested tests on every sample, and
records rejection frequencies. Replication r of cell c always uses random
stream (seed, c * 2^32 + r), so results do not depend on how the work is
split across processes.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .distributions import EllipticalSpec, RngStream, sample_elliptical
from .errors import ConvergenceError, DomainError, NumericFailure
from .lecam import RegimeTag, SpikeModel, make_perturbation, nu_n, regime_kind
from .linalg import as_unit_vector, sym_eigen, symmetrize
from .power import PowerQuery, asymptotic_power, format_number
from .stattests import METHODS, run_methods

log = logging.getLogger(__name__)

DEFAULT_SEED = 20190705
CHUNK_SIZE = 250
MAX_EXCLUDED_FRACTION = 0.01
MIN_REPLICATIONS = 500
TYLER_METHODS = ("sign", "tyler_lrt")

RESULT_COLUMNS = (
    "method", "figure", "distribution", "w", "ell", "p", "n", "M", "alpha",
    "rejection_frequency", "standard_error", "excluded", "seed",
)

PRESETS = {
    "fig1": dict(
        p=6, n=200_000, M=2500, ws=(0, 1, 2), ells=(0, 1, 2, 3, 4),
        distributions=("gaussian",), methods=("sign",), w_divisor=6.0,
    ),
    "fig2": dict(
        p=6, n=400, M=5000, ws=(0, 1, 2, 3), ells=(0,),
        distributions=("gaussian", "t6", "t4", "t2"), methods=("sign", "tyler_lrt", "anderson"), w_divisor=4.0,
    ),
    "fig3": dict(
        p=2, n=200, M=2500, ws=(0, 1, 2), ells=(0, 1, 2, 3),
        distributions=("gaussian", "t4", "t2"), methods=("sign", "tyler_lrt", "anderson"), w_divisor=8.0,
    ),
}
MAX_W = {"fig1": 2, "fig2": 3, "fig3": 2}


def parse_distribution(name: str) -> tuple:
    """'gaussian' -> ('gaussian', None); 't4' or 't2.5' -> ('student', 4.0)."""
    name = name.strip().lower()
    if name in ("gaussian", "normal"):
        return "gaussian", None
    if name.startswith("t"):
        try:
            df = float(name[1:])
        except ValueError:
            df = -1.0
        if df > 0:
            return "student", df
    raise DomainError(f"unknown distribution {name!r}; use 'gaussian' or 't<df>'")


@dataclass(frozen=True)
class ScenarioConfig:
    figure: str
    p: int
    n: int
    M: int
    ws: tuple
    ells: tuple
    distributions: tuple
    methods: tuple
    alpha: float = 0.05
    seed: int = DEFAULT_SEED
    scale: float = 1.0
    w_divisor: float = 6.0
    xi: float = 1.0
    theta0: Optional[tuple] = None

    def __post_init__(self):
        if self.figure not in PRESETS and self.figure != "custom":
            raise DomainError(f"unknown figure {self.figure!r}")
        if self.scale <= 0:
            raise DomainError("scale must be positive")
        if self.eff_n < 10 * self.p:
            raise DomainError(f"scaled n = {self.eff_n} is below 10 p = {10 * self.p}")
        if self.eff_M < 100:
            raise DomainError("need at least 100 replications per cell")
        if not 0 < self.alpha < 1:
            raise DomainError("alpha must lie in (0, 1)")
        bad = set(self.methods) - set(METHODS)
        if bad or not self.methods:
            raise DomainError(f"unknown or empty methods {sorted(bad)}")
        for d in self.distributions:
            parse_distribution(d)
        for w in self.ws:
            if w < 0 or (self.figure in MAX_W and w > MAX_W[self.figure]):
                raise DomainError(f"w = {w} is outside the range documented for {self.figure}")
        if self.figure == "fig2" and any(ell != 0 for ell in self.ells):
            raise DomainError("fig2 is a null-only experiment (ell = 0)")
        if self.figure == "fig3" and self.p != 2:
            raise DomainError("fig3 is bivariate")

    @property
    def eff_n(self) -> int:
        return max(1, int(round(self.n * self.scale)))

    @property
    def eff_M(self) -> int:
        # M never drops below min(M, 500) so scaled runs keep a usable SE
        return max(int(round(self.M * self.scale)), min(self.M, MIN_REPLICATIONS))

    @property
    def null_direction(self) -> np.ndarray:
        if self.theta0 is None:
            e = np.zeros(self.p)
            e[0] = 1.0
            return e
        return as_unit_vector(self.theta0, tol=1e-12)

    def cells(self) -> list:
        return [(d, w, ell) for d in self.distributions for w in self.ws for ell in self.ells]


def preset(figure, scale: float = 1.0, seed: int = DEFAULT_SEED, **overrides) -> ScenarioConfig:
    """Configuration reproducing one of the published experiments."""
    key = figure if str(figure).startswith("fig") else f"fig{figure}"
    if key not in PRESETS:
        raise DomainError(f"no preset for figure {figure!r}")
    params = dict(PRESETS[key])
    params.update(overrides)
    return ScenarioConfig(figure=key, scale=scale, seed=seed, **params)


def _orthogonal_direction(theta0: np.ndarray) -> np.ndarray:
    for k in range(theta0.shape[0]):
        e = np.zeros_like(theta0)
        e[k] = 1.0
        d = e - theta0 * theta0[k]
        if np.linalg.norm(d) > 1e-6:
            return d / np.linalg.norm(d)
    raise DomainError("cannot find a direction orthogonal to theta0")


def spike_direction(figure: str, p: int, n: int, w: float, ell: float, theta0, w_divisor: float = 6.0, xi: float = 1.0) -> np.ndarray:
    theta0 = as_unit_vector(theta0, tol=1e-12)
    if ell == 0:
        return theta0
    if figure == "fig2":
        raise DomainError("fig2 has no alternatives")
    if figure == "fig3":
        # theta0 + tau_ell, i.e. theta0 rotated by ell * pi / 12 in the plane
        a = ell * math.pi / 12.0
        R = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
        return R @ theta0
    delta = float(n) ** (-w / w_divisor)
    model = SpikeModel(p, theta0, xi, delta)
    pert = make_perturbation(theta0, _orthogonal_direction(theta0), ell, nu_n(model, n))
    return theta0 + pert.nu * pert.tau


def build_scatter(figure: str, p: int, n: int, w: float, ell: float, theta0, w_divisor: Optional[float] = None, xi: float = 1.0) -> np.ndarray:
    """(1 - d xi/p) I + d xi theta theta' with d = n^(-w/k) and the figure's spike direction."""
    if figure in PRESETS:
        if w < 0 or w > MAX_W[figure]:
            raise DomainError(f"w = {w} is outside the range documented for {figure}")
        k = PRESETS[figure]["w_divisor"]
    elif figure == "custom":
        k = 6.0 if w_divisor is None else w_divisor
    else:
        raise DomainError(f"unknown figure {figure!r}")
    if figure == "fig3" and p != 2:
        raise DomainError("fig3 is bivariate")
    delta = float(n) ** (-w / k)
    dx = delta * xi
    if dx >= p:
        raise DomainError("spike too strong for a positive-definite scatter")
    theta = spike_direction(figure, p, n, w, ell, theta0, k, xi)
    return symmetrize((1.0 - dx / p) * np.eye(p) + dx * np.outer(theta, theta))


@dataclass(frozen=True)
class ResultRow:
    method: str
    figure: str
    distribution: str
    w: float
    ell: float
    p: int
    n: int
    M: int
    alpha: float
    rejection_frequency: float
    standard_error: float
    excluded: int
    seed: int
    rejections: int = field(default=0, compare=False)


def _cell_setup(cfg: ScenarioConfig, cell: tuple):
    dist, w, ell = cell
    theta0 = cfg.null_direction
    n = cfg.eff_n
    scatter = build_scatter(cfg.figure, cfg.p, n, w, ell, theta0, cfg.w_divisor, cfg.xi)
    family, df = parse_distribution(dist)
    spec = EllipticalSpec(family, scatter, df)
    null_shape = None
    if "sign_oracle" in cfg.methods:
        null_shape = sym_eigen(build_scatter(cfg.figure, cfg.p, n, w, 0, theta0, cfg.w_divisor, cfg.xi))
    return spec, null_shape, theta0


def stream_index(cell_index: int, replication: int) -> int:
    return (cell_index << 32) | replication


def _run_chunk(task) -> list:
    """Run replications [r0, r1) of one cell; returns per-replication reject flags."""
    cfg, cell_index, r0, r1 = task
    spec, null_shape, theta0 = _cell_setup(cfg, cfg.cells()[cell_index])
    n = cfg.eff_n
    out = []
    for r in range(r0, r1):
        X = sample_elliptical(spec, n, RngStream(cfg.seed, stream_index(cell_index, r)))
        try:
            res = run_methods(X, theta0, cfg.methods, cfg.alpha, null_shape)
            out.append({m: res[m].reject for m in cfg.methods})
        except ConvergenceError:
            rest = [m for m in cfg.methods if m not in TYLER_METHODS]
            res = run_methods(X, theta0, rest, cfg.alpha, null_shape) if rest else {}
            out.append({m: (res[m].reject if m in res else None) for m in cfg.methods})
    return out


def _tasks(cfg: ScenarioConfig) -> list:
    M = cfg.eff_M
    return [
        (cfg, c, r0, min(r0 + CHUNK_SIZE, M))
        for c in range(len(cfg.cells()))
        for r0 in range(0, M, CHUNK_SIZE)
    ]


def run_scenario(cfg: ScenarioConfig, jobs: int = 1) -> list:
    """Run every cell of ``cfg``; one ResultRow per (cell, method).

    ``jobs`` > 1 spreads chunks of replications over worker processes; the
    output is identical to a serial run.
    """
    tasks = _tasks(cfg)
    log.info("running %s: %d cells x %d replications, n=%d", cfg.figure, len(cfg.cells()), cfg.eff_M, cfg.eff_n)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_chunk, tasks))
    else:
        chunks = []
        for i, t in enumerate(tasks):
            chunks.append(_run_chunk(t))
            log.debug("chunk %d/%d done", i + 1, len(tasks))

    per_cell = [[] for _ in cfg.cells()]
    for task, chunk in zip(tasks, chunks):
        per_cell[task[1]].extend(chunk)

    rows = []
    for (dist, w, ell), reps in zip(cfg.cells(), per_cell):
        for m in cfg.methods:
            flags = [rep[m] for rep in reps]
            excluded = sum(f is None for f in flags)
            if excluded > MAX_EXCLUDED_FRACTION * len(flags):
                raise NumericFailure(
                    f"{excluded} of {len(flags)} replications excluded for {m} in cell "
                    f"({dist}, w={w}, ell={ell}); check the configuration"
                )
            used = len(flags) - excluded
            k = sum(bool(f) for f in flags if f is not None)
            f = k / used
            rows.append(ResultRow(
                method=m, figure=cfg.figure, distribution=dist, w=w, ell=ell, p=cfg.p, n=cfg.eff_n,
                M=used, alpha=cfg.alpha, rejection_frequency=f,
                standard_error=math.sqrt(f * (1.0 - f) / used), excluded=excluded, seed=cfg.seed,
                rejections=k,
            ))
    return rows


def results_csv(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for r in rows:
        writer.writerow([r.method, r.figure, r.distribution] + [format_number(getattr(r, c)) for c in RESULT_COLUMNS[3:]])
    return buf.getvalue()


def write_results(rows: Sequence[ResultRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(results_csv(rows))


@dataclass(frozen=True)
class TheoryComparison:
    method: str
    w: float
    ell: float
    regime: str
    empirical: float
    theoretical: float
    standard_error: float
    z: float


def regime_for(w: float, w_divisor: float) -> str:
    return RegimeTag.from_rate(w / w_divisor).kind


def compare_to_theory(rows: Sequence[ResultRow], xi: float = 1.0, w_divisor: Optional[float] = None) -> list:
    """z-scores of empirical rejection rates against asymptotic local powers.

    The standard error is the binomial one under the theoretical power,
    sqrt(pi (1 - pi) / M), which stays finite when the empirical rate is 0 or 1.
    """
    out = []
    for r in rows:
        k = w_divisor if w_divisor is not None else PRESETS.get(r.figure, {}).get("w_divisor", 6.0)
        regime = regime_for(r.w, k)
        theo = asymptotic_power(PowerQuery(r.p, r.alpha, xi, r.ell, regime))
        se = math.sqrt(theo * (1.0 - theo) / r.M)
        out.append(TheoryComparison(r.method, r.w, r.ell, regime_kind(regime), r.rejection_frequency, theo, se,
                                    (r.rejection_frequency - theo) / se))
    return out


def with_replications(cfg: ScenarioConfig, M: int) -> ScenarioConfig:
    """Copy of ``cfg`` with the same effective n and exactly M replications per cell."""
    return replace(cfg, n=cfg.eff_n, scale=1.0, M=M)
