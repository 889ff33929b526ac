"""Command-line front end.

Exit codes: 0 = ran, H0 not rejected (or non-test command succeeded);
3 = H0 rejected; 1 = error. Results go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys

import numpy as np

from . import montecarlo
from .distributions import EllipticalSpec, RngStream, sample_elliptical
from .errors import WeakPCAError
from .linalg import symmetrize
from .power import DEFAULT_ELL_GRID, format_number, power_csv, theoretical_curve
from .stattests import anderson_lrt, sign_test, tyler_lrt

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REJECT = 3
UNIT_TOL = 1e-6


class CliError(Exception):
    pass


def _floats(text: str, what: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.replace(";", ",").split(",") if x.strip()])
    except ValueError:
        raise CliError(f"{what}: expected comma-separated numbers, got {text!r}")


def parse_vector(text: str, what: str) -> np.ndarray:
    """A comma-separated vector given inline or as a one-line file."""
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.readline().strip()
    return _floats(text, what)


def parse_theta0(text: str, p: int) -> np.ndarray:
    theta = parse_vector(text, "--theta0")
    if theta.shape[0] != p:
        raise CliError(f"--theta0 has {theta.shape[0]} entries but the data have {p} columns")
    norm = np.linalg.norm(theta)
    if abs(norm - 1.0) > UNIT_TOL:
        raise CliError(f"--theta0 must be a unit vector (norm is {norm:.9g})")
    return theta / norm


def read_matrix(path: str) -> np.ndarray:
    """Numeric CSV, optional header row of non-numeric labels."""
    try:
        fh = sys.stdin if path == "-" else open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}")
    with fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise CliError(f"{path}: no data")

    def numeric(cell):
        try:
            float(cell)
            return True
        except ValueError:
            return False

    start = 0
    if not any(numeric(c) for c in rows[0]):
        start = 1
    data = []
    width = None
    for i, row in enumerate(rows[start:], start=start + 1):
        if width is None:
            width = len(row)
        if len(row) != width:
            raise CliError(f"{path}: row {i} has {len(row)} columns, expected {width}")
        values = []
        for j, cell in enumerate(row, start=1):
            try:
                values.append(float(cell))
            except ValueError:
                raise CliError(f"{path}: non-numeric value {cell!r} at row {i}, column {j}")
        data.append(values)
    if not data:
        raise CliError(f"{path}: header but no data rows")
    X = np.array(data)
    if not np.all(np.isfinite(X)):
        raise CliError(f"{path}: non-finite values")
    return X


def _write_text(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_test(args) -> int:
    X = read_matrix(args.data)
    n, p = X.shape
    theta0 = parse_theta0(args.theta0, p)
    center = None
    if args.center is not None:
        center = parse_vector(args.center, "--center")
        if center.shape[0] != p:
            raise CliError(f"--center has {center.shape[0]} entries but the data have {p} columns")
        zero = np.flatnonzero(~np.any(X - center != 0, axis=1))
        if zero.size:
            raise CliError(f"rows {(zero + 1).tolist()[:10]} are zero after centering")
    if args.single_spike and args.method != "sign":
        raise CliError("--single-spike only applies to --method sign")
    if args.method == "sign":
        res = sign_test(X, theta0, args.alpha, j=args.eigen_index, single_spike=args.single_spike, center=center)
    elif args.method == "tyler":
        res = tyler_lrt(X, theta0, args.alpha, j=args.eigen_index, center=center)
    else:
        res = anderson_lrt(X, theta0, args.alpha, j=args.eigen_index, center=center)
    decision = "reject H0" if res.reject else "do not reject H0"
    print(f"method: {res.method}")
    print(f"eigen-index: {args.eigen_index}")
    print(f"n: {n}  p: {p}")
    print(f"statistic: {res.statistic:.6g}")
    print(f"df: {res.df}")
    print(f"p-value: {res.p_value:.6g}")
    print(f"decision: {decision} at level {args.alpha:g}")
    print(f"statistic={format_number(res.statistic)} df={res.df} pvalue={format_number(res.p_value)} reject={int(res.reject)}")
    return EXIT_REJECT if res.reject else EXIT_OK


def cmd_sample(args) -> int:
    p = args.p
    if p < 2 or args.n < 1:
        raise CliError("need --p >= 2 and --n >= 1")
    if args.scatter is not None:
        scatter = read_matrix(args.scatter)
        if scatter.shape != (p, p):
            raise CliError(f"--scatter must be {p} x {p}")
        scatter = symmetrize(scatter)
    else:
        dxi = args.spike or 0.0
        theta = np.eye(p)[0] if args.theta0 is None else parse_theta0(args.theta0, p)
        if not 0 <= dxi < p:
            raise CliError(f"--spike must lie in [0, {p})")
        scatter = (1.0 - dxi / p) * np.eye(p) + dxi * np.outer(theta, theta)
    if args.family == "gaussian":
        spec = EllipticalSpec.gaussian(scatter)
    else:
        if args.df is None or args.df <= 0:
            raise CliError("--family t needs --df > 0")
        spec = EllipticalSpec.student(scatter, args.df)
    X = sample_elliptical(spec, args.n, RngStream(args.seed))
    lines = [",".join(f"x{k + 1}" for k in range(p))]
    lines += [",".join(format_number(v) for v in row) for row in X.tolist()]
    _write_text("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    overrides = {}
    if args.methods:
        overrides["methods"] = tuple(m.strip() for m in args.methods.split(","))
    cfg = montecarlo.preset(args.figure, scale=args.scale, seed=args.seed, **overrides)
    if args.reps is not None:
        cfg = montecarlo.with_replications(cfg, args.reps)
    rows = montecarlo.run_scenario(cfg, jobs=args.jobs)
    _write_text(montecarlo.results_csv(rows), args.out)
    return EXIT_OK


def cmd_power(args) -> int:
    grid = [float(x) for x in _floats(args.ell_grid, "--ell-grid")] if args.ell_grid else list(DEFAULT_ELL_GRID)
    rows = theoretical_curve(args.p, args.alpha, args.xi, args.regime, grid)
    _write_text(power_csv(rows), args.out)
    return EXIT_OK


def _default_seed() -> int:
    env = os.environ.get("WEAKPCA_SEED")
    if env is None:
        return montecarlo.DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise CliError(f"WEAKPCA_SEED must be an integer, got {env!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weakpca", description="Sign tests for (weak) principal directions.")
    parser.add_argument("-v", "--verbose", action="store_true", help="progress messages on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="test H0: theta_j = theta0 on a CSV data set")
    t.add_argument("--data", required=True, help="CSV file (n rows, p columns, optional header)")
    t.add_argument("--theta0", required=True, help="comma-separated unit vector or a one-line file")
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--method", choices=("sign", "tyler", "anderson"), default="sign")
    t.add_argument("--eigen-index", type=int, default=1, help="which eigenvector (1 = leading)")
    t.add_argument("--single-spike", action="store_true", help="use the single-spike null shape estimate")
    t.add_argument("--center", help="known location to subtract (comma-separated)")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("sample", help="draw an elliptical sample")
    s.add_argument("--family", choices=("gaussian", "t"), default="gaussian")
    s.add_argument("--df", type=float)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--spike", type=float, help="spike strength delta*xi of the scatter")
    s.add_argument("--theta0", help="spike direction (default e1)")
    s.add_argument("--scatter", help="CSV file with a full p x p scatter matrix")
    s.add_argument("--seed", type=int)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_sample)

    m = sub.add_parser("simulate", help="reproduce a Monte Carlo experiment")
    m.add_argument("--figure", choices=("1", "2", "3"), required=True)
    m.add_argument("--scale", type=float, default=1.0)
    m.add_argument("--seed", type=int)
    m.add_argument("--jobs", type=int, default=1)
    m.add_argument("--reps", type=int, help="override the number of replications per cell")
    m.add_argument("--methods", help="comma-separated subset of sign,tyler_lrt,anderson,sign_oracle")
    m.add_argument("--out", default="-")
    m.set_defaults(func=cmd_simulate)

    w = sub.add_parser("power", help="asymptotic local power curve")
    w.add_argument("--regime", choices=("i", "ii", "iii", "iv"), required=True)
    w.add_argument("--p", type=int, required=True)
    w.add_argument("--alpha", type=float, default=0.05)
    w.add_argument("--xi", type=float, default=1.0)
    w.add_argument("--ell-grid", help="comma-separated |tau| values (default 0,1,2,3,4)")
    w.add_argument("--out", default="-")
    w.set_defaults(func=cmd_power)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if getattr(args, "seed", "absent") is None:
            args.seed = _default_seed()
        return args.func(args)
    except (CliError, WeakPCAError, OSError) as exc:
        print(f"weakpca {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
