"""Re-run the simulation studies and write one CSV per experiment.

    python scripts/reproduce_figures.py --figure 1 --scale 0.1 --jobs 4 --outdir results/
    python scripts/reproduce_figures.py --figure all --scale 1

Figure 1 also gets a comparison against the asymptotic local powers
(``fig1_theory.csv``). Full-size figure 1 (n = 200,000, M = 2,500) takes
hours on a laptop; scale 0.1 is the desk-sized configuration.
"""
from __future__ import annotations

import argparse
import csv
import logging
import time
from pathlib import Path

from weakpca import montecarlo as mc
from weakpca.power import format_number


def write_theory(rows, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["method", "w", "ell", "regime", "empirical", "theoretical", "standard_error", "z"])
        for c in mc.compare_to_theory(rows):
            out.writerow([c.method, format_number(c.w), format_number(c.ell), c.regime] +
                         [format_number(v) for v in (c.empirical, c.theoretical, c.standard_error, c.z)])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--figure", choices=("1", "2", "3", "all"), default="all")
    parser.add_argument("--scale", type=float, default=None, help="default: 0.1 for figure 1, 1 otherwise")
    parser.add_argument("--seed", type=int, default=mc.DEFAULT_SEED)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--outdir", default="results")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    figures = ("1", "2", "3") if args.figure == "all" else (args.figure,)
    for fig in figures:
        scale = args.scale if args.scale is not None else (0.1 if fig == "1" else 1.0)
        cfg = mc.preset(fig, scale=scale, seed=args.seed)
        start = time.time()
        rows = mc.run_scenario(cfg, jobs=args.jobs)
        mc.write_results(rows, outdir / f"fig{fig}.csv")
        if fig == "1":
            write_theory(rows, outdir / "fig1_theory.csv")
        print(f"fig{fig}: n={cfg.eff_n} M={cfg.eff_M} {len(rows)} rows in {time.time() - start:.0f}s -> {outdir}/fig{fig}.csv")


if __name__ == "__main__":
    main()
