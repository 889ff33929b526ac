"""Run the seeded pilot experiments and freeze their outputs as test fixtures.

    python scripts/pilots.py [--out tests/fixtures/pilots.json]

The tests re-run the same experiments with the same seeds and check both the
tolerance and that the recorded value is reproduced.
"""
from __future__ import annotations

import argparse
import json
import time
from pathlib import Path

import numpy as np

from weakpca import validation as v
from weakpca.linalg import spike_power
from weakpca.montecarlo import build_scatter

SEED = v.DEFAULT_SEED
MULTI_SPIKE = [3.0, 1.5, 0.75, 0.75]


def pilots() -> dict:
    out = {}

    def record(name, params, value):
        out[name] = {"seed": SEED, "params": params, "value": value}
        print(f"{name}: {value}")

    for n in (1000, 10000):
        g = v.equivalence_gaps(n, M=500, seed=SEED)
        record(f"equivalence_n{n}", {"n": n, "M": 500, "p": 6, "delta": 1.0},
               {"oracle_gap": g.mean_abs_oracle_gap, "lrt_gap": g.mean_abs_lrt_gap})

    g = v.equivalence_gaps(5000, M=500, seed=SEED)
    record("equivalence_n5000", {"n": 5000, "M": 500, "p": 6, "delta": 1.0},
           {"oracle_gap": g.mean_abs_oracle_gap, "lrt_gap": g.mean_abs_lrt_gap})
    g = v.equivalence_gaps(2000, M=500, seed=SEED)
    record("equivalence_n2000", {"n": 2000, "M": 500, "p": 6, "delta": 1.0},
           {"oracle_gap": g.mean_abs_oracle_gap, "lrt_gap": g.mean_abs_lrt_gap})

    stats = v.null_sign_statistics(np.diag(MULTI_SPIKE), 2000, 2000, seed=SEED)
    record("multispike_ks", {"n": 2000, "M": 2000, "eigenvalues": MULTI_SPIKE}, v.ks_statistic_chi2(stats, 3))

    for w in (0, 1, 2, 3):
        scatter = build_scatter("fig2", 6, 2000, w, 0, np.eye(6)[0])
        stats = v.null_sign_statistics(scatter, 2000, 2000, theta0=np.eye(6)[0], seed=SEED, tag=30 + w)
        record(f"fig2_null_ks_w{w}", {"n": 2000, "M": 2000, "w": w},
               {"ks": v.ks_statistic_chi2(stats, 5), "rejection_frequency": float(np.mean(stats > 11.070497693516351))})

    record("llr_logpdf_max_error", {"cases": 1000}, v.llr_logpdf_discrepancy(1000, seed=SEED))
    for kind in ("classical", "weak"):
        for ell in (1, 2):
            record(f"lan_remainder_{kind}_ell{ell}", {"n": [1000, 10000], "M": 1000},
                   [v.lan_remainder_median(kind, n, ell, M=1000, seed=SEED) for n in (1000, 10000)])
    for ell in (0.5, 1.0):
        record(f"degenerate_q95_ell{ell}", {"n": [1000, 10000], "M": 2000, "rate": 0.75},
               [v.degenerate_llr_quantile(n, ell, M=2000, seed=SEED) for n in (1000, 10000)])
    for kind in ("classical", "weak", "critical"):
        record(f"mean_lr_{kind}", {"n": 10000, "M": 2000, "ell": 1.0}, v.mean_likelihood_ratio(kind, 10000, 1.0, M=2000, seed=SEED))
    C, T = v.central_sequence_covariance(5000, M=2000, seed=SEED)
    record("delta_cov_max_dev", {"n": 5000, "M": 2000, "p": 6}, float(np.abs(C - T).max()))
    C, T = v.upsilon_covariance(5000, M=2000, p=3, seed=SEED)
    record("upsilon_cov_max_dev", {"n": 5000, "M": 2000, "p": 3}, float(np.abs(C - T).max()))
    return out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "pilots.json"))
    args = parser.parse_args()
    start = time.time()
    data = pilots()
    Path(args.out).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {args.out} in {time.time() - start:.0f}s")


if __name__ == "__main__":
    main()
