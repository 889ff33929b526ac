"""Print the numerical checks of the four likelihood-ratio regimes.

    python scripts/lecam_check.py [--seed S] [--reps M]
"""
from __future__ import annotations

import argparse

import numpy as np

from weakpca import validation as v


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=v.DEFAULT_SEED)
    parser.add_argument("--reps", type=int, default=2000)
    args = parser.parse_args()
    seed, M = args.seed, args.reps

    print(f"exact LLR vs logpdf difference, max error: {v.llr_logpdf_discrepancy(1000, seed=seed):.2e}")
    for kind in ("classical", "weak", "critical"):
        for ell in (1, 2):
            med = [v.lan_remainder_median(kind, n, ell, M=min(M, 1000), seed=seed) for n in (1000, 10000)]
            print(f"{kind:9s} |tau|={ell}: median |LLR - quadratic| n=1e3 {med[0]:.4f}, n=1e4 {med[1]:.4f}")
    for ell in (0.5, 1.0):
        q = [v.degenerate_llr_quantile(n, ell, M=M, seed=seed) for n in (1000, 10000)]
        print(f"degenerate |tau|={ell}: 95% quantile of |LLR| n=1e3 {q[0]:.4f}, n=1e4 {q[1]:.4f}")
    for kind in ("classical", "weak", "critical"):
        print(f"{kind:9s} mean exp(LLR) under H0 at n=1e4: {v.mean_likelihood_ratio(kind, 10000, 1.0, M=M, seed=seed):.4f}")
    C, T = v.central_sequence_covariance(5000, M=M, seed=seed)
    print(f"covariance of the central sequence, max deviation from the information: {np.abs(C - T).max():.4f}")


if __name__ == "__main__":
    main()
