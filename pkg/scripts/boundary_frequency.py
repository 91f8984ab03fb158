"""How often the shape estimate diverges in small samples.

Draws ``--reps`` samples of size ``--n`` from SN(0, 1, alpha) and reports
the fraction with all observations positive, which with location and scale
known is exactly the event that the shape MLE is infinite. The full
three-parameter fit is also run to show how often it lands on the
skewness boundary.

Usage: python scripts/boundary_frequency.py [--n 25] [--alpha 5] [--reps 2000]
"""

import argparse

import numpy as np
from scipy import stats

from skewnormal.fit_uv import RegressionData, fit, fit_shape
from skewnormal.param import DpParams
from skewnormal.sample import SeededStream, rvs_sn


def main():
    ap = argparse.ArgumentParser(description="Boundary frequency of the shape MLE.")
    ap.add_argument("--n", type=int, default=25)
    ap.add_argument("--alpha", type=float, default=5.0)
    ap.add_argument("--reps", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=90)
    ap.add_argument("--full-fit", action="store_true", help="also fit (xi, omega, alpha)")
    args = ap.parse_args()
    dp = DpParams.univariate(0.0, 1.0, args.alpha)
    n_pos = n_shape = n_full = 0
    for s in range(args.reps):
        y = rvs_sn(dp, args.n, SeededStream(args.seed, s))[:, 0]
        n_pos += bool(np.all(y > 0))
        n_shape += fit_shape(y, 0.0, 1.0).boundary
        if args.full_fit:
            n_full += fit(RegressionData(y)).convergence == "boundary"
    # P(Y > 0) = 1/2 + arctan(alpha)/pi for SN(0, 1, alpha)
    p_exact = (0.5 + np.arctan(args.alpha) / np.pi) ** args.n
    frac = n_pos / args.reps
    se = np.sqrt(p_exact * (1 - p_exact) / args.reps)
    print(f"all-positive fraction {frac:.4f}  (exact {p_exact:.4f}, MC se {se:.4f})")
    print(f"shape-only fits at the boundary: {n_shape}/{args.reps}")
    if args.full_fit:
        print(f"full fits at the boundary: {n_full}/{args.reps}")
    print(f"binomial p-value {stats.binomtest(n_pos, args.reps, p_exact).pvalue:.3f}")


if __name__ == "__main__":
    main()
