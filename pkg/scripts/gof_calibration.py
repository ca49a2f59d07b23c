"""Distribution of bootstrap p-values on data drawn from the fitted family."""

import argparse
import time

import numpy as np

from eventlens import tailfit as T

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--family", default="powerlaw", choices=T.FAMILIES)
    ap.add_argument("--params", type=float, nargs="+", default=[2.5])
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--sims", type=int, default=1000)
    args = ap.parse_args()

    kind = T.ModelKind(args.family, tuple(args.params))
    ps = []
    t0 = time.perf_counter()
    for trial in range(args.trials):
        s = T.sample_model(kind, 1, args.n, 500 + trial)
        fit = T.fit_model(s, args.family, warn_small_tail=False)
        ps.append(T.goodness_of_fit(s, fit, args.sims, seed=trial).p_value)
    ps = np.array(ps)
    print(f"{args.trials} trials in {time.perf_counter() - t0:.0f}s")
    print(f"p < 0.1: {(ps < 0.1).sum()}/{args.trials}   median p: {np.median(ps):.3f}")
    print("deciles:", np.round(np.quantile(ps, np.linspace(0.1, 0.9, 9)), 3).tolist())
