"""Seed scan for tail-fit recovery: power-law alpha and lognormal Vuong decisions.

    python3 scripts/recovery_scan.py --seeds 20 --rule min
"""

import argparse
import time

import numpy as np

from eventlens import tailfit as T


def alpha_scan(seeds, alpha, n):
    kind = T.ModelKind("powerlaw", (alpha,))
    rows = []
    for seed in range(seeds):
        s = T.sample_model(kind, 1, n, seed)
        t0 = time.perf_counter()
        fit = T.fit_model(s, "powerlaw", warn_small_tail=False)
        rows.append((seed, fit.model.params[0], fit.xmin, time.perf_counter() - t0))
    return rows


def lognormal_scan(seeds, mu, sigma, n, rule):
    kind = T.ModelKind("lognormal", (mu, sigma))
    rows = []
    for seed in range(seeds):
        s = T.sample_model(kind, 1, n, 1000 + seed)
        rep = T.select_best(s, config=T.SelectionConfig(run_gof=False, comparison_xmin=rule))
        fav = rep.favored_over("lognormal")
        ps = {c.second if c.first == "lognormal" else c.first: c.p_value
              for c in rep.comparisons if "lognormal" in (c.first, c.second)}
        rows.append((seed, fav, ps))
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--alpha", type=float, default=2.5)
    ap.add_argument("--mu", type=float, default=1.0)
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--rule", choices=("min", "max"), default="min")
    args = ap.parse_args()

    rows = alpha_scan(args.seeds, args.alpha, 10_000)
    est = np.array([r[1] for r in rows])
    for seed, a, xmin, dt in rows:
        print(f"seed {seed:2d}  alpha {a:.4f}  xmin {xmin}  {dt:.2f}s")
    print(f"within 0.05: {(np.abs(est - args.alpha) <= 0.05).sum()}/{len(rows)}")

    rows = lognormal_scan(args.seeds, args.mu, args.sigma, 5000, args.rule)
    for seed, fav, ps in rows:
        print(f"seed {seed:2d}  " + "  ".join(f"{k}:{'win' if fav.get(k) else '---'} p={p:.2g}"
                                               for k, p in sorted(ps.items())))
    wins = sum(all(f.values()) and all(p <= 0.05 for p in ps.values()) for _, f, ps in rows)
    print(f"lognormal favoured over all alternatives (p <= 0.05): {wins}/{len(rows)}")
