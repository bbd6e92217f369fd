#!/usr/bin/env python3
"""Runtime scaling: exact solver vs multi-scale approximation over n.

Generates random 2D clouds of increasing size and times both paths (the
exact path is skipped once it would exceed --exact-limit atoms per side).

Usage:
    python3 scripts/runtime_scaling.py [--sizes 500,1000,2000,5000]
                                       [--kappa 16] [--seed 0]
"""

import argparse
import sys
import time

import numpy as np

from transwass import (MultiscaleConfig, approx_wp, distance_from_cost,
                       generate_synthetic, solve_exact)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="500,1000,2000,5000")
    ap.add_argument("--kappa", type=int, default=16)
    ap.add_argument("--threshold", type=int, default=2000)
    ap.add_argument("--exact-limit", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'n':>8} {'exact[s]':>10} {'approx[s]':>10} {'rel_err':>10}")
    for n in (int(s) for s in args.sizes.split(",")):
        mu_x = generate_synthetic("random", n, 2, args.seed)
        mu_y = generate_synthetic("random", n, 2, args.seed + 1)
        cfg = MultiscaleConfig(kappa=args.kappa, threshold=args.threshold,
                               rng_seed=args.seed, top_level_shortcut=False)
        t0 = time.perf_counter()
        res = approx_wp(mu_x, mu_y, cfg)
        t_approx = time.perf_counter() - t0
        if n <= args.exact_limit:
            t0 = time.perf_counter()
            exact_cost, _ = solve_exact(mu_x, mu_y, 2.0)
            t_exact = time.perf_counter() - t0
            d = distance_from_cost(exact_cost, 2.0)
            rel = (distance_from_cost(res.cost, 2.0) - d) / d
            print(f"{n:>8} {t_exact:>10.2f} {t_approx:>10.2f} {rel:>10.4%}")
        else:
            print(f"{n:>8} {'-':>10} {t_approx:>10.2f} {'-':>10}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
