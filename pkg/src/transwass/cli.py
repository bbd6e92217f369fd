"""Command-line front-end.

Subcommands: ``exact``, ``approx``, ``compare``, ``bench``, ``gen``.
Exit codes: 0 success, 1 malformed input, 2 resource or feasibility limit.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

import numpy as np

from . import io as twio
from .errors import InfeasibilityError, InputError, ResourceLimitError
from .flow import solve_exact
from .multiscale import MultiscaleConfig, approx_wp
from .reports import (make_report, run_compare, summarize_errors,
                      write_plot_csv, write_report)
from .synthetic import GRID_CLASSES, generate_grid_image, generate_synthetic

logger = logging.getLogger(__name__)


def _add_io_args(sub):
    sub.add_argument("x", help="source measure file")
    sub.add_argument("y", help="target measure file")
    sub.add_argument("--format", choices=twio.FORMATS, default="cloud",
                     help="input file format (default: cloud)")
    sub.add_argument("--out-plan", metavar="PATH",
                     help="write the sparse coupling as 'i j mass' lines")
    sub.add_argument("--out-report", metavar="PATH",
                     help="write key:value result records")


def _add_common_args(sub):
    sub.add_argument("--p", type=float, default=2.0,
                     help="ground cost exponent (default: 2)")
    sub.add_argument("--seed", type=int, default=0)


def _add_approx_args(sub, multi_kappa=False):
    if multi_kappa:
        sub.add_argument("--kappa", default="16",
                         help="comma-separated hub counts (default: 16)")
    else:
        sub.add_argument("--kappa", type=int, default=16,
                         help="number of hubs (default: 16)")
    sub.add_argument("--threshold", type=int, default=2000,
                     help="below this combined size clusters are solved "
                          "exactly (default: 2000)")
    sub.add_argument("--threads", type=int,
                     default=int(os.environ.get("TRANSWASS_THREADS", "1")),
                     help="worker threads for top-level clusters "
                          "(default: $TRANSWASS_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transwass",
        description="Exact and multi-scale approximate Wasserstein distances "
                    "between discrete measures.")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("exact", help="exact distance by network simplex")
    _add_io_args(s)
    _add_common_args(s)

    s = subs.add_parser("approx", help="multi-scale approximate distance")
    _add_io_args(s)
    _add_common_args(s)
    _add_approx_args(s)

    s = subs.add_parser("compare",
                        help="exact vs. approximations across hub counts")
    _add_io_args(s)
    _add_common_args(s)
    _add_approx_args(s, multi_kappa=True)
    s.add_argument("--out-plot", metavar="PATH",
                   help="CSV with columns kappa,rel_error,time")

    s = subs.add_parser("bench",
                        help="accuracy benchmark on synthetic grid images")
    _add_common_args(s)
    _add_approx_args(s)
    s.add_argument("--size", type=int, default=32, help="image side length")
    s.add_argument("--pairs", type=int, default=20,
                   help="number of random image pairs (default: 20)")
    s.add_argument("--dir", metavar="PATH", dest="image_dir",
                   help="directory of CSV images to benchmark instead of "
                        "the generated synthetic classes")
    s.add_argument("--out-report", metavar="PATH")
    s.add_argument("--out-plot", metavar="PATH")

    s = subs.add_parser("gen", help="generate a synthetic measure file")
    s.add_argument("--kind", choices=["smooth", "random", "image"],
                   default="smooth")
    s.add_argument("--n", type=int, default=1000, help="number of atoms")
    s.add_argument("--d", type=int, default=2, help="space dimension")
    s.add_argument("--image-class", choices=GRID_CLASSES, default="bumps3")
    s.add_argument("--size", type=int, default=32,
                   help="image side length (kind=image)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True, metavar="PATH")
    return parser


def _load_pair(args):
    return (twio.load_measure(args.x, args.format),
            twio.load_measure(args.y, args.format))


def _emit(args, reports, plan):
    if getattr(args, "out_plan", None) and plan is not None:
        twio.save_plan(args.out_plan, plan)
    if getattr(args, "out_report", None):
        write_report(args.out_report, reports)
    if getattr(args, "out_plot", None):
        write_plot_csv(args.out_plot, reports)
    for rec in reports:
        print(f"{rec.method}: distance={rec.distance:.12g} "
              f"cost={rec.cost:.12g} time={rec.wall_time:.3f}s"
              + (f" kappa={rec.kappa}" if rec.kappa is not None else "")
              + (f" rel_error={rec.rel_error:.3e}"
                 if rec.rel_error is not None else ""))


def cmd_exact(args) -> int:
    mu_x, mu_y = _load_pair(args)
    t0 = time.perf_counter()
    cost, plan = solve_exact(mu_x, mu_y, args.p)
    rec = make_report("exact", args.p, cost, plan, time.perf_counter() - t0,
                      args.seed)
    _emit(args, [rec], plan)
    return 0


def cmd_approx(args) -> int:
    mu_x, mu_y = _load_pair(args)
    config = MultiscaleConfig(kappa=args.kappa, p=args.p,
                              threshold=args.threshold, workers=args.threads,
                              rng_seed=args.seed)
    t0 = time.perf_counter()
    result = approx_wp(mu_x, mu_y, config)
    rec = make_report("multiscale", args.p, result.cost, result.plan,
                      time.perf_counter() - t0, args.seed, kappa=args.kappa,
                      threshold=args.threshold)
    _emit(args, [rec], result.plan)
    return 0


def cmd_compare(args) -> int:
    mu_x, mu_y = _load_pair(args)
    try:
        kappas = [int(k) for k in args.kappa.split(",") if k.strip()]
    except ValueError:
        raise InputError(f"--kappa must be comma-separated integers, "
                         f"got {args.kappa!r}") from None
    if not kappas:
        raise InputError("--kappa gave no hub counts")
    reports = run_compare(mu_x, mu_y, args.p, kappas, threshold=args.threshold,
                          seed=args.seed, workers=args.threads)
    _emit(args, reports, None)
    return 0


def cmd_bench(args) -> int:
    rng = np.random.default_rng(args.seed)
    config = MultiscaleConfig(kappa=args.kappa, p=args.p,
                              threshold=args.threshold, workers=args.threads,
                              rng_seed=args.seed)
    pool = None
    if args.image_dir:
        names = sorted(f for f in os.listdir(args.image_dir)
                       if f.endswith(".csv"))
        if len(names) < 2:
            raise InputError(f"{args.image_dir}: need at least two .csv images")
        pool = [twio.load_grid_image(os.path.join(args.image_dir, f))
                for f in names]
    reports = []
    for pair_index in range(args.pairs):
        if pool is not None:
            ia, ib = rng.choice(len(pool), size=2, replace=False)
            label_a, label_b = names[ia], names[ib]
            mu_x, mu_y = pool[ia], pool[ib]
        else:
            ca, cb = rng.choice(len(GRID_CLASSES), size=2)
            sa, sb = (int(s) for s in rng.integers(0, 10**6, size=2))
            label_a, label_b = GRID_CLASSES[ca], GRID_CLASSES[cb]
            mu_x = twio.measure_from_grid(
                generate_grid_image(label_a, args.size, sa))
            mu_y = twio.measure_from_grid(
                generate_grid_image(label_b, args.size, sb))
        t0 = time.perf_counter()
        exact_cost, _ = solve_exact(mu_x, mu_y, args.p)
        t_exact = time.perf_counter() - t0
        t0 = time.perf_counter()
        result = approx_wp(mu_x, mu_y, config)
        t_approx = time.perf_counter() - t0
        rec = make_report("multiscale", args.p, result.cost, result.plan,
                          t_approx, args.seed, kappa=args.kappa,
                          threshold=args.threshold,
                          reference_cost=exact_cost)
        reports.append(rec)
        print(f"pair {pair_index}: {label_a} vs {label_b} "
              f"rel_error={rec.rel_error:.4%} "
              f"exact={t_exact:.2f}s approx={t_approx:.2f}s")
    summary = summarize_errors(reports)
    for key, value in summary.items():
        print(f"{key}: {value}")
    if args.out_report:
        write_report(args.out_report, reports)
    if args.out_plot:
        write_plot_csv(args.out_plot, reports)
    return 0


def cmd_gen(args) -> int:
    if args.kind == "image":
        twio.save_grid_image(
            args.out, generate_grid_image(args.image_class, args.size,
                                          args.seed))
    else:
        twio.save_point_cloud(
            args.out, generate_synthetic(args.kind, args.n, args.d, args.seed))
    print(f"wrote {args.out}")
    return 0


_COMMANDS = {"exact": cmd_exact, "approx": cmd_approx, "compare": cmd_compare,
             "bench": cmd_bench, "gen": cmd_gen}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ResourceLimitError, InfeasibilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
