"""Multi-scale refinement: turn a hub coupling into a sparse global plan.

The barycenter stage acts as a clustering; every hub induces a pair of
partial measures (the mass it relays from each side).  Each cluster is
then resolved exactly when small enough, refined recursively otherwise,
and the cluster plans are scattered back into a global sparse coupling.
Composing the two hub plans directly (``gx diag(wz)^-1 gy^T``) gives the
coarser block coupling used as a bound and as a last-resort fallback.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .barycenter import BarycenterConfig, bar_wp
from .errors import InputError, TranswassError
from .flow import solve_exact
from .measures import BarycenterState, DiscreteMeasure, TransportPlan, plan_cost

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MultiscaleConfig:
    """Cluster-and-refine strategy knobs."""

    kappa: int = 16
    p: float = 2.0
    threshold: int = 2000          # clusters below this size are solved exactly
    max_depth: int = 10
    workers: int = 1
    rng_seed: int = 0
    stop_eps: float = 1e-3
    max_outer_iters: int = 100
    top_level_shortcut: bool = True
    recursion_kappa: int | None = None

    def __post_init__(self):
        if self.threshold < 2:
            raise InputError("threshold must be >= 2")
        if self.kappa < 1:
            raise InputError("kappa must be >= 1")
        if self.max_depth < 1 or self.workers < 1:
            raise InputError("max_depth and workers must be >= 1")

    def barycenter_config(self, depth: int, seed: int) -> BarycenterConfig:
        kappa = self.kappa
        if depth > 0 and self.recursion_kappa is not None:
            kappa = self.recursion_kappa
        return BarycenterConfig(kappa=kappa, p=self.p, stop_eps=self.stop_eps,
                                max_outer_iters=self.max_outer_iters,
                                rng_seed=seed)


@dataclass(frozen=True)
class MultiscaleResult:
    cost: float
    plan: TransportPlan
    depth_fallbacks: int = 0       # clusters resolved by block plans at max depth

    def __iter__(self):
        return iter((self.cost, self.plan))


def compose_plan(state: BarycenterState) -> TransportPlan:
    """Compose the two hub plans into an m x n coupling.

    ``gamma_hat[i, j] = sum_k gx[i, k] * gy[j, k] / wz[k]`` -- every source
    and sink routed through the same hub gets coupled, which preserves both
    marginals exactly.
    """
    gx, gy = state.plan_x, state.plan_y
    m, n = gx.shape[0], gy.shape[0]
    cols_x = _group_by_column(gx, state.kappa)
    cols_y = _group_by_column(gy, state.kappa)
    rows, cols, vals = [], [], []
    for k in range(state.kappa):
        wzk = state.weights[k]
        rx, vx = cols_x[k]
        ry, vy = cols_y[k]
        if wzk <= 0:
            if vx.size or vy.size:
                raise TranswassError(
                    f"hub {k} has zero weight but nonzero column mass"
                )
            continue
        rows.append(np.repeat(rx, ry.size))
        cols.append(np.tile(ry, rx.size))
        vals.append((np.outer(vx, vy) / wzk).ravel())
    return _coalesce((m, n), np.concatenate(rows), np.concatenate(cols),
                     np.concatenate(vals))


def _group_by_column(plan: TransportPlan, kappa: int):
    order = np.argsort(plan.cols, kind="stable")
    rows = plan.rows[order]
    vals = plan.vals[order]
    counts = np.bincount(plan.cols, minlength=kappa)
    offsets = np.concatenate([[0], np.cumsum(counts)])
    return [(rows[offsets[k]:offsets[k + 1]], vals[offsets[k]:offsets[k + 1]])
            for k in range(kappa)]


def extract_cluster(state: BarycenterState, mu_x: DiscreteMeasure,
                    mu_y: DiscreteMeasure, k: int
                    ) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """Partial measures relayed through hub k; both carry mass wz_k."""
    if not 0 <= k < state.kappa:
        raise InputError(f"cluster index {k} out of range")
    if state.weights[k] <= 0:
        raise InputError(f"hub {k} carries no mass")
    rx, vx, ry, vy = _cluster_indices(state, k)
    sub_x = DiscreteMeasure(mu_x.positions[rx], vx, total_mass=float(vx.sum()))
    sub_y = DiscreteMeasure(mu_y.positions[ry], vy, total_mass=float(vy.sum()))
    return sub_x, sub_y


def _cluster_indices(state: BarycenterState, k: int):
    mask_x = state.plan_x.cols == k
    mask_y = state.plan_y.cols == k
    return (state.plan_x.rows[mask_x], state.plan_x.vals[mask_x],
            state.plan_y.rows[mask_y], state.plan_y.vals[mask_y])


def _coalesce(shape, rows, cols, vals) -> TransportPlan:
    """Merge duplicate (i, j) cells additively into one sparse plan."""
    m, n = shape
    keys = rows * n + cols
    uniq, inv = np.unique(keys, return_inverse=True)
    merged = np.zeros(uniq.size)
    np.add.at(merged, inv, vals)
    return TransportPlan(shape, uniq // n, uniq % n, merged)


def _child_config(config: MultiscaleConfig, depth: int, k: int,
                  limit: int) -> BarycenterConfig:
    """Barycenter config for a recursive call, seeded by (depth, cluster)."""
    seed = int(np.random.SeedSequence([config.rng_seed, depth, k])
               .generate_state(1)[0])
    cfg = config.barycenter_config(depth, seed)
    if cfg.kappa > limit:
        cfg = BarycenterConfig(kappa=limit, p=cfg.p, stop_eps=cfg.stop_eps,
                               max_outer_iters=cfg.max_outer_iters,
                               rng_seed=cfg.rng_seed)
    return cfg


def _solve_cluster(args):
    (k, rx, vx, ry, vy, x, y, config, depth) = args
    sx = float(vx.sum())
    sub_x = DiscreteMeasure(x[rx], vx / sx)
    sub_y = DiscreteMeasure(y[ry], vy / vy.sum())
    mk, nk = sub_x.size, sub_y.size
    fallbacks = 0
    if mk + nk < config.threshold:
        cost, plan = solve_exact(sub_x, sub_y, config.p)
    elif depth + 1 < config.max_depth:
        cfg = _child_config(config, depth + 1, k, mk + nk)
        _, sub_state = bar_wp(sub_x, sub_y, cfg)
        sub = refine_state(sub_state, sub_x, sub_y, config, depth=depth + 1)
        cost, plan, fallbacks = sub.cost, sub.plan, sub.depth_fallbacks
    else:
        # Last resort: keep the block coupling for this cluster.
        cfg = _child_config(config, depth + 1, k, mk + nk)
        _, sub_state = bar_wp(sub_x, sub_y, cfg)
        plan = compose_plan(sub_state)
        cost = plan_cost(plan, sub_x.positions, sub_y.positions, config.p)
        fallbacks = 1
    # Map back to global indices and global mass.
    return (k, cost * sx, rx[plan.rows], ry[plan.cols], plan.vals * sx,
            fallbacks)


def refine_state(state: BarycenterState, mu_x: DiscreteMeasure,
                 mu_y: DiscreteMeasure, config: MultiscaleConfig,
                 depth: int = 0) -> MultiscaleResult:
    """Refine every hub cluster of an existing barycenter state."""
    x, y = mu_x.positions, mu_y.positions
    cols_x = _group_by_column(state.plan_x, state.kappa)
    cols_y = _group_by_column(state.plan_y, state.kappa)
    tasks = [(k, cols_x[k][0], cols_x[k][1], cols_y[k][0], cols_y[k][1],
              x, y, config, depth)
             for k in range(state.kappa) if state.weights[k] > 0]

    if depth == 0 and config.workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_solve_cluster, tasks))
    else:
        results = [_solve_cluster(t) for t in tasks]
    results.sort(key=lambda r: r[0])  # deterministic merge by cluster index

    total = 0.0
    fallbacks = 0
    rows = []
    cols = []
    vals = []
    for _k, cost, gr, gc, gv, fb in results:
        total += cost
        fallbacks += fb
        rows.append(gr)
        cols.append(gc)
        vals.append(gv)
    plan = _coalesce((mu_x.size, mu_y.size), np.concatenate(rows),
                     np.concatenate(cols), np.concatenate(vals))
    if fallbacks:
        logger.warning("%d cluster(s) fell back to block plans at max depth",
                       fallbacks)
    return MultiscaleResult(cost=total, plan=plan, depth_fallbacks=fallbacks)


def approx_wp(mu_x: DiscreteMeasure, mu_y: DiscreteMeasure,
              config: MultiscaleConfig) -> MultiscaleResult:
    """Multi-scale approximation of the p-th-power Wasserstein distance.

    Clusters with fewer than ``threshold`` combined atoms are solved
    exactly; larger ones recurse.  When the whole problem is already below
    the threshold the exact solver is called directly (disable with
    ``top_level_shortcut=False``).
    """
    if config.top_level_shortcut and mu_x.size + mu_y.size < config.threshold:
        cost, plan = solve_exact(mu_x, mu_y, config.p)
        return MultiscaleResult(cost=cost, plan=plan)
    kappa = min(config.kappa, mu_x.size + mu_y.size)
    cfg = config.barycenter_config(depth=0, seed=config.rng_seed)
    if kappa != cfg.kappa:
        cfg = BarycenterConfig(kappa=kappa, p=cfg.p, stop_eps=cfg.stop_eps,
                               max_outer_iters=cfg.max_outer_iters,
                               rng_seed=cfg.rng_seed)
    _, state = bar_wp(mu_x, mu_y, cfg)
    return refine_state(state, mu_x, mu_y, config, depth=0)
