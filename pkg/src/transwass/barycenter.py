"""Free-support constrained barycenter by alternating minimization.

Alternates two exact subproblem solves: the hub coupling for fixed support
(transshipment) and the support positions for fixed couplings.  The
position subproblem separates per space dimension into independent convex
1-d problems, with a regime per exponent: closed-form weighted mean (p=2),
damped Newton (p>2), weighted median (p=1) and iteratively reweighted
medians (1<p<2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .measures import (BarycenterState, DiscreteMeasure, TransportPlan,
                       distance_from_cost, plan_cost)
from .transship import (TransshipmentProblem, TransshipmentResult,
                        solve_transshipment)


@dataclass(frozen=True)
class BarycenterConfig:
    """Knobs of the alternating minimization loop."""

    kappa: int
    p: float = 2.0
    stop_eps: float = 1e-3
    max_outer_iters: int = 100
    newton_iters: int = 20
    irls_iters: int = 20
    rng_seed: int = 0
    init: str = "sample"

    def __post_init__(self):
        if self.kappa < 1:
            raise InputError("kappa must be >= 1")
        if self.stop_eps <= 0:
            raise InputError("stop_eps must be positive")
        if self.p < 1.0:
            raise InputError(f"exponent p must be >= 1, got {self.p}")
        if self.init not in ("sample", "kmeans"):
            raise InputError(f"unknown init scheme {self.init!r}")


def init_support(mu_x: DiscreteMeasure, mu_y: DiscreteMeasure, kappa: int,
                 seed: int) -> np.ndarray:
    """Draw kappa distinct pooled atom positions, uniformly without replacement."""
    pooled = np.vstack([mu_x.positions, mu_y.positions])
    if kappa > pooled.shape[0]:
        raise InputError(
            f"kappa={kappa} exceeds the {pooled.shape[0]} pooled atom positions"
        )
    rng = np.random.default_rng(seed)
    idx = rng.choice(pooled.shape[0], size=kappa, replace=False)
    return pooled[idx].copy()


def init_support_kmeans(mu_x: DiscreteMeasure, mu_y: DiscreteMeasure,
                        kappa: int, seed: int) -> np.ndarray:
    """Place the initial support at k-means++ centroids of the pooled atoms.

    For p=2 the centroids minimize the quantization energy of the pooled
    cloud, which tends to start the alternation closer to a good local
    minimum than a uniform subsample.
    """
    from scipy.cluster.vq import kmeans2

    pooled = np.vstack([mu_x.positions, mu_y.positions])
    if kappa > pooled.shape[0]:
        raise InputError(
            f"kappa={kappa} exceeds the {pooled.shape[0]} pooled atom positions"
        )
    if kappa == pooled.shape[0]:
        return pooled.copy()
    z, _ = kmeans2(pooled, kappa, minit="++", seed=seed)
    # empty clusters can leave duplicate/degenerate centroids; keep unique rows
    z = np.unique(z, axis=0)
    if z.shape[0] < kappa:
        extra = init_support(mu_x, mu_y, kappa - z.shape[0], seed)
        z = np.vstack([z, extra])
    return z


def _column_slices(plan: TransportPlan, kappa: int):
    """Per-hub (row indices, masses) views of a plan, in column order."""
    order = np.argsort(plan.cols, kind="stable")
    rows = plan.rows[order]
    vals = plan.vals[order]
    counts = np.bincount(plan.cols, minlength=kappa)
    offsets = np.concatenate([[0], np.cumsum(counts)])
    return [(rows[offsets[k]:offsets[k + 1]], vals[offsets[k]:offsets[k + 1]])
            for k in range(kappa)]


def _col_objective(z: float, vals: np.ndarray, weights: np.ndarray, p: float) -> float:
    return float(np.dot(weights, np.abs(vals - z) ** p))


def weighted_median_lower(values: np.ndarray, weights: np.ndarray) -> float:
    """Smallest sample value whose cumulative weight reaches half the total."""
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order])
    half = 0.5 * cum[-1]
    k = int(np.searchsorted(cum, half))
    return float(values[order[min(k, len(order) - 1)]])


def update_positions_p2(plan_x: TransportPlan, plan_y: TransportPlan,
                        x: np.ndarray, y: np.ndarray,
                        z0: np.ndarray | None = None) -> np.ndarray:
    """Closed-form quadratic update: per-hub weighted mean of coupled atoms."""
    kappa = plan_x.shape[1]
    d = x.shape[1]
    num = np.zeros((kappa, d))
    np.add.at(num, plan_x.cols, plan_x.vals[:, None] * x[plan_x.rows])
    np.add.at(num, plan_y.cols, plan_y.vals[:, None] * y[plan_y.rows])
    den = plan_x.col_sums() + plan_y.col_sums()
    z = np.empty((kappa, d))
    alive = den > 0
    z[alive] = num[alive] / den[alive, None]
    if np.any(~alive):
        if z0 is None:
            raise InputError("zero-mass hub column without a previous position")
        z[~alive] = z0[~alive]
    return z


def _per_column_update(plan_x, plan_y, x, y, kappa, coord_update):
    """Run a per-hub, per-coordinate 1-d update rule over both plans."""
    d = x.shape[1]
    cols_x = _column_slices(plan_x, kappa)
    cols_y = _column_slices(plan_y, kappa)
    z = np.empty((kappa, d))
    for k in range(kappa):
        rx, wx = cols_x[k]
        ry, wy = cols_y[k]
        vals = np.concatenate([x[rx], y[ry]])
        weights = np.concatenate([wx, wy])
        for s in range(d):
            z[k, s] = coord_update(vals[:, s], weights, k, s)
    return z


def update_positions_median(plan_x: TransportPlan, plan_y: TransportPlan,
                            x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """p=1 update: lower weighted median of the coupled atom coordinates."""
    def rule(vals, weights, k, s):
        return weighted_median_lower(vals, weights)

    return _per_column_update(plan_x, plan_y, x, y, plan_x.shape[1], rule)


def update_positions_newton(plan_x: TransportPlan, plan_y: TransportPlan,
                            x: np.ndarray, y: np.ndarray, p: float,
                            z0: np.ndarray, iters: int = 20) -> np.ndarray:
    """p>2 update: damped Newton on the (strictly convex) 1-d objectives.

    Steps that increase the objective are halved (up to 30 times); a
    vanishing curvature denominator falls back to bisecting the bracket
    that contains the minimizer.
    """
    if p <= 2.0:
        raise InputError("Newton update requires p > 2")

    def rule(vals, weights, k, s):
        z = float(z0[k, s])
        lo = float(vals.min())
        hi = float(vals.max())
        if lo == hi:
            return lo
        z = min(max(z, lo), hi)
        fz = _col_objective(z, vals, weights, p)
        for _ in range(iters):
            diff = z - vals
            mag = np.abs(diff) ** (p - 2.0)
            grad = float(np.dot(weights, mag * diff))
            if grad > 0:
                hi = z
            elif grad < 0:
                lo = z
            else:
                break
            denom = (p - 1.0) * float(np.dot(weights, mag))
            if denom > 0 and np.isfinite(denom):
                cand = z - grad / denom
            else:
                cand = 0.5 * (lo + hi)
            if not lo < cand < hi:
                cand = 0.5 * (lo + hi)
            step = cand - z
            accepted = False
            for _half in range(30):
                fc = _col_objective(z + step, vals, weights, p)
                if fc <= fz:
                    z = z + step
                    fz = fc
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                break
        return z

    return _per_column_update(plan_x, plan_y, x, y, plan_x.shape[1], rule)


def update_positions_irls(plan_x: TransportPlan, plan_y: TransportPlan,
                          x: np.ndarray, y: np.ndarray, p: float,
                          z0: np.ndarray, iters: int = 20) -> np.ndarray:
    """1<p<2 update: successive weighted medians with weights w*|z - v|^(p-1).

    An atom coinciding with the current z contributes weight exactly 0 to
    the reweighting.  A reweighted median that would increase the true
    objective is rejected, so the objective is non-increasing by
    construction.  Medians can only land on sample points while the
    continuous minimizer generally sits between them, so the settled value
    is polished by bisecting the (monotone) gradient of the objective.
    """
    if not 1.0 < p < 2.0:
        raise InputError("IRLS update requires 1 < p < 2")

    def gradient(z, vals, weights):
        diff = z - vals
        return float(np.dot(weights,
                            np.sign(diff) * np.abs(diff) ** (p - 1.0)))

    def rule(vals, weights, k, s):
        z = float(z0[k, s])
        fz = _col_objective(z, vals, weights, p)
        for _ in range(iters):
            dist = np.abs(vals - z)
            u = weights * np.where(dist > 0, dist ** (p - 1.0), 0.0)
            total = u.sum()
            if total <= 0:
                break
            cand = weighted_median_lower(vals, u)
            if cand == z:
                break
            fc = _col_objective(cand, vals, weights, p)
            if fc > fz:
                break
            z = cand
            fz = fc
        lo = float(vals.min())
        hi = float(vals.max())
        if lo < hi:
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if gradient(mid, vals, weights) > 0:
                    hi = mid
                else:
                    lo = mid
            cand = 0.5 * (lo + hi)
            fc = _col_objective(cand, vals, weights, p)
            if fc <= fz:
                z = cand
        return z

    return _per_column_update(plan_x, plan_y, x, y, plan_x.shape[1], rule)


def update_positions(plan_x, plan_y, x, y, p, z0, config: BarycenterConfig):
    """Dispatch to the exponent-appropriate position update."""
    if p == 2.0:
        return update_positions_p2(plan_x, plan_y, x, y, z0)
    if p == 1.0:
        return update_positions_median(plan_x, plan_y, x, y)
    if p > 2.0:
        return update_positions_newton(plan_x, plan_y, x, y, p, z0,
                                       config.newton_iters)
    return update_positions_irls(plan_x, plan_y, x, y, p, z0, config.irls_iters)


def _restrict_columns(plan: TransportPlan, keep: np.ndarray) -> TransportPlan:
    """Drop pruned hub columns and reindex the survivors."""
    new_index = -np.ones(len(keep), dtype=np.int64)
    new_index[keep] = np.arange(int(keep.sum()))
    mask = keep[plan.cols]
    return TransportPlan((plan.shape[0], int(keep.sum())),
                         plan.rows[mask], new_index[plan.cols[mask]],
                         plan.vals[mask])


def bar_wp(mu_x: DiscreteMeasure, mu_y: DiscreteMeasure,
           config: BarycenterConfig,
           trace: list | None = None) -> tuple[float, BarycenterState]:
    """Constrained-barycenter approximation of the p-th-power distance.

    Returns ``(cost_tilde, state)`` where
    ``cost_tilde = (<c_xz, gx>^(1/p) + <c_yz, gy>^(1/p))^p`` for the final
    support and its optimal couplings, an upper bound on W_p^p.

    ``trace``, when a list is supplied, collects the transshipment
    objective of every outer iteration (monotonicity diagnostics).
    """
    p = config.p
    if config.init == "kmeans":
        z = init_support_kmeans(mu_x, mu_y, config.kappa, config.rng_seed)
    else:
        z = init_support(mu_x, mu_y, config.kappa, config.rng_seed)
    x = mu_x.positions
    y = mu_y.positions

    prev = None  # warm-start basis: only hub positions change between solves
    for _ in range(config.max_outer_iters):
        res = solve_transshipment(TransshipmentProblem(mu_x, mu_y, z, p),
                                  start=prev)
        if trace is not None:
            trace.append(res.objective)
        keep = res.hub_weights > 0
        plan_x, plan_y = res.plan_x, res.plan_y
        if not np.all(keep):
            z = z[keep]
            plan_x = _restrict_columns(plan_x, keep)
            plan_y = _restrict_columns(plan_y, keep)
            prev = TransshipmentResult(plan_x=plan_x, plan_y=plan_y,
                                       objective=res.objective,
                                       hub_weights=res.hub_weights[keep])
        else:
            prev = res
        z_new = update_positions(plan_x, plan_y, x, y, p, z, config)
        denom = np.linalg.norm(z)
        delta = np.linalg.norm(z_new - z)
        z = z_new
        if delta <= config.stop_eps * denom or delta == 0.0:
            break

    res = solve_transshipment(TransshipmentProblem(mu_x, mu_y, z, p),
                              start=prev)
    if trace is not None:
        trace.append(res.objective)
    keep = res.hub_weights > 0
    plan_x, plan_y = res.plan_x, res.plan_y
    wz = res.hub_weights
    if not np.all(keep):
        z = z[keep]
        wz = wz[keep]
        plan_x = _restrict_columns(plan_x, keep)
        plan_y = _restrict_columns(plan_y, keep)

    side_x = plan_cost(plan_x, x, z, p)
    side_y = plan_cost(plan_y, y, z, p)
    cost_tilde = (distance_from_cost(side_x, p) + distance_from_cost(side_y, p)) ** p
    state = BarycenterState(support=z, weights=wz, plan_x=plan_x,
                            plan_y=plan_y, p=p)
    return float(cost_tilde), state
