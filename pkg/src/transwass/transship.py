"""Fixed-support transshipment: route mass from x-atoms to y-atoms through hubs.

For given hub positions z the coupled pair (gamma_x, gamma_y) minimizing
``<gamma_x, c_xz> + <gamma_y, c_yz>`` subject to the marginal and
hub-conservation constraints is a min-cost flow on a 3-layer graph with
m + kappa + n nodes and (m + n) * kappa arcs; the same simplex engine used
for exact transport solves it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _simplex
from .errors import InfeasibilityError, InputError, SolverError
from .flow import MASS_SCALE, _check_equal_mass, apportion, default_pivot_cap
from .measures import DiscreteMeasure, TransportPlan, pairwise_cost

_EMPTY_POS = np.empty((0, 1), dtype=np.float64)
_EMPTY_I = np.empty(0, dtype=np.int64)


@dataclass(frozen=True)
class TransshipmentProblem:
    """x-side and y-side measures plus the fixed hub support and exponent."""

    mu_x: DiscreteMeasure
    mu_y: DiscreteMeasure
    support: np.ndarray
    p: float = 2.0

    def __post_init__(self):
        sup = np.asarray(self.support, dtype=np.float64)
        if sup.ndim == 1:
            sup = sup[:, None]
        if sup.ndim != 2 or sup.shape[0] < 1:
            raise InputError("support must be a non-empty (kappa, d) array")
        if sup.shape[1] != self.mu_x.dim or self.mu_x.dim != self.mu_y.dim:
            raise InputError("support and measures must share one dimension d")
        if self.p < 1.0:
            raise InputError(f"exponent p must be >= 1, got {self.p}")
        object.__setattr__(self, "support", sup)

    @property
    def kappa(self) -> int:
        return self.support.shape[0]


@dataclass(frozen=True)
class TransshipmentResult:
    plan_x: TransportPlan        # m x kappa
    plan_y: TransportPlan        # n x kappa
    objective: float             # <gamma_x, c_xz> + <gamma_y, c_yz>
    hub_weights: np.ndarray      # kappa column masses (exactly equal both sides)

    @property
    def zero_hubs(self) -> np.ndarray:
        """Indices of hubs that carry no flow (candidates for pruning)."""
        return np.nonzero(self.hub_weights == 0.0)[0]


def solve_transshipment(prob: TransshipmentProblem,
                        pivot_cap: int | None = None,
                        start: TransshipmentResult | None = None
                        ) -> TransshipmentResult:
    """Globally optimal hub coupling for fixed hub positions.

    ``start`` warm-starts the simplex from the basis of a previous solve
    on the same measures and hub count (only the hub positions, i.e. the
    arc costs, may differ).
    """
    mu_x = prob.mu_x
    mu_y = _check_equal_mass(prob.mu_x, prob.mu_y)
    z = prob.support
    m, n, kappa = mu_x.size, mu_y.size, prob.kappa

    cxz = pairwise_cost(mu_x.positions, z, prob.p)   # (m, kappa)
    cyz = pairwise_cost(mu_y.positions, z, prob.p)   # (n, kappa)

    scale_mass = mu_x.total_mass
    wx = apportion(mu_x.weights / scale_mass, MASS_SCALE)
    wy = apportion(mu_y.weights / scale_mass, MASS_SCALE)
    supply = np.concatenate([wx, np.zeros(kappa, dtype=np.int64), -wy])

    # Arcs 0 .. m*kappa-1: source i -> hub k (id i*kappa + k).
    # Arcs m*kappa .. end: hub k -> sink j (id m*kappa + k*n + j).
    tails = np.concatenate([
        np.repeat(np.arange(m, dtype=np.int64), kappa),
        m + np.repeat(np.arange(kappa, dtype=np.int64), n),
    ])
    heads = np.concatenate([
        m + np.tile(np.arange(kappa, dtype=np.int64), m),
        m + kappa + np.tile(np.arange(n, dtype=np.int64), kappa),
    ])
    costs = np.concatenate([cxz.ravel(), cyz.T.ravel()])

    if pivot_cap is None:
        pivot_cap = default_pivot_cap(m + n + kappa)
    init_arcs = _EMPTY_I
    if start is not None and start.plan_x.shape == (m, kappa) \
            and start.plan_y.shape == (n, kappa):
        init_arcs = np.concatenate([
            start.plan_x.rows * kappa + start.plan_x.cols,
            m * kappa + start.plan_y.cols * n + start.plan_y.rows,
        ])
    # A warm basis is occasionally so degenerate that the simplex stalls;
    # bound the warm attempt tightly and fall back to a cold solve.
    warm_cap = min(pivot_cap, 10_000 + 4 * (m + n + kappa))
    status, obj, arcs, flows, _pi = _simplex.simplex_core(
        supply, tails, heads, costs,
        False, _EMPTY_POS, _EMPTY_POS, 2.0,
        warm_cap if init_arcs.size else pivot_cap, init_arcs,
    )
    if status == _simplex.STATUS_PIVOT_LIMIT and init_arcs.size:
        status, obj, arcs, flows, _pi = _simplex.simplex_core(
            supply, tails, heads, costs,
            False, _EMPTY_POS, _EMPTY_POS, 2.0, pivot_cap, _EMPTY_I,
        )
    if status == _simplex.STATUS_PIVOT_LIMIT:
        raise SolverError(f"network simplex hit the pivot cap ({pivot_cap})")
    if status != _simplex.STATUS_OK:
        raise InfeasibilityError("transshipment problem reported infeasible")

    unit = scale_mass / MASS_SCALE
    x_side = arcs < m * kappa
    ax = arcs[x_side]
    ay = arcs[~x_side] - m * kappa
    rows_x = ax // kappa
    cols_x = ax - rows_x * kappa
    cols_y = ay // n
    rows_y = ay - cols_y * n

    wz_int = np.zeros(kappa, dtype=np.int64)
    np.add.at(wz_int, cols_x, flows[x_side])

    plan_x = TransportPlan((m, kappa), rows_x, cols_x, flows[x_side] * unit)
    plan_y = TransportPlan((n, kappa), rows_y, cols_y, flows[~x_side] * unit)
    return TransshipmentResult(
        plan_x=plan_x,
        plan_y=plan_y,
        objective=float(obj) * unit,
        hub_weights=wz_int * unit,
    )
