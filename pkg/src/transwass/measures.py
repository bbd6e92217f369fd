"""Core domain types: discrete measures, ground costs and sparse transport plans.

All costs exchanged between modules live on the p-th-power scale
(sums ``<gamma, c>`` with ``c_ij = sum_s |x_i^s - y_j^s|^p``); use
:func:`distance_from_cost` to convert a cost into an actual distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

#: Relative tolerance for the declared total mass of a measure.
MASS_RTOL = 1e-12

#: Absolute tolerance on plan marginals, used by every consistency check.
MARGINAL_ATOL = 1e-9


def _as_positions(positions) -> np.ndarray:
    pos = np.asarray(positions, dtype=np.float64)
    if pos.ndim == 1:
        pos = pos[:, None]
    if pos.ndim != 2 or pos.shape[0] == 0 or pos.shape[1] == 0:
        raise InputError(f"positions must be a non-empty (n, d) array, got shape {pos.shape}")
    if not np.all(np.isfinite(pos)):
        raise InputError("positions contain non-finite values")
    return pos


@dataclass(frozen=True)
class DiscreteMeasure:
    """A weighted point cloud ``sum_i w_i * delta(x_i)`` in R^d.

    Zero-weight atoms are dropped on construction; the remaining weights
    must be nonnegative and sum to ``total_mass`` within 1e-12 relative.
    """

    positions: np.ndarray
    weights: np.ndarray
    total_mass: float = 1.0

    def __post_init__(self):
        pos = _as_positions(self.positions)
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.shape[0] != pos.shape[0]:
            raise InputError(
                f"weights shape {w.shape} does not match {pos.shape[0]} positions"
            )
        if not np.all(np.isfinite(w)):
            raise InputError("weights contain non-finite values")
        if np.any(w < 0):
            raise InputError("weights must be nonnegative")
        keep = w > 0
        if not np.any(keep):
            raise InputError("measure has no atom with positive weight")
        if not np.all(keep):
            pos = pos[keep]
            w = w[keep]
        total = float(w.sum())
        if abs(total - self.total_mass) > MASS_RTOL * max(abs(self.total_mass), 1.0):
            raise InputError(
                f"weights sum to {total!r}, declared total mass is {self.total_mass!r}"
            )
        pos.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    def normalized(self) -> "DiscreteMeasure":
        """Return the same atoms rescaled to total mass 1."""
        return DiscreteMeasure(self.positions, self.weights / self.total_mass, 1.0)


@dataclass(frozen=True)
class GroundCost:
    """Componentwise L^p ground cost ``c(a, b) = sum_s |a_s - b_s|^p``, p >= 1."""

    p: float = 2.0

    def __post_init__(self):
        if not np.isfinite(self.p) or self.p < 1.0:
            raise InputError(f"exponent p must be a finite real >= 1, got {self.p}")

    def __call__(self, a, b) -> float:
        return ground_cost(a, b, self.p)

    def pairwise(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return pairwise_cost(x, y, self.p)


def ground_cost(a, b, p: float) -> float:
    """Cost ``sum_s |a_s - b_s|^p`` between two points of equal dimension."""
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    if a.shape != b.shape:
        raise InputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if p < 1.0:
        raise InputError(f"exponent p must be >= 1, got {p}")
    diff = np.abs(a - b)
    if p == 2.0:
        return float(np.dot(diff, diff))
    if p == 1.0:
        return float(diff.sum())
    return float((diff**p).sum())


def pairwise_cost(x: np.ndarray, y: np.ndarray, p: float) -> np.ndarray:
    """Dense (m, n) matrix of componentwise L^p costs between two point sets."""
    x = _as_positions(x)
    y = _as_positions(y)
    if x.shape[1] != y.shape[1]:
        raise InputError(f"dimension mismatch: d={x.shape[1]} vs d={y.shape[1]}")
    diff = np.abs(x[:, None, :] - y[None, :, :])
    if p == 2.0:
        out = np.einsum("ijs,ijs->ij", diff, diff)
    elif p == 1.0:
        out = diff.sum(axis=2)
    else:
        out = (diff**p).sum(axis=2)
    return out


def distance_from_cost(cost: float, p: float) -> float:
    """Convert a p-th-power transport cost into the associated distance."""
    return float(max(cost, 0.0) ** (1.0 / p))


@dataclass(frozen=True)
class TransportPlan:
    """Sparse nonnegative coupling between an m-atom and an n-atom measure.

    Stored in COO form; entries with zero mass are dropped on construction.
    """

    shape: tuple[int, int]
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    def __post_init__(self):
        m, n = self.shape
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        vals = np.asarray(self.vals, dtype=np.float64)
        if not (rows.shape == cols.shape == vals.shape) or rows.ndim != 1:
            raise InputError("rows, cols and vals must be 1-d arrays of equal length")
        if np.any(vals < 0):
            raise InputError("plan entries must be nonnegative")
        keep = vals > 0
        if not np.all(keep):
            rows, cols, vals = rows[keep], cols[keep], vals[keep]
        if rows.size and (
            rows.min() < 0 or rows.max() >= m or cols.min() < 0 or cols.max() >= n
        ):
            raise InputError("plan entry index out of range")
        for arr in (rows, cols, vals):
            arr.setflags(write=False)
        object.__setattr__(self, "shape", (int(m), int(n)))
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "vals", vals)

    @property
    def n_entries(self) -> int:
        return self.vals.size

    @property
    def total_mass(self) -> float:
        return float(self.vals.sum())

    def row_sums(self) -> np.ndarray:
        return np.bincount(self.rows, weights=self.vals, minlength=self.shape[0])

    def col_sums(self) -> np.ndarray:
        return np.bincount(self.cols, weights=self.vals, minlength=self.shape[1])

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape)
        np.add.at(out, (self.rows, self.cols), self.vals)
        return out

    def transpose(self) -> "TransportPlan":
        return TransportPlan((self.shape[1], self.shape[0]), self.cols, self.rows, self.vals)

    def check_marginals(self, row_weights: np.ndarray, col_weights: np.ndarray,
                        atol: float = MARGINAL_ATOL) -> None:
        """Raise :class:`InputError` unless marginals match within ``atol``."""
        if self.shape != (len(row_weights), len(col_weights)):
            raise InputError("plan shape does not match marginal lengths")
        if np.abs(self.row_sums() - row_weights).max(initial=0.0) > atol:
            raise InputError("plan row sums do not match source weights")
        if np.abs(self.col_sums() - col_weights).max(initial=0.0) > atol:
            raise InputError("plan column sums do not match target weights")


def plan_cost(plan: TransportPlan, x: np.ndarray, y: np.ndarray, p: float) -> float:
    """Total transport cost ``sum_e mass_e * ||x_i - y_j||_p^p`` of a plan."""
    x = _as_positions(x)
    y = _as_positions(y)
    m, n = plan.shape
    if x.shape[0] != m or y.shape[0] != n:
        raise InputError("position lists do not match plan shape")
    if plan.n_entries == 0:
        return 0.0
    diff = np.abs(x[plan.rows] - y[plan.cols])
    if p == 2.0:
        costs = np.einsum("es,es->e", diff, diff)
    elif p == 1.0:
        costs = diff.sum(axis=1)
    else:
        costs = (diff**p).sum(axis=1)
    return float(np.dot(plan.vals, costs))


def interpolate(plan: TransportPlan, x: np.ndarray, y: np.ndarray,
                t: float) -> DiscreteMeasure:
    """Displacement interpolation: mass gamma_ij placed at ``x_i + t (y_j - x_i)``.

    Atoms landing at exactly coinciding positions are merged; no epsilon
    snapping is applied.
    """
    if not 0.0 <= t <= 1.0:
        raise InputError(f"interpolation parameter t must lie in [0, 1], got {t}")
    x = _as_positions(x)
    y = _as_positions(y)
    m, n = plan.shape
    if x.shape[0] != m or y.shape[0] != n:
        raise InputError("position lists do not match plan shape")
    points = x[plan.rows] + t * (y[plan.cols] - x[plan.rows])
    merged: dict[tuple, float] = {}
    for pt, mass in zip(map(tuple, points), plan.vals):
        merged[pt] = merged.get(pt, 0.0) + float(mass)
    positions = np.array(list(merged.keys()), dtype=np.float64)
    weights = np.array(list(merged.values()), dtype=np.float64)
    return DiscreteMeasure(positions, weights, total_mass=float(weights.sum()))


@dataclass(frozen=True)
class BarycenterState:
    """Support points of a constrained barycenter plus the two coupling plans.

    ``plan_x`` couples the x-side measure (m atoms) to the support
    (kappa hubs), ``plan_y`` the y-side measure; their column sums agree
    and equal ``weights``.
    """

    support: np.ndarray
    weights: np.ndarray
    plan_x: TransportPlan
    plan_y: TransportPlan
    p: float = field(default=2.0)

    def __post_init__(self):
        sup = _as_positions(self.support)
        w = np.asarray(self.weights, dtype=np.float64)
        kappa = sup.shape[0]
        if w.shape != (kappa,):
            raise InputError("hub weights do not match support size")
        if self.plan_x.shape[1] != kappa or self.plan_y.shape[1] != kappa:
            raise InputError("plan column counts do not match support size")
        if np.abs(self.plan_x.col_sums() - w).max(initial=0.0) > MARGINAL_ATOL:
            raise InputError("x-side plan column sums do not match hub weights")
        if np.abs(self.plan_y.col_sums() - w).max(initial=0.0) > MARGINAL_ATOL:
            raise InputError("y-side plan column sums do not match hub weights")
        sup.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "weights", w)

    @property
    def kappa(self) -> int:
        return self.support.shape[0]
