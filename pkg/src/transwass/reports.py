"""Result records and the exact-vs-approximate comparison driver."""

from __future__ import annotations

import time
from dataclasses import dataclass, fields

import numpy as np

from .barycenter import BarycenterConfig, bar_wp
from .errors import InputError
from .flow import solve_exact
from .measures import (DiscreteMeasure, TransportPlan, distance_from_cost,
                       plan_cost)
from .multiscale import MultiscaleConfig, compose_plan, refine_state


@dataclass(frozen=True)
class DistanceReport:
    """One solver run: which method, its parameters, cost and timing.

    ``distance`` is always ``cost ** (1/p)``; ``rel_error`` compares the
    distance against a reference distance when one is available.
    """

    method: str
    p: float
    kappa: int | None
    threshold: int | None
    cost: float
    distance: float
    plan_entries: int
    wall_time: float
    rel_error: float | None
    seed: int

    def __post_init__(self):
        if abs(self.distance - distance_from_cost(self.cost, self.p)) \
                > 1e-12 * max(1.0, self.distance):
            raise InputError("distance is not cost ** (1/p)")

    def as_lines(self) -> list[str]:
        out = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                value = ""
            elif isinstance(value, float):
                value = f"{value:.17g}"
            out.append(f"{f.name}: {value}")
        return out


def make_report(method: str, p: float, cost: float, plan: TransportPlan | None,
                wall_time: float, seed: int, kappa: int | None = None,
                threshold: int | None = None,
                reference_cost: float | None = None) -> DistanceReport:
    dist = distance_from_cost(cost, p)
    rel = None
    if reference_cost is not None:
        ref = distance_from_cost(reference_cost, p)
        rel = (dist - ref) / ref if ref > 0 else dist
    return DistanceReport(
        method=method, p=p, kappa=kappa, threshold=threshold, cost=cost,
        distance=dist, plan_entries=plan.n_entries if plan is not None else 0,
        wall_time=wall_time, rel_error=rel, seed=seed,
    )


def run_compare(mu_x: DiscreteMeasure, mu_y: DiscreteMeasure, p: float,
                kappas, threshold: int = 2000, seed: int = 0,
                workers: int = 1, include_exact: bool = True
                ) -> list[DistanceReport]:
    """Exact solve plus, for each kappa, the three approximation levels.

    Per kappa, one barycenter run feeds all three records (hub-cost sum,
    composed block plan, multi-scale refinement), so the reported costs
    always satisfy multiscale <= block <= barycenter.
    """
    reports = []
    ref_cost = None
    if include_exact:
        t0 = time.perf_counter()
        cost, plan = solve_exact(mu_x, mu_y, p)
        reports.append(make_report("exact", p, cost, plan,
                                   time.perf_counter() - t0, seed,
                                   reference_cost=cost))
        ref_cost = cost
    for kappa in kappas:
        bc = BarycenterConfig(kappa=int(kappa), p=p, rng_seed=seed)
        t0 = time.perf_counter()
        cost_tilde, state = bar_wp(mu_x, mu_y, bc)
        t_bar = time.perf_counter() - t0
        reports.append(make_report(
            "barycenter", p, cost_tilde, None, t_bar, seed, kappa=int(kappa),
            reference_cost=ref_cost))

        t0 = time.perf_counter()
        block = compose_plan(state)
        block_cost = plan_cost(block, mu_x.positions, mu_y.positions, p)
        reports.append(make_report(
            "block", p, block_cost, block, t_bar + time.perf_counter() - t0,
            seed, kappa=int(kappa), reference_cost=ref_cost))

        mc = MultiscaleConfig(kappa=int(kappa), p=p, threshold=threshold,
                              workers=workers, rng_seed=seed)
        t0 = time.perf_counter()
        refined = refine_state(state, mu_x, mu_y, mc)
        reports.append(make_report(
            "multiscale", p, refined.cost, refined.plan,
            t_bar + time.perf_counter() - t0, seed, kappa=int(kappa),
            threshold=threshold, reference_cost=ref_cost))
    return reports


#: First line of every report file.
REPORT_HEADER = "# transwass report v1"


def write_report(path, reports: list[DistanceReport]) -> None:
    """Flat ``key: value`` records, blank-line separated, after a header line."""
    with open(path, "w") as fh:
        fh.write(REPORT_HEADER + "\n")
        for rec in reports:
            fh.write("\n".join(rec.as_lines()))
            fh.write("\n\n")


def read_report(path) -> list[dict]:
    records = []
    current: dict = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if line.startswith("#"):
                continue
            if not line:
                if current:
                    records.append(current)
                    current = {}
                continue
            key, _, value = line.partition(":")
            current[key.strip()] = value.strip()
    if current:
        records.append(current)
    return records


def write_plot_csv(path, reports: list[DistanceReport]) -> None:
    """CSV with columns (kappa, rel_error, time) for the approximate runs."""
    with open(path, "w") as fh:
        fh.write("kappa,rel_error,time\n")
        for rec in reports:
            if rec.kappa is None:
                continue
            rel = "" if rec.rel_error is None else f"{rec.rel_error:.17g}"
            fh.write(f"{rec.kappa},{rel},{rec.wall_time:.17g}\n")


def summarize_errors(reports: list[DistanceReport]) -> dict:
    errs = np.array([r.rel_error for r in reports if r.rel_error is not None])
    if errs.size == 0:
        return {"pairs": 0}
    return {"pairs": int(errs.size), "mean_rel_error": float(errs.mean()),
            "median_rel_error": float(np.median(errs)),
            "max_rel_error": float(errs.max())}
