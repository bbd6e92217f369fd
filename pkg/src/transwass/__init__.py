"""Exact and multi-scale approximate Wasserstein distances for discrete measures.

Exact p-Wasserstein coupling via a network simplex on the dense bipartite
graph, and a scalable approximation that routes mass through a small set
of optimized hubs, then refines every hub cluster recursively into a
sparse near-optimal plan.
"""

from .barycenter import (BarycenterConfig, bar_wp, init_support,
                         init_support_kmeans)
from .errors import (InfeasibilityError, InputError, ResourceLimitError,
                     SolverError, TranswassError)
from .flow import (FlowNetwork, FlowResult, apportion, brute_force_ot,
                   solve_exact, solve_min_cost_flow)
from .measures import (BarycenterState, DiscreteMeasure, GroundCost,
                       TransportPlan, distance_from_cost, ground_cost,
                       interpolate, pairwise_cost, plan_cost)
from .multiscale import (MultiscaleConfig, MultiscaleResult, approx_wp,
                         compose_plan, extract_cluster, refine_state)
from .reports import DistanceReport, run_compare
from .synthetic import GRID_CLASSES, generate_grid_image, generate_synthetic
from .transship import (TransshipmentProblem, TransshipmentResult,
                        solve_transshipment)

__version__ = "0.1.0"

__all__ = [
    "BarycenterConfig",
    "BarycenterState",
    "DiscreteMeasure",
    "DistanceReport",
    "FlowNetwork",
    "FlowResult",
    "GRID_CLASSES",
    "GroundCost",
    "InfeasibilityError",
    "InputError",
    "MultiscaleConfig",
    "MultiscaleResult",
    "ResourceLimitError",
    "SolverError",
    "TransportPlan",
    "TransshipmentProblem",
    "TransshipmentResult",
    "TranswassError",
    "approx_wp",
    "apportion",
    "bar_wp",
    "brute_force_ot",
    "compose_plan",
    "distance_from_cost",
    "extract_cluster",
    "generate_grid_image",
    "generate_synthetic",
    "ground_cost",
    "init_support",
    "init_support_kmeans",
    "interpolate",
    "pairwise_cost",
    "plan_cost",
    "refine_state",
    "run_compare",
    "solve_exact",
    "solve_min_cost_flow",
    "solve_transshipment",
    "__version__",
]
