"""Exact LP-based approximation algorithms for connected T-joins."""

from .approx import aks_tjoin, christofides_tjoin
from .decompose import decompose_spanning_trees, verify_decomposition
from .instance import Instance, make_instance, metric_completion, parse_instance
from .lp import solve_lp1
from .narrowcuts import correction_flows, enumerate_narrow_cuts
from .prizecollect import make_pc, solve_pd, verify_pd_guarantees

__all__ = [
    "Instance",
    "aks_tjoin",
    "christofides_tjoin",
    "correction_flows",
    "decompose_spanning_trees",
    "enumerate_narrow_cuts",
    "make_instance",
    "make_pc",
    "metric_completion",
    "parse_instance",
    "solve_lp1",
    "solve_pd",
    "verify_decomposition",
    "verify_pd_guarantees",
]
