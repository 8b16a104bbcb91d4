"""Multi-period IP variants and their lexicographic solver."""

from pra.ip.fixings import compute_smax, period_smax
from pra.ip.lpformat import export_lp
from pra.ip.model import (
    NEEDS_SMAX,
    NEEDS_WMIN,
    OBJECTIVES,
    STAY_INDEXED,
    TIME_INDEXED,
    VARIANTS,
    IpModel,
    LinearConstraint,
    Objective,
    build_model,
)
from pra.ip.solver import INFEASIBLE, OPTIMAL, TIME_LIMIT, IpSolution, solve_lexicographic

__all__ = [
    "INFEASIBLE", "NEEDS_SMAX", "NEEDS_WMIN", "OBJECTIVES", "OPTIMAL", "STAY_INDEXED", "TIME_INDEXED",
    "TIME_LIMIT", "VARIANTS", "IpModel", "IpSolution", "LinearConstraint", "Objective", "build_model",
    "compute_smax", "export_lp", "period_smax", "solve_lexicographic",
]
