"""Per-flow strict service curves for GPS over exact piecewise-linear algebra."""
from .curves import (
    CurveError,
    DegenerateSlope,
    Envelope,
    FlowSpec,
    ServiceCurve,
    greedy_lazy,
    leftover,
    maximizer_set,
    slope_requests,
    tangent_scenario,
    universal,
)
from .maxmin import AllocationProblem, AllocationResult, allocate, fair_share, per_player_share
from .plf import INF, PLF, AffinePiece, PiecewiseLinear
from .report import BoundReport
from .simulator import Scenario, Trajectory, gps_compliance, simulate

__all__ = [
    "INF", "PLF", "AffinePiece", "PiecewiseLinear",
    "AllocationProblem", "AllocationResult", "allocate", "fair_share", "per_player_share",
    "CurveError", "DegenerateSlope", "Envelope", "FlowSpec", "ServiceCurve",
    "leftover", "universal", "maximizer_set", "slope_requests", "tangent_scenario", "greedy_lazy",
    "Scenario", "Trajectory", "simulate", "gps_compliance", "BoundReport",
]
__version__ = "0.1.0"
