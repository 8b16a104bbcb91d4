"""Patient-to-room assignment with roommate compatibility."""

from pra.errors import (
    ConfigError,
    IncompleteAssignmentError,
    InfeasibleAssignmentError,
    InfeasibleError,
    InstanceError,
    PeriodRangeError,
    PraError,
    ScoreDataError,
    UnsupportedCapacityError,
)
from pra.model import (
    Assignment,
    Instance,
    ObjectiveValues,
    Patient,
    Room,
    Violation,
    check_assignment,
    check_period_feasibility,
    evaluate_objectives,
    evaluate_roommate_fit,
    evaluate_singles,
    evaluate_transfers,
    patients_present,
)
from pra.scoring import ScoreType, Scorer, classify, pair_weights, parse_scorer

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "ConfigError",
    "IncompleteAssignmentError",
    "InfeasibleAssignmentError",
    "InfeasibleError",
    "Instance",
    "InstanceError",
    "ObjectiveValues",
    "Patient",
    "PeriodRangeError",
    "PraError",
    "Room",
    "ScoreDataError",
    "ScoreType",
    "Scorer",
    "UnsupportedCapacityError",
    "Violation",
    "check_assignment",
    "check_period_feasibility",
    "classify",
    "evaluate_objectives",
    "evaluate_roommate_fit",
    "evaluate_singles",
    "evaluate_transfers",
    "pair_weights",
    "parse_scorer",
    "patients_present",
]
