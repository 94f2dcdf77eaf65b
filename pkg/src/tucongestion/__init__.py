"""Exact solvers for congestion games with totally unimodular strategy polytopes."""

from tucongestion.errors import (
    CongestionError,
    InfeasibleError,
    InvariantViolation,
    PreconditionError,
    SizeCapError,
)
from tucongestion.model import (
    DelayTable,
    GameInstance,
    GameState,
    PolymatroidStrategy,
    TUSystem,
    is_weakly_convex,
    player_cost,
    potential,
    shift_delays,
    social_delay,
    transform_social,
)

__all__ = [
    "CongestionError",
    "DelayTable",
    "GameInstance",
    "GameState",
    "InfeasibleError",
    "InvariantViolation",
    "PolymatroidStrategy",
    "PreconditionError",
    "SizeCapError",
    "TUSystem",
    "is_weakly_convex",
    "player_cost",
    "potential",
    "shift_delays",
    "social_delay",
    "transform_social",
]
