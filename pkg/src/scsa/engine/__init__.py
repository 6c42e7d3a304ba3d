"""Deterministic two-player turn-based game kernel."""
from scsa.engine.rules import (
    ForwardModel,
    GameError,
    IllegalAction,
    action_count,
    apply_action,
    legal_actions,
    random_action,
    terminal_outcome,
    unit_action_counts,
)
from scsa.engine.state import (
    DIRECTIONS,
    END_TURN,
    GameState,
    GridMap,
    Outcome,
    Unit,
    UnitAction,
)

__all__ = [
    "DIRECTIONS",
    "END_TURN",
    "ForwardModel",
    "GameError",
    "GameState",
    "GridMap",
    "IllegalAction",
    "Outcome",
    "Unit",
    "UnitAction",
    "action_count",
    "apply_action",
    "legal_actions",
    "random_action",
    "terminal_outcome",
    "unit_action_counts",
]
