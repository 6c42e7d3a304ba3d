"""The three game definitions, their evaluation functions and scripts."""
from __future__ import annotations

import math

from scsa.engine import GameState, terminal_outcome, unit_action_counts
from scsa.games.config import (
    ConfigError,
    GameConfig,
    UnitStats,
    canonical_state,
    dump_config,
    load_config,
    mirror_state,
    sample_initial_state,
)
from scsa.games.heuristics import evaluate, heuristic_ktk, heuristic_pta, heuristic_tk
from scsa.games.policies import rule_based_policy


def enumerate_joint_action_count(state: GameState) -> int:
    """Size of the joint action space: product of per-unit action counts."""
    if terminal_outcome(state).terminal:
        raise ValueError("terminal state has no joint actions")
    return math.prod(unit_action_counts(state))


__all__ = [
    "ConfigError",
    "GameConfig",
    "UnitStats",
    "canonical_state",
    "dump_config",
    "enumerate_joint_action_count",
    "evaluate",
    "heuristic_ktk",
    "heuristic_pta",
    "heuristic_tk",
    "load_config",
    "mirror_state",
    "rule_based_policy",
    "sample_initial_state",
]
