"""Game-playing agents: the scripted baseline and the MCTS family."""
from __future__ import annotations

import json
import random
from dataclasses import replace
from importlib import resources
from pathlib import Path

from scsa.engine import GameState, UnitAction
from scsa.games import rule_based_policy
from scsa.search import SearchParams, make_unit_ordering, run_search

AGENT_NAMES = ("mcts", "mctsu", "rg", "elastic", "scsa", "rule")
LABELS = {
    "mcts": "MCTS",
    "mctsu": "MCTS_u",
    "rg": "RG MCTS_u",
    "elastic": "Elastic MCTS_u",
    "scsa": "SCSA",
    "rule": "Rule-based",
}


def load_agent_table(path: str | Path | None = None) -> dict:
    if path is None:
        return json.loads(resources.files("scsa.data").joinpath("agents.json").read_text())
    return json.loads(Path(path).read_text())


def agent_params(game: str, name: str, table: dict | None = None, **overrides) -> SearchParams:
    """Search parameters for one agent on one game.

    ``alpha`` in the table counts batches when ``alpha_units`` is
    ``"batches"`` (the default) and raw iterations otherwise.  Overrides may
    set any :class:`SearchParams` field, plus ``alpha``.
    """
    table = table or load_agent_table()
    game = game.upper()
    entry = dict(table["agents"][game][name])
    alpha = overrides.pop("alpha", entry.pop("alpha", None))
    batch = overrides.pop("batch", table.get("batch", 20))
    budget = overrides.pop("budget", None) or table["budget"][game]
    alpha_es = None
    if alpha is not None and entry.get("mode") in ("elastic", "rg"):
        alpha_es = alpha * batch if table.get("alpha_units", "batches") == "batches" else alpha
    entry.update(overrides)
    return SearchParams(budget=budget, batch=batch, alpha_es=alpha_es, **entry)


def scaled_overrides(game: str, budget: int, table: dict | None = None) -> dict:
    """Overrides for a reduced budget that keep the batch count per search.

    The batch size shrinks in proportion to the budget (at least 2), so an
    ``alpha`` counted in batches splits at the same fraction of the search.
    """
    table = table or load_agent_table()
    full = table["budget"][game.upper()]
    batch = max(2, round(table.get("batch", 20) * budget / full))
    return {"budget": budget, "batch": batch}


class Agent:
    name = "agent"

    def start_game(self, state: GameState, player: int, seed: int) -> None:
        self.player = player

    def act(self, state: GameState) -> tuple[UnitAction, object]:
        raise NotImplementedError


class RuleAgent(Agent):
    name = "rule"

    def act(self, state):
        return rule_based_policy(state), None


class MCTSAgent(Agent):
    def __init__(self, name: str, params: SearchParams):
        self.name = name
        self.params = params
        self.ordering = None
        self.rng = random.Random(params.seed)

    def start_game(self, state, player, seed):
        self.player = player
        self.rng = random.Random(seed)
        self.ordering = None
        if self.params.unit_ordered:
            self.ordering = make_unit_ordering(state, self.rng, player)

    def act(self, state):
        params = replace(self.params, seed=self.rng.getrandbits(32))
        action, stats = run_search(state, params, ordering=self.ordering, rng=self.rng, player=self.player)
        return action, stats


def make_agent(name: str, game: str, table: dict | None = None, **overrides) -> Agent:
    if name == "rule":
        return RuleAgent()
    if name not in AGENT_NAMES:
        raise ValueError(f"unknown agent {name!r}; choose from {', '.join(AGENT_NAMES)}")
    return MCTSAgent(name, agent_params(game, name, table, **overrides))
