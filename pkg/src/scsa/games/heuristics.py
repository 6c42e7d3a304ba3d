"""State evaluation shared by every search agent.

Terminal states score 1 / -1 / 0 for win / loss / draw; every other state
maps into [0, 1].
"""
from __future__ import annotations

import math

from scsa.engine import GameError, GameState, terminal_outcome

COMBAT_KINDS = frozenset({"warrior", "archer", "knight", "wizard"})


def _manhattan(a, b) -> int:
    return abs(a.x - b.x) + abs(a.y - b.y)


def _clamp01(v: float) -> float:
    return 0.0 if v < 0.0 else 1.0 if v > 1.0 else v


def heuristic_ktk(state: GameState, player: int) -> float:
    """1 - d*h / (D*H): allied distance to the enemy king times its health."""
    king = None
    allies = []
    for u in state.units:
        if u.owner == player:
            allies.append(u)
        elif u.kind == "king":
            king = u
    if king is None:
        raise GameError("enemy king missing from a non-terminal state")
    if not allies:
        return 0.0
    d = sum(_manhattan(u, king) for u in allies)
    d_max = len(allies) * state.config.map.diameter
    h_max = state.config.stats["king"].max_hp
    return _clamp01(1.0 - (d * king.hp) / (d_max * h_max))


def heuristic_pta(state: GameState, player: int) -> float:
    """0.2 * distance term + 0.4 * own survival + 0.4 * enemy losses.

    The distance term is the summed Euclidean distance from each ally to its
    nearest enemy over its maximum (allies x map diagonal), taken as written;
    the ``pta_invert_distance_term`` option uses its complement instead.
    """
    cfg = state.config
    allies = [u for u in state.units if u.owner == player]
    enemies = [u for u in state.units if u.owner != player]
    n0 = sum(1 for k in cfg.army if k == "pusher")
    if allies and enemies:
        total = sum(
            min(math.hypot(a.x - e.x, a.y - e.y) for e in enemies) for a in allies
        )
        dist = total / (len(allies) * cfg.map.diagonal)
    else:
        dist = 0.0
    if cfg.option("pta_invert_distance_term", False):
        dist = 1.0 - dist
    own = len(allies) / n0
    lost = (n0 - len(enemies)) / n0
    return _clamp01(0.2 * dist + 0.4 * own + 0.4 * lost)


def heuristic_tk(state: GameState, player: int, gold_cap: float | None = None) -> float:
    cfg = state.config
    if gold_cap is None:
        gold_cap = cfg.option("gold_cap", 100)
    diam = cfg.map.diameter
    allies = [u for u in state.units if u.owner == player]
    enemies = [u for u in state.units if u.owner != player]
    workers = [u for u in allies if u.kind == "worker"]

    score = 0.0
    if "Mining" in state.research[player]:
        score += 0.2
    if workers:
        score += 0.1
    if any(u.kind in COMBAT_KINDS for u in allies):
        score += 0.1
    veins = cfg.map.veins
    if workers and veins:
        d = sum(min(abs(w.x - vx) + abs(w.y - vy) for vx, vy in veins) for w in workers)
        score += 0.1 * (1.0 - d / (len(workers) * diam))
    score += 0.2 * min(state.gold[player] / gold_cap, 1.0)
    # castles never move, so only mobile allies enter the approach term
    movers = [u for u in allies if cfg.stats[u.kind].mobile]
    if movers and enemies:
        d = sum(_manhattan(a, e) for a in movers for e in enemies)
        score += 0.3 * (1.0 - d / (len(movers) * len(enemies) * diam))
    return _clamp01(score)


HEURISTICS = {"KTK": heuristic_ktk, "PTA": heuristic_pta, "TK": heuristic_tk}


def evaluate(state: GameState, player: int) -> float:
    """Terminal score when the game is over, else the game's heuristic."""
    out = terminal_outcome(state)
    if out.terminal:
        return out.score(player)
    return HEURISTICS[state.config.game](state, player)
