"""Legal-action generation, the forward model and terminal detection.

All three games share one rule kernel; what a unit may do is read from the
``actions`` list of its kind in the game config (``move``, ``attack``,
``heal``, ``push``, ``collect``, ``research``, ``spawn``).  Every unit that
may act also has ``do-nothing``, except pushers whose stay-put push triples
already cover it.
"""
from __future__ import annotations

import random

from scsa.engine.state import (
    DIRECTIONS,
    DRAW,
    END_TURN,
    ONGOING,
    GameState,
    Outcome,
    Unit,
    UnitAction,
)


class GameError(Exception):
    """Raised for illegal actions and malformed queries."""


class IllegalAction(GameError):
    pass


def _in_range(u: Unit, t: Unit, rng: int) -> bool:
    dx = abs(u.x - t.x)
    dy = abs(u.y - t.y)
    if rng <= 1:
        return dx + dy <= rng
    return max(dx, dy) <= rng


def _player_dirs(player: int):
    # spawn-tile scan order, reflected for player 1 so mirrored games agree
    if player == 0:
        return DIRECTIONS
    return tuple((-dx, -dy) for dx, dy in DIRECTIONS)


def _free(state: GameState, x: int, y: int) -> bool:
    return state.config.map.is_plain(x, y) and (x, y) not in state.occupancy


def spawn_tile(state: GameState, castle: Unit):
    for dx, dy in _player_dirs(castle.owner):
        x, y = castle.x + dx, castle.y + dy
        if _free(state, x, y):
            return (x, y)
    return None


def adjacent_to_vein(state: GameState, u: Unit) -> bool:
    veins = state.config.map.veins
    for vx, vy in veins:
        if abs(vx - u.x) + abs(vy - u.y) == 1:
            return True
    return False


def _move_dirs(state: GameState, u: Unit) -> list[int]:
    grid = state.config.map
    occ = state.occupancy
    out = []
    for i, (dx, dy) in enumerate(DIRECTIONS):
        t = (u.x + dx, u.y + dy)
        if t in grid._plain and t not in occ:
            out.append(i)
    return out


def _push_actions(state: GameState, u: Unit) -> list[UnitAction]:
    uid = u.id
    out = []
    for m in [None] + _move_dirs(state, u):
        for s in range(4):
            for p in range(4):
                out.append(UnitAction(uid, "push", (m, s, p)))
    return out


def _unit_actions(state: GameState, u: Unit) -> list[UnitAction]:
    st = state.config.stats[u.kind]
    verbs = st.actions
    if "push" in verbs:
        return _push_actions(state, u)
    uid = u.id
    out = [UnitAction(uid, "do-nothing")]
    if st.mobile and "move" in verbs:
        for i in _move_dirs(state, u):
            dx, dy = DIRECTIONS[i]
            out.append(UnitAction(uid, "move", (u.x + dx, u.y + dy)))
    if "attack" in verbs:
        r = st.attack_range
        for t in state.units:
            if t.owner != u.owner and _in_range(u, t, r):
                out.append(UnitAction(uid, "attack", t.id))
    if "heal" in verbs:
        r = st.heal_range
        stats = state.config.stats
        for t in state.units:
            if (
                t.owner == u.owner
                and t.id != uid
                and t.hp < stats[t.kind].max_hp
                and _in_range(u, t, r)
            ):
                out.append(UnitAction(uid, "heal", t.id))
    if "collect" in verbs and adjacent_to_vein(state, u):
        out.append(UnitAction(uid, "collect"))
    eco = state.config.economy
    if eco is not None:
        p = u.owner
        if "research" in verbs:
            known = state.research[p] | state.pending[p]
            for tech in eco.technologies:
                if tech not in known:
                    out.append(UnitAction(uid, "research", tech))
        if "spawn" in verbs and spawn_tile(state, u) is not None:
            for kind, cost in eco.spawn_costs.items():
                req = eco.spawn_requires.get(kind)
                if state.gold[p] >= cost and (req is None or req in state.research[p]):
                    out.append(UnitAction(uid, "spawn", kind))
    return out


def _check_actor(state: GameState, actor) -> Unit:
    u = state.by_id.get(actor)
    if u is None:
        raise GameError(f"unknown unit id {actor!r}")
    if u.owner != state.to_move:
        raise GameError(f"unit {actor} belongs to player {u.owner}, not the player to move")
    if actor in state.acted:
        raise GameError(f"unit {actor} has already acted this turn")
    return u


def legal_actions(state: GameState, actor="any") -> list[UnitAction]:
    """Legal actions for one unit, or for every eligible unit plus end-turn."""
    if terminal_outcome(state).terminal:
        raise GameError("no legal actions in a terminal state")
    if actor == "any":
        out = []
        for u in state.eligible():
            out.extend(_unit_actions(state, u))
        out.append(END_TURN)
        return out
    return _unit_actions(state, _check_actor(state, actor))


def action_count(state: GameState, u: Unit) -> int:
    if "push" in state.config.stats[u.kind].actions:
        return (1 + len(_move_dirs(state, u))) * 16
    return len(_unit_actions(state, u))


def random_action(state: GameState, rng: random.Random) -> UnitAction:
    """Uniform draw from ``legal_actions(state, "any")`` without building it."""
    units = state.eligible()
    counts = [action_count(state, u) for u in units]
    i = rng.randrange(sum(counts) + 1)
    for u, c in zip(units, counts):
        if i < c:
            if "push" in state.config.stats[u.kind].actions:
                moves = [None] + _move_dirs(state, u)
                return UnitAction(u.id, "push", (moves[i // 16], (i // 4) % 4, i % 4))
            return _unit_actions(state, u)[i]
        i -= c
    return END_TURN


def unit_action_counts(state: GameState) -> list[int]:
    """Per-unit legal-action counts for the eligible units, in id order."""
    return [action_count(state, u) for u in state.eligible()]


# forward model ---------------------------------------------------------


def _validate(state: GameState, action: UnitAction) -> Unit | None:
    if terminal_outcome(state).terminal:
        raise IllegalAction("game is over")
    if action.verb == "end-turn":
        if action.actor is not None:
            raise IllegalAction("end-turn takes no actor")
        return None
    try:
        u = _check_actor(state, action.actor)
    except GameError as exc:
        raise IllegalAction(str(exc)) from None
    st = state.config.stats[u.kind]
    verb = action.verb
    if verb == "push":
        if not st.can("push"):
            raise IllegalAction(f"{u.kind} cannot push")
        try:
            m, s, p = action.target
        except (TypeError, ValueError):
            raise IllegalAction(f"malformed push target {action.target!r}") from None
        if s not in range(4) or p not in range(4):
            raise IllegalAction(f"malformed push target {action.target!r}")
        if m is not None and m not in _move_dirs(state, u):
            raise IllegalAction(f"push move {m} is blocked")
        return u
    if "push" in st.actions:
        raise IllegalAction(f"{u.kind} only has push actions")
    if verb == "do-nothing":
        return u
    if action in _unit_actions(state, u):
        return u
    raise IllegalAction(f"illegal action {action}")


def _end_turn(state: GameState, units, gold, research=None, pending=None, next_id=None) -> GameState:
    p = state.to_move
    research = list(state.research if research is None else research)
    pending = list(state.pending if pending is None else pending)
    if pending[p]:
        research[p] = research[p] | pending[p]
        pending[p] = frozenset()
    nxt = 1 - p
    rnd = state.round + 1 if nxt == state.first else state.round
    return GameState(
        state.config,
        units,
        nxt,
        state.first,
        frozenset(),
        rnd,
        gold,
        tuple(research),
        tuple(pending),
        state.next_id if next_id is None else next_id,
    )


def _step(state: GameState, action: UnitAction) -> GameState:
    u = _validate(state, action)
    if u is None:
        return _end_turn(state, state.units, state.gold)

    units = list(state.units)
    gold = state.gold
    research, pending = state.research, state.pending
    next_id = state.next_id
    verb = action.verb
    cfg = state.config

    def idx(uid):
        for i, v in enumerate(units):
            if v.id == uid:
                return i
        raise KeyError(uid)

    if verb == "move":
        x, y = action.target
        units[idx(u.id)] = u._replace(x=x, y=y)
    elif verb == "attack":
        i = idx(action.target)
        t = units[i]
        hp = t.hp - cfg.stats[u.kind].damage
        if hp <= 0:
            del units[i]
        else:
            units[i] = t._replace(hp=hp)
    elif verb == "heal":
        i = idx(action.target)
        t = units[i]
        units[i] = t._replace(hp=min(cfg.stats[t.kind].max_hp, t.hp + cfg.stats[u.kind].heal))
    elif verb == "push":
        m, s, p = action.target
        x, y = u.x, u.y
        if m is not None:
            x, y = x + DIRECTIONS[m][0], y + DIRECTIONS[m][1]
            units[idx(u.id)] = u._replace(x=x, y=y)
        sx, sy = x + DIRECTIONS[s][0], y + DIRECTIONS[s][1]
        victim = None
        for i, v in enumerate(units):
            if v.x == sx and v.y == sy:
                victim = i
                break
        if victim is not None and units[victim].owner != u.owner:
            tx, ty = sx + DIRECTIONS[p][0], sy + DIRECTIONS[p][1]
            if (tx, ty) in cfg.map.holes:
                del units[victim]
            elif (tx, ty) in cfg.map._plain and not any(v.x == tx and v.y == ty for v in units):
                units[victim] = units[victim]._replace(x=tx, y=ty)
    elif verb == "collect":
        gold = list(gold)
        gold[u.owner] += cfg.economy.collect_yield
        gold = tuple(gold)
    elif verb == "research":
        pending = list(pending)
        pending[u.owner] = pending[u.owner] | {action.target}
        pending = tuple(pending)
    elif verb == "spawn":
        kind = action.target
        gold = list(gold)
        gold[u.owner] -= cfg.economy.spawn_costs[kind]
        gold = tuple(gold)
        x, y = spawn_tile(state, u)
        units.append(Unit(next_id, u.owner, kind, x, y, cfg.stats[kind].max_hp))
        next_id += 1

    units = tuple(units)
    alive = {v.id for v in units}
    acted = frozenset(a for a in state.acted if a in alive) | {u.id}
    if verb == "spawn":
        acted = acted | {next_id - 1}
    p = state.to_move
    if all(v.id in acted for v in units if v.owner == p):
        return _end_turn(state, units, gold, research=research, pending=pending, next_id=next_id)
    return GameState(cfg, units, p, state.first, acted, state.round, gold, research, pending, next_id)


class ForwardModel:
    """Applies actions and counts the calls made through it."""

    __slots__ = ("calls",)

    def __init__(self):
        self.calls = 0

    def apply(self, state: GameState, action: UnitAction) -> GameState:
        nxt = _step(state, action)
        self.calls += 1
        return nxt


def apply_action(state: GameState, action: UnitAction, fm: ForwardModel | None = None) -> GameState:
    """Successor of ``state`` under ``action``; bumps ``fm.calls`` when given."""
    nxt = _step(state, action)
    if fm is not None:
        fm.calls += 1
    return nxt


def terminal_outcome(state: GameState) -> Outcome:
    out = state._outcome
    if out is not None:
        return out
    game = state.config.game
    alive = [False, False]
    target = "pusher" if game == "PTA" else "king"
    for u in state.units:
        if u.kind == target:
            alive[u.owner] = True
    if not alive[0] and not alive[1]:
        out = DRAW
    elif not alive[1]:
        out = Outcome("win", 0)
    elif not alive[0]:
        out = Outcome("win", 1)
    elif state.round >= state.config.round_limit:
        out = DRAW
    else:
        out = ONGOING
    state._outcome = out
    return out
