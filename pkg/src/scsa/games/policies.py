"""Scripted rule-based opponents for the three games.

Each call returns the next action for the first eligible unit (lowest id).
Ties break on lowest unit id, then on tile order seen from the acting
player's side of the board, so a point-mirrored game plays out mirrored.
"""
from __future__ import annotations

from collections import deque

from scsa.engine import DIRECTIONS, GameError, GameState, UnitAction, legal_actions
from scsa.engine.rules import adjacent_to_vein

ISOLATION_RADIUS = 2


def _manhattan(a, b) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def tile_key(state: GameState, tile, player: int):
    """Row-major tile order from ``player``'s side of the board."""
    x, y = tile
    if player == 1:
        x, y = state.config.map.width - 1 - x, state.config.map.height - 1 - y
    return (y, x)


def _dir_order(player: int):
    # direction indices in the player's own frame: N,E,S,W for player 0
    return (0, 1, 2, 3) if player == 0 else (2, 3, 0, 1)


def bfs_distances(state: GameState, goals, ignore=()) -> dict:
    """Walking distance to the nearest goal tile, around walls and units."""
    grid = state.config.map
    occ = state.occupancy
    blocked = {pos for pos, u in occ.items() if u.id not in ignore}
    dist = {}
    q = deque()
    for g in goals:
        dist[g] = 0
        q.append(g)
    while q:
        x, y = q.popleft()
        d = dist[(x, y)] + 1
        for dx, dy in DIRECTIONS:
            t = (x + dx, y + dy)
            if t in dist or not grid.is_plain(*t) or t in blocked:
                continue
            dist[t] = d
            q.append(t)
    return dist


def _step_toward(state: GameState, unit, goals, ignore=()) -> UnitAction | None:
    """A move that strictly shortens the walking distance to ``goals``."""
    dist = bfs_distances(state, goals, ignore=set(ignore) | {unit.id})
    here = dist.get(unit.pos)
    if here is None:
        # unreachable: fall back to straight-line distance
        best = min(_manhattan(unit.pos, g) for g in goals)
        metric = lambda t: min(_manhattan(t, g) for g in goals)  # noqa: E731
    else:
        best = here
        metric = lambda t: dist.get(t, 10**9)  # noqa: E731
    choice = None
    for i in _dir_order(unit.owner):
        dx, dy = DIRECTIONS[i]
        t = (unit.x + dx, unit.y + dy)
        if not state.config.map.is_plain(*t) or t in state.occupancy:
            continue
        m = metric(t)
        if m < best:
            best, choice = m, t
    return UnitAction(unit.id, "move", choice) if choice is not None else None


def _in_range(u, t, r) -> bool:
    dx, dy = abs(u.x - t.x), abs(u.y - t.y)
    return dx + dy <= r if r <= 1 else max(dx, dy) <= r


def _near(a, b) -> bool:
    return _manhattan(a.pos, b.pos) <= ISOLATION_RADIUS


def isolation_scores(state: GameState, player: int) -> dict[int, int]:
    """For each enemy: our units near it minus its own allies near it."""
    ours = [u for u in state.units if u.owner == player]
    theirs = [u for u in state.units if u.owner != player]
    return {
        e.id: sum(_near(u, e) for u in ours) - sum(_near(f, e) for f in theirs if f.id != e.id)
        for e in theirs
    }


def _ktk_action(state: GameState, u) -> UnitAction | None:
    st = state.config.stats[u.kind]
    p = u.owner
    enemies = [e for e in state.units if e.owner != p]
    if not enemies:
        return None
    if st.can("heal"):
        stats = state.config.stats
        allies = [a for a in state.units if a.owner == p and a.id != u.id]
        if not allies:
            return None
        hurt = [a for a in allies if a.hp < stats[a.kind].max_hp and _in_range(u, a, st.heal_range)]
        if hurt:
            best = min(hurt, key=lambda a: (-stats[a.kind].max_hp, a.id))
            return UnitAction(u.id, "heal", best.id)
        strong = min(allies, key=lambda a: (-stats[a.kind].max_hp, a.id))
        if max(abs(u.x - strong.x), abs(u.y - strong.y)) > st.heal_range:
            return _step_toward(state, u, [strong.pos], ignore=[strong.id])
        return None

    iso = isolation_scores(state, p)
    rank = lambda e: (-iso[e.id], e.id)  # noqa: E731
    if st.can("attack"):
        hittable = [e for e in enemies if _in_range(u, e, st.attack_range)]
        if hittable:
            return UnitAction(u.id, "attack", min(hittable, key=rank).id)
    target = min(enemies, key=rank)
    return _step_toward(state, u, [target.pos], ignore=[target.id])


def _nearest_hole_distance(state: GameState, tile) -> int:
    holes = state.config.map.holes
    if not holes:
        return 0
    return min(_manhattan(tile, h) for h in holes)


def _push_result(state: GameState, victim_pos, pdir, mover_from, mover_to):
    """Where the pushed unit ends up (``None`` when it falls in a hole)."""
    grid = state.config.map
    dx, dy = DIRECTIONS[pdir]
    t = (victim_pos[0] + dx, victim_pos[1] + dy)
    if t in grid.holes:
        return None
    occupied = (t in state.occupancy and t != mover_from) or t == mover_to
    if grid.is_plain(*t) and not occupied:
        return t
    return victim_pos


def _pta_action(state: GameState, u) -> UnitAction | None:
    p = u.owner
    enemies = [e for e in state.units if e.owner != p]
    if not enemies:
        return None
    target = min(
        enemies,
        key=lambda e: ((u.x - e.x) ** 2 + (u.y - e.y) ** 2, e.id),
    )
    legal = set(legal_actions(state, u.id))
    best = None
    moves = [None] + [i for i in _dir_order(p)]
    for m in moves:
        if m is None:
            pos = u.pos
        else:
            pos = (u.x + DIRECTIONS[m][0], u.y + DIRECTIONS[m][1])
        for s in _dir_order(p):
            sel = (pos[0] + DIRECTIONS[s][0], pos[1] + DIRECTIONS[s][1])
            if sel != target.pos:
                continue
            for pd in _dir_order(p):
                act = UnitAction(u.id, "push", (m, s, pd))
                if act not in legal:
                    continue
                end = _push_result(state, target.pos, pd, u.pos, pos)
                d = -1 if end is None else _nearest_hole_distance(state, end)
                if best is None or d < best[0]:
                    best = (d, act)
    if best is not None:
        return best[1]
    step = _step_toward(state, u, [target.pos], ignore=[target.id])
    if step is None:
        return None
    m = next(i for i, d in enumerate(DIRECTIONS) if (u.x + d[0], u.y + d[1]) == step.target)
    # pick a selection tile that holds no enemy so the push part stays idle
    new = step.target
    occ = state.occupancy
    for s in _dir_order(p):
        sel = (new[0] + DIRECTIONS[s][0], new[1] + DIRECTIONS[s][1])
        other = occ.get(sel)
        if other is None or other.owner == p:
            return UnitAction(u.id, "push", (m, s, s))
    d0 = _dir_order(p)[0]
    return UnitAction(u.id, "push", (m, d0, d0))


def _tk_action(state: GameState, u) -> UnitAction | None:
    p = u.owner
    st = state.config.stats[u.kind]
    eco = state.config.economy
    mine = [a for a in state.units if a.owner == p]
    enemies = [e for e in state.units if e.owner != p]
    warriors = sum(1 for a in mine if a.kind == "warrior")
    enemy_king = next((e for e in enemies if e.kind == "king"), None)

    if u.kind == "castle":
        if "Mining" not in state.research[p]:
            if "Mining" not in state.pending[p]:
                return UnitAction(u.id, "research", "Mining")
            return None
        if not any(a.kind == "worker" for a in mine):
            return UnitAction(u.id, "spawn", "worker")
        if warriors < 2 and state.gold[p] >= eco.spawn_costs["warrior"]:
            return UnitAction(u.id, "spawn", "warrior")
        return None

    if u.kind == "worker":
        if adjacent_to_vein(state, u):
            return UnitAction(u.id, "collect")
        goals = []
        for vx, vy in state.config.map.veins:
            for dx, dy in DIRECTIONS:
                goals.append((vx + dx, vy + dy))
        goals = [g for g in goals if state.config.map.is_plain(*g)]
        return _step_toward(state, u, goals) if goals else None

    if st.can("attack"):
        hittable = [e for e in enemies if _in_range(u, e, st.attack_range)]
        if hittable:
            best = min(hittable, key=lambda e: (e.kind != "king", e.id))
            return UnitAction(u.id, "attack", best.id)
    if u.kind == "king" or enemy_king is None:
        return None
    if u.kind == "warrior" and warriors < 2:
        return None
    return _step_toward(state, u, [enemy_king.pos], ignore=[enemy_king.id])


_SCRIPTS = {"KTK": _ktk_action, "PTA": _pta_action, "TK": _tk_action}


def rule_based_policy(state: GameState, game: str | None = None) -> UnitAction:
    """Scripted action for the next eligible unit of the player to move."""
    game = game or state.config.game
    eligible = state.eligible()
    if not eligible:
        raise GameError("no eligible unit to act")
    u = eligible[0]
    act = _SCRIPTS[game](state, u)
    legal = legal_actions(state, u.id)
    if act is not None and act in legal:
        return act
    nothing = UnitAction(u.id, "do-nothing")
    if nothing in legal:
        return nothing
    # pushers: stay put and select a tile without an enemy on it
    occ = state.occupancy
    for s in _dir_order(u.owner):
        sel = (u.x + DIRECTIONS[s][0], u.y + DIRECTIONS[s][1])
        other = occ.get(sel)
        if other is None or other.owner == u.owner:
            return UnitAction(u.id, "push", (None, s, s))
    return legal[0]
