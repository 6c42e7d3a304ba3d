import random

import pytest
from hypothesis import given, settings, strategies as st

from scsa.engine import (
    END_TURN,
    ForwardModel,
    GameError,
    IllegalAction,
    UnitAction,
    apply_action,
    legal_actions,
    random_action,
    terminal_outcome,
    unit_action_counts,
)
from scsa.games import canonical_state, load_config, sample_initial_state

from conftest import board


def _play_random(state, rng, limit=400):
    for _ in range(limit):
        if terminal_outcome(state).terminal:
            break
        state = apply_action(state, random_action(state, rng))
    return state


def test_walled_in_unit_only_has_do_nothing():
    s = board("KTK", [
        ".#....",
        "#K#...",
        ".#....",
        "......",
        "......",
        ".....k",
    ])
    king = next(u for u in s.units if u.owner == 0)
    assert legal_actions(s, king.id) == [UnitAction(king.id, "do-nothing")]


def test_open_pusher_has_80_push_actions():
    s = board("PTA", [
        ".......",
        ".......",
        "...P...",
        ".......",
        ".......",
        ".......",
        "p......",
    ])
    pusher = next(u for u in s.units if u.owner == 0)
    acts = legal_actions(s, pusher.id)
    assert len(acts) == 80
    assert len(set(acts)) == 80
    assert all(a.verb == "push" for a in acts)


def test_pusher_against_wall_loses_move_options():
    s = board("PTA", [
        "P......",
        ".......",
        "......p",
    ])
    pusher = next(u for u in s.units if u.owner == 0)
    # two open directions: (1 stay + 2 moves) x 4 selections x 4 push directions
    assert len(legal_actions(s, pusher.id)) == 48


def test_push_into_hole_removes_enemy():
    s = board("PTA", [
        "......",
        ".Pp.O.",
        "......",
        "....P.",
        "....p.",
    ])
    pusher = s.occupancy[(1, 1)]
    victim = s.occupancy[(2, 1)]
    # move east onto (2,1)? occupied, so stay; select east (1), push east (1) -> lands on (3,1)
    s2 = apply_action(s, UnitAction(pusher.id, "push", (None, 1, 1)))
    assert s2.unit(victim.id).pos == (3, 1)
    s3 = s2.replace(to_move=0, acted=frozenset())
    pusher = s3.unit(pusher.id)
    # step east onto (2,1), select east, push east: (3,1) -> hole (4,1)
    s4 = apply_action(s3, UnitAction(pusher.id, "push", (1, 1, 1)))
    assert s4.unit(victim.id) is None
    assert s4.unit(pusher.id).pos == (2, 1)


def test_blocked_push_is_a_no_op_on_the_victim():
    s = board("PTA", [
        "Pp#...",
        "......",
        "P....p",
        ".....p",
    ])
    pusher = s.occupancy[(0, 0)]
    victim = s.occupancy[(1, 0)]
    s2 = apply_action(s, UnitAction(pusher.id, "push", (None, 1, 1)))
    assert s2.unit(victim.id).pos == (1, 0)


def test_attack_kills_and_ends_game():
    s = board("KTK", [
        "Kk....",
        "......",
        "......",
    ])
    king, enemy_king = s.units
    s = s.replace(units=(king, enemy_king._replace(hp=10)))
    s2 = apply_action(s, UnitAction(king.id, "attack", enemy_king.id))
    assert s2.unit(enemy_king.id) is None
    out = terminal_outcome(s2)
    assert out.kind == "win" and out.winner == 0
    assert out.score(0) == 1 and out.score(1) == -1
    with pytest.raises(GameError):
        legal_actions(s2)
    with pytest.raises(IllegalAction):
        apply_action(s2, END_TURN)


def test_heal_is_capped_at_max_hp():
    s = board("KTK", [
        "KH....",
        "......",
        ".....k",
    ])
    king, healer, _ = s.units
    hurt = king._replace(hp=king.hp - 5)
    s = s.replace(units=(hurt, healer, s.units[2]))
    s2 = apply_action(s, UnitAction(healer.id, "heal", king.id))
    assert s2.unit(king.id).hp == s.config.stats["king"].max_hp


def test_research_then_spawn_worker():
    s = board("TK", [
        "C.G.....",
        "K.......",
        "........",
        "........",
        "........",
        ".......c",
        ".......k",
    ])
    castle = next(u for u in s.units if u.kind == "castle" and u.owner == 0)
    spawns = [a for a in legal_actions(s, castle.id) if a.verb == "spawn"]
    assert UnitAction(castle.id, "spawn", "worker") not in spawns
    s = apply_action(s, UnitAction(castle.id, "research", "Mining"))
    assert "Mining" not in s.research[0]
    s = apply_action(s, END_TURN)
    assert "Mining" in s.research[0]
    s = apply_action(s, END_TURN)
    assert s.to_move == 0 and s.round == 1
    acts = legal_actions(s, castle.id)
    assert UnitAction(castle.id, "spawn", "worker") in acts
    assert UnitAction(castle.id, "research", "Mining") not in acts
    gold = s.gold[0]
    s2 = apply_action(s, UnitAction(castle.id, "spawn", "worker"))
    worker = next(u for u in s2.units if u.kind == "worker")
    assert s2.gold[0] == gold - s.config.economy.spawn_costs["worker"]
    assert worker.id in s2.acted and worker.owner == 0


def test_collect_next_to_vein():
    s = board("TK", [
        "C.G.....",
        "K.......",
        "........",
        "........",
        "........",
        ".......c",
        ".......k",
    ])
    castle, king = s.units_of(0)
    worker_unit = king._replace(id=s.next_id, kind="worker", x=1, y=0, hp=s.config.stats["worker"].max_hp)
    s = s.replace(units=s.units + (worker_unit,), next_id=s.next_id + 1)
    s2 = apply_action(s, UnitAction(worker_unit.id, "collect"))
    assert s2.gold[0] == s.gold[0] + s.config.economy.collect_yield


def test_round_limit_draw():
    s = canonical_state(load_config("KTK", round_limit=1))
    s = apply_action(s, END_TURN)
    assert not terminal_outcome(s).terminal
    s = apply_action(s, END_TURN)
    assert terminal_outcome(s).kind == "draw"


def test_turn_ends_when_every_unit_has_acted():
    s = canonical_state(load_config("KTK"))
    for u in s.units_of(0):
        assert s.to_move == 0
        s = apply_action(s, UnitAction(u.id, "do-nothing"))
    assert s.to_move == 1 and s.acted == frozenset()


def test_illegal_actions_are_rejected():
    s = canonical_state(load_config("KTK"))
    mine = s.units_of(0)[0]
    theirs = s.units_of(1)[0]
    with pytest.raises(IllegalAction):
        apply_action(s, UnitAction(theirs.id, "do-nothing"))
    with pytest.raises(IllegalAction):
        apply_action(s, UnitAction(mine.id, "move", (0, 0)))
    with pytest.raises(IllegalAction):
        apply_action(s, UnitAction(999, "do-nothing"))
    s2 = apply_action(s, UnitAction(mine.id, "do-nothing"))
    with pytest.raises(GameError):
        legal_actions(s2, mine.id)


def test_forward_model_counts_calls():
    fm = ForwardModel()
    s = sample_initial_state(load_config("PTA"), 3)
    rng = random.Random(0)
    for i in range(25):
        if terminal_outcome(s).terminal:
            break
        s = fm.apply(s, random_action(s, rng))
        assert fm.calls == i + 1
    fm2 = ForwardModel()
    apply_action(sample_initial_state(load_config("KTK"), 0), END_TURN, fm2)
    assert fm2.calls == 1


def test_apply_is_pure_and_deterministic():
    s = sample_initial_state(load_config("KTK"), 5)
    before = s.key()
    acts = legal_actions(s)
    a = acts[len(acts) // 2]
    assert apply_action(s, a) == apply_action(s, a)
    assert s.key() == before


@settings(max_examples=30, deadline=None)
@given(game=st.sampled_from(["KTK", "PTA", "TK"]), seed=st.integers(0, 10_000))
def test_random_playouts_stay_legal(game, seed):
    rng = random.Random(seed)
    s = sample_initial_state(load_config(game), seed % 50)
    for _ in range(150):
        if terminal_outcome(s).terminal:
            break
        # random_action must draw from exactly the materialized legal set
        a = random_action(s, rng)
        assert a in legal_actions(s)
        s = apply_action(s, a)
        occupied = [u.pos for u in s.units]
        assert len(occupied) == len(set(occupied))
        assert all(s.config.map.is_plain(*p) for p in occupied)
        assert all(0 < u.hp <= s.config.stats[u.kind].max_hp for u in s.units)


@settings(max_examples=25, deadline=None)
@given(game=st.sampled_from(["KTK", "PTA", "TK"]), seed=st.integers(0, 10_000))
def test_action_counts_match_materialized_lists(game, seed):
    s = _play_random(sample_initial_state(load_config(game), seed % 50), random.Random(seed), limit=seed % 40)
    if terminal_outcome(s).terminal:
        return
    counts = unit_action_counts(s)
    assert counts == [len(legal_actions(s, u.id)) for u in s.eligible()]
    assert sum(counts) + 1 == len(legal_actions(s))


def test_same_seed_same_game():
    a = _play_random(sample_initial_state(load_config("TK"), 1), random.Random(9))
    b = _play_random(sample_initial_state(load_config("TK"), 1), random.Random(9))
    assert a == b
