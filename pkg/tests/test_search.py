import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from scsa.abstraction import AbstractionPhi
from scsa.agents import agent_params
from scsa.engine import UnitAction, legal_actions
from scsa.games import load_config, sample_initial_state
from scsa.search import (
    Search,
    SearchParams,
    backpropagate,
    make_unit_ordering,
    next_actor,
    recommend,
    run_search,
    select_child_ucb,
    to_unit,
)
from scsa.search.tree import Tree

from conftest import board
from oracles import CHI2_99, chi_square


def fan(stats, to_move=0):
    """Root with one child per (n, w) pair, actions 0..k-1."""
    tree = Tree()
    root = tree.new_node(None, None, to_move=to_move)
    root.n = sum(n for n, _ in stats)
    for i, (n, w) in enumerate(stats):
        c = tree.new_node(root, i, to_move=1 - to_move)
        c.n, c.w = n, w
    return tree, root


def test_ucb_hand_computed():
    tree, root = fan([(10, 6.0), (5, 2.0), (1, 0.9)])
    c = 0.5
    ln = math.log(16)
    scores = [0.6 + c * math.sqrt(ln / 10), 0.4 + c * math.sqrt(ln / 5), 0.9 + c * math.sqrt(ln / 1)]
    assert select_child_ucb(root, c, 0) == scores.index(max(scores)) == 2
    # with no exploration the best mean wins
    assert select_child_ucb(root, 0.0, 0) == 2


def test_ucb_prefers_unvisited_and_breaks_ties_by_order():
    tree, root = fan([(3, 3.0), (0, 0.0), (0, 0.0)])
    assert select_child_ucb(root, 1.0, 0) == 1
    tree, root = fan([(2, 1.0), (2, 1.0)])
    assert select_child_ucb(root, 1.0, 0) == 0


def test_ucb_flips_values_at_opponent_nodes():
    tree, root = fan([(10, 8.0), (10, 2.0)], to_move=1)
    assert select_child_ucb(root, 0.0, player=0) == 1
    assert select_child_ucb(root, 0.0, player=1) == 0


def test_ucb_reads_group_aggregates():
    tree, root = fan([(10, 6.0), (10, 5.0), (1, 0.0)])
    phi = AbstractionPhi()
    kids = list(root.children.values())
    # child 2 looks bad alone but shares a strong group
    g = phi.new_group(kids[2])
    other = tree.new_node(kids[0], "x")
    other.depth = 1  # stand-in sibling at the same depth
    other.n, other.w = 99, 99.0
    phi.add(other, g)
    assert select_child_ucb(root, 0.0, 0) == 2


def test_recommend_uses_ground_visits():
    tree, root = fan([(3, 3.0), (7, 0.0), (7, 7.0)])
    assert recommend(root) == 1


def test_to_unit_clamps_losses_and_draws():
    assert to_unit(-1) == 0.0 and to_unit(0) == 0.0 and to_unit(1) == 1.0 and to_unit(0.3) == 0.3


def test_backprop_updates_nodes_and_groups():
    tree, root = fan([(0, 0.0), (0, 0.0)])
    a, b = root.children.values()
    phi = AbstractionPhi()
    g = phi.new_group(a)
    phi.add(b, g)
    backpropagate([root, a], 0.75)
    backpropagate([root, b], 0.25)
    assert (a.n, a.w, b.n, b.w) == (1, 0.75, 1, 0.25)
    assert (g.n, g.w) == (2, 1.0)


# whole searches ---------------------------------------------------------


def ktk_start(seed=0):
    return sample_initial_state(load_config("KTK"), seed)


@pytest.mark.parametrize("mode", ["plain", "unit-ordered", "rg", "elastic", "scsa"])
def test_budget_window_and_stats(mode):
    extra = {"size_limit": 2} if mode == "scsa" else {}
    if mode in ("rg", "elastic"):
        extra["alpha_es"] = 60
    p = SearchParams(budget=1500, mode=mode, rollout_length=10, seed=3, **extra)
    action, stats = run_search(ktk_start(), p)
    assert action in legal_actions(ktk_start())
    assert p.budget <= stats.fm_calls < p.budget + 1 + p.rollout_length
    assert stats.tree_nodes >= 2


def test_single_forward_model_call():
    action, stats = run_search(ktk_start(), SearchParams(budget=1, mode="scsa", size_limit=2))
    assert stats.iterations == 1
    assert action in legal_actions(ktk_start())


def test_root_visits_equal_iterations():
    s = Search(ktk_start(), SearchParams(budget=800, mode="unit-ordered"))
    s.run()
    assert s.root.n == s.stats.iterations
    assert sum(c.n for c in s.root.children.values()) == s.stats.iterations


def test_seeded_search_replays():
    p = agent_params("PTA", "scsa", budget=1200, seed=42)
    a1, s1 = run_search(sample_initial_state(load_config("PTA"), 2), p)
    a2, s2 = run_search(sample_initial_state(load_config("PTA"), 2), p)
    assert a1 == a2
    assert (s1.iterations, s1.fm_calls, s1.tree_nodes, s1.abstract_nodes, s1.trace) == \
        (s2.iterations, s2.fm_calls, s2.tree_nodes, s2.abstract_nodes, s2.trace)


def test_elastic_splits_once_past_alpha():
    p = SearchParams(budget=2000, mode="elastic", alpha_es=40, batch=10, seed=1)
    s = Search(ktk_start(), p)
    s.run()
    assert s.stats.split_iteration == 41
    assert s.phi.is_identity() and len(s.phi) == 0
    assert all(n.group is None for n in s.tree.nodes)
    after = [rate for it, _, _, rate in s.stats.trace if it > 41]
    assert after and all(r == 1.0 for r in after)
    before = [rate for it, _, _, rate in s.stats.trace if 0 < it <= 40]
    assert max(before) > 1.0


def test_scsa_groups_never_exceed_size_limit_at_full_budget():
    params = agent_params("KTK", "scsa", seed=0)
    assert params.size_limit == 2 and params.batch == 20 and params.budget == 10_000
    s = Search(ktk_start(), params)
    s.run()
    assert s.stats.max_group_sizes and max(s.stats.max_group_sizes) <= 2
    assert all(len(g) <= 2 for g in s.phi.groups.values())


def test_unit_ordered_tree_moves_one_unit_per_level():
    s = Search(ktk_start(), SearchParams(budget=600, mode="unit-ordered", seed=5))
    s.run()
    for node in s.tree.nodes:
        if node.terminal:
            continue
        for action in node.children:
            assert action.actor == node.actor


def test_search_finds_a_winning_strike():
    s = board("KTK", [
        "......",
        "..K...",
        "......",
        "....Wk",
    ])
    ek = next(u for u in s.units if u.owner == 1)
    s = s.replace(units=tuple(u._replace(hp=10) if u.id == ek.id else u for u in s.units))
    warrior = next(u for u in s.units if u.kind == "warrior")
    action, _ = run_search(s, SearchParams(budget=400, mode="unit-ordered", seed=0),
                           ordering=[warrior.id, 0])
    assert action == UnitAction(warrior.id, "attack", ek.id)


def test_next_actor_skips_dead_and_acted_units():
    s = ktk_start()
    order = [u.id for u in s.units_of(0)][::-1]
    assert next_actor(s, order) == (order[0], 0)
    s2 = s.replace(units=tuple(u for u in s.units if u.id != order[0]), acted=frozenset({order[1]}))
    assert next_actor(s2, order) == (order[2], 1)


def test_unit_ordering_first_slot_is_uniform():
    s = ktk_start()
    rng = random.Random(5)
    trials = 20_000
    counts = Counter(make_unit_ordering(s, rng, 0)[0] for _ in range(trials))
    ids = [u.id for u in s.units_of(0)]
    assert sorted(counts) == sorted(ids)
    stat = chi_square([counts[i] for i in ids], [trials / len(ids)] * len(ids))
    assert stat < CHI2_99[len(ids) - 1]


@settings(max_examples=15, deadline=None)
@given(budget=st.integers(1, 400), seed=st.integers(0, 1000), game=st.sampled_from(["KTK", "PTA", "TK"]))
def test_budget_property(budget, seed, game):
    params = agent_params(game, "scsa", budget=budget, seed=seed)
    state = sample_initial_state(load_config(game), seed % 50)
    action, stats = run_search(state, params)
    assert budget <= stats.fm_calls < budget + 1 + params.rollout_length
    assert action in legal_actions(state)


def test_invalid_params_are_rejected():
    with pytest.raises(ValueError):
        SearchParams(mode="nope")
    with pytest.raises(ValueError):
        SearchParams(budget=0)
    with pytest.raises(ValueError):
        SearchParams(mode="scsa", size_limit=None)
    with pytest.raises(ValueError):
        SearchParams(mode="scsa", size_limit=2, alpha_es=10)
