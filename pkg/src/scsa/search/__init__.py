"""MCTS core: selection, expansion, rollout, backup and the batch loop."""
from scsa.search.mcts import (
    MODES,
    Search,
    SearchError,
    SearchParams,
    SearchStats,
    backpropagate,
    make_unit_ordering,
    mcts_iteration,
    next_actor,
    recommend,
    rollout,
    run_search,
    select_child_ucb,
    to_unit,
)
from scsa.search.tree import Tree, TreeNode

__all__ = [
    "MODES",
    "Search",
    "SearchError",
    "SearchParams",
    "SearchStats",
    "Tree",
    "TreeNode",
    "backpropagate",
    "make_unit_ordering",
    "mcts_iteration",
    "next_actor",
    "recommend",
    "rollout",
    "run_search",
    "select_child_ucb",
    "to_unit",
]
