"""MCTS over the engine's forward model, with optional node abstraction.

Modes:

* ``plain``        every node offers all eligible units' actions plus end-turn
* ``unit-ordered`` each node decides one unit, following a fixed ordering
* ``rg``           unit-ordered, random grouping, split at ``alpha_es``
* ``elastic``      unit-ordered, homomorphism grouping, split at ``alpha_es``
* ``scsa``         unit-ordered, homomorphism grouping capped at ``size_limit``

Values are kept from the planning player's side on the unit interval; a
node where the opponent moves picks children by ``1 - Q``.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

from scsa.abstraction import (
    AbstractionPhi,
    abstract_count,
    compression_rate,
    construct_abstraction,
    random_grouping,
)
from scsa.engine import (
    ForwardModel,
    GameState,
    apply_action,
    legal_actions,
    random_action,
    terminal_outcome,
)
from scsa.games.heuristics import evaluate
from scsa.search.tree import Tree, TreeNode

MODES = ("plain", "unit-ordered", "rg", "elastic", "scsa")
GROUPING_MODES = ("rg", "elastic", "scsa")

# consecutive zero-cost iterations (terminal leaves only) before giving up
_STALL_LIMIT = 1000


class SearchError(Exception):
    pass


@dataclass
class SearchParams:
    budget: int = 10_000  # forward-model calls
    batch: int = 20
    c: float = 0.1
    rollout_length: int = 10
    alpha_es: int | None = None  # iterations
    eta_r: float = 0.05
    eta_t: float = 1.0
    size_limit: int | None = None
    mode: str = "scsa"
    seed: int = 0
    strict_cap: bool = True
    epsilon_t_form: str = "abstract"
    leaf_policy: str = "value"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown search mode {self.mode!r}")
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.batch < 1:
            raise ValueError("batch size must be at least 1")
        if self.rollout_length < 1:
            raise ValueError("rollout length must be at least 1")
        if self.mode == "scsa" and (self.size_limit is None or self.size_limit < 1):
            raise ValueError("scsa mode needs size_limit >= 1")
        if self.alpha_es is not None and self.mode not in ("elastic", "rg"):
            raise ValueError("alpha_es only applies to elastic and rg modes")

    @property
    def unit_ordered(self) -> bool:
        return self.mode != "plain"


@dataclass
class SearchStats:
    iterations: int = 0
    fm_calls: int = 0
    tree_nodes: int = 0
    abstract_nodes: int = 0
    wall_time_ms: float = 0.0
    max_depth: int = 0
    split_iteration: int | None = None
    # (iteration, ground nodes, abstract nodes, compression rate)
    trace: list = field(default_factory=list)
    max_group_sizes: list = field(default_factory=list)

    CSV_FIELDS = ("iterations", "fm_calls", "tree_nodes", "abstract_nodes", "wall_time_ms")

    def csv_row(self) -> dict:
        return {k: getattr(self, k) for k in self.CSV_FIELDS}


def make_unit_ordering(state: GameState, rng: random.Random, player: int | None = None) -> list[int]:
    """Random permutation of one player's unit ids, fixed for a whole game."""
    player = state.to_move if player is None else player
    ids = sorted(u.id for u in state.units if u.owner == player)
    if not ids:
        raise SearchError(f"player {player} has no units to order")
    rng.shuffle(ids)
    return ids


def next_actor(state: GameState, ordering) -> tuple[int, int]:
    """The unit that acts next and its position in the effective ordering.

    Dead units are skipped; units missing from ``ordering`` (spawned during
    the game, or the opponent's) follow in id order.
    """
    alive = [u.id for u in state.units if u.owner == state.to_move]
    known = set(ordering)
    order = [uid for uid in ordering if uid in alive] + [uid for uid in alive if uid not in known]
    for i, uid in enumerate(order):
        if uid not in state.acted:
            return uid, i
    raise SearchError("no eligible unit left in the turn")


class Search:
    """One search context: tree, abstraction, forward-model counter, rng."""

    def __init__(self, root: GameState, params: SearchParams, ordering=None, rng=None, player=None):
        if terminal_outcome(root).terminal:
            raise SearchError("cannot search from a terminal state")
        self.params = params
        self.rng = rng if rng is not None else random.Random(params.seed)
        self.player = root.to_move if player is None else player
        if params.unit_ordered and ordering is None:
            ordering = make_unit_ordering(root, self.rng, self.player)
        self.ordering = list(ordering) if ordering is not None else None
        self.fm = ForwardModel()
        self.tree = Tree()
        self.phi = AbstractionPhi()
        self.root = self._make_node(root, None, None)
        self.n_fm = 0
        self.n_mcts = 0
        self.split_done = False
        self.stats = SearchStats()

    # tree construction -----------------------------------------------
    def _make_node(self, state: GameState, parent, action) -> TreeNode:
        out = terminal_outcome(state)
        actor, idx = None, 0
        if not out.terminal and self.params.unit_ordered:
            order = self.ordering if state.to_move == self.player else ()
            actor, idx = next_actor(state, order)
        node = self.tree.new_node(
            parent, action, state=state, actor=actor, unit_index=idx, to_move=state.to_move
        )
        if out.terminal:
            node.terminal = True
            node.terminal_score = out.score(self.player)
        return node

    def _actions(self, node: TreeNode) -> list:
        acts = legal_actions(node.state, node.actor if self.params.unit_ordered else "any")
        self.rng.shuffle(acts)
        return acts

    # the four stages ---------------------------------------------------
    def select_child(self, node: TreeNode) -> TreeNode:
        return node.children[select_child_ucb(node, self.params.c, self.player)]

    def rollout(self, state: GameState) -> float:
        return rollout(state, self.params.rollout_length, self.rng, self.player, self.fm)

    def iteration(self) -> tuple[int, int]:
        """One selection/expansion/rollout/backup pass.

        Returns the forward-model calls it used and the tree depth.
        """
        start = self.fm.calls
        node = self.root
        path = [node]
        while not node.terminal:
            if node.untried is None:
                node.untried = self._actions(node)
            if node.untried:
                action = node.untried.pop()
                child_state = self.fm.apply(node.state, action)
                node = self._make_node(child_state, node, action)
                path.append(node)
                break
            node = self.select_child(node)
            path.append(node)
        if node.terminal:
            score = node.terminal_score
        else:
            score = self.rollout(node.state)
        backpropagate(path, to_unit(score))
        return self.fm.calls - start, self.tree.max_depth

    # outer loop --------------------------------------------------------
    def _regroup(self, depth: int):
        p = self.params
        if p.mode == "rg":
            random_grouping(self.tree, self.phi, self.rng)
        else:
            construct_abstraction(
                self.tree,
                self.phi,
                p.eta_r,
                p.eta_t,
                depth,
                p.size_limit if p.mode == "scsa" else None,
                strict_cap=p.strict_cap,
                epsilon_t_form=p.epsilon_t_form,
                leaf_policy=p.leaf_policy,
            )
        self.stats.max_group_sizes.append(self.phi.max_group_size())

    def _record(self):
        ground = len(self.tree) - 1
        self.stats.trace.append(
            (self.n_mcts, ground, abstract_count(self.tree, self.phi), compression_rate(self.tree, self.phi))
        )

    def run(self) -> tuple:
        p = self.params
        t0 = time.perf_counter()
        stall = 0
        while self.n_fm < p.budget:
            c_fm, depth = self.iteration()
            if p.mode in GROUPING_MODES:
                if p.alpha_es is not None and self.n_mcts > p.alpha_es and p.mode != "scsa":
                    if not self.split_done:
                        self.phi.split()
                        self.split_done = True
                        self.stats.split_iteration = self.n_mcts
                elif self.n_mcts % p.batch == 0:
                    self._regroup(depth)
            if self.n_mcts % p.batch == 0:
                self._record()
            self.n_fm += c_fm
            self.n_mcts += 1
            stall = stall + 1 if c_fm == 0 else 0
            if stall >= _STALL_LIMIT:
                break
        s = self.stats
        s.iterations = self.n_mcts
        s.fm_calls = self.fm.calls
        s.tree_nodes = len(self.tree)
        s.abstract_nodes = abstract_count(self.tree, self.phi)
        s.max_depth = self.tree.max_depth
        s.wall_time_ms = (time.perf_counter() - t0) * 1000.0
        return recommend(self.root), s


def to_unit(score: float) -> float:
    """Clamp a [-1, 1] score onto [0, 1]; losses and draws land on 0."""
    return 0.0 if score < 0.0 else 1.0 if score > 1.0 else score


def select_child_ucb(node: TreeNode, c: float, player: int):
    """UCB1 over the children, reading group aggregates where grouped."""
    if not node.children:
        raise SearchError("node has no children to select from")
    g = node.group
    parent_n = g.n if g is not None else node.n
    log_n = math.log(parent_n) if parent_n > 0 else 0.0
    flip = node.to_move != player
    best, best_action = -math.inf, None
    for action, child in node.children.items():
        cg = child.group
        if cg is not None:
            n, w = cg.n, cg.w
        else:
            n, w = child.n, child.w
        if n == 0:
            return action
        q = w / n
        if flip:
            q = 1.0 - q
        value = q + c * math.sqrt(log_n / n)
        if value > best:
            best, best_action = value, action
    return best_action


def rollout(state: GameState, length: int, rng: random.Random, player: int, fm: ForwardModel | None = None) -> float:
    """Uniformly random play for up to ``length`` actions, then evaluate."""
    for _ in range(length):
        if terminal_outcome(state).terminal:
            break
        action = random_action(state, rng)
        state = apply_action(state, action, fm)
    return evaluate(state, player)


def backpropagate(path, score: float):
    for node in path:
        node.n += 1
        node.w += score
        g = node.group
        if g is not None:
            g.n += 1
            g.w += score


def recommend(root: TreeNode):
    """Most-visited root action by ground visit count; ties go to the first."""
    if not root.children:
        raise SearchError("root has no children")
    best, best_n = None, -1
    for action, child in root.children.items():
        if child.n > best_n:
            best, best_n = action, child.n
    return best


def run_search(root: GameState, params: SearchParams, ordering=None, rng=None, player=None):
    """Search ``root`` within ``params.budget`` forward-model calls."""
    return Search(root, params, ordering=ordering, rng=rng, player=player).run()


def mcts_iteration(search: Search) -> tuple[int, int]:
    return search.iteration()


__all__ = [
    "MODES",
    "Search",
    "SearchError",
    "SearchParams",
    "SearchStats",
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
