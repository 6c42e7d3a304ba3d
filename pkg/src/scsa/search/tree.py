from __future__ import annotations

from typing import Any


class TreeNode:
    """A ground search-tree node.

    Edge statistics for action ``a`` live on the child reached by ``a``: the
    games are deterministic, so each tried action has exactly one observed
    successor and ``N(s, a)``, ``W(s, a)`` equal that child's ``n`` and ``w``.
    """

    __slots__ = (
        "id",
        "state",
        "parent",
        "action",
        "depth",
        "children",
        "untried",
        "n",
        "w",
        "group",
        "actor",
        "unit_index",
        "to_move",
        "terminal",
        "terminal_score",
    )

    def __init__(self, id, state=None, parent=None, action=None, depth=0, actor=None, unit_index=0, to_move=0):
        self.id = id
        self.state = state
        self.parent = parent
        self.action = action
        self.depth = depth
        self.children: dict[Any, TreeNode] = {}
        self.untried: list | None = None
        self.n = 0
        self.w = 0.0
        self.group = None
        self.actor = actor
        self.unit_index = unit_index
        self.to_move = to_move
        self.terminal = False
        self.terminal_score = 0.0

    @property
    def key(self) -> tuple:
        """Nodes may only share a group when they agree on this."""
        return (self.depth, self.to_move, self.actor)

    @property
    def q(self) -> float:
        return self.w / self.n if self.n else 0.0

    def support(self) -> dict:
        """Tried actions (``N(s, a) >= 1``) mapped to their successor."""
        return {a: c for a, c in self.children.items() if c.n >= 1}

    def edge_stats(self) -> dict:
        """``{a: (N(s,a), R(s,a), {successor_id: frequency})}``."""
        return {a: (c.n, c.w / c.n, {c.id: 1.0}) for a, c in self.children.items() if c.n >= 1}

    def __repr__(self):
        return f"TreeNode(id={self.id}, depth={self.depth}, n={self.n}, w={self.w:.3f})"


class Tree:
    """Node store indexed by depth; node ids follow creation order."""

    def __init__(self):
        self.nodes: list[TreeNode] = []
        self.levels: list[list[TreeNode]] = []
        self.root: TreeNode | None = None

    def new_node(self, parent: TreeNode | None = None, action=None, **kw) -> TreeNode:
        depth = 0 if parent is None else parent.depth + 1
        node = TreeNode(len(self.nodes), parent=parent, action=action, depth=depth, **kw)
        self.nodes.append(node)
        while len(self.levels) <= depth:
            self.levels.append([])
        self.levels[depth].append(node)
        if parent is None:
            if self.root is None:
                self.root = node
        else:
            parent.children[action] = node
        return node

    @property
    def max_depth(self) -> int:
        return len(self.levels) - 1

    def __len__(self):
        return len(self.nodes)
