"""Grouping of same-depth tree nodes by approximate MDP homomorphism.

A node's reward estimate for action ``a`` is the mean return backed up
through that edge; its transition estimate is the empirical successor
distribution (a point mass here, the games being deterministic).  Two nodes
are compared only on actions both have tried.

Nodes with no tried action at all (leaves) have nothing to compare on.
Under the default ``leaf_policy="value"`` two such leaves are compared on
their own mean value, with zero transition error; under
``"incomparable"`` they never share a group.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

INCOMPARABLE = None


@dataclass(eq=False)
class AbstractNode:
    id: int
    depth: int
    key: tuple
    members: list = field(default_factory=list)
    n: int = 0
    w: float = 0.0
    # (joining node id, existing member id, eps_R, eps_T) at admission time
    admissions: list = field(default_factory=list)

    def __len__(self):
        return len(self.members)

    @property
    def q(self) -> float:
        return self.w / self.n if self.n else 0.0

    def refresh(self):
        self.n = sum(m.n for m in self.members)
        self.w = sum(m.w for m in self.members)


class AbstractionPhi:
    """The node → group map.  Ungrouped nodes stand for themselves."""

    def __init__(self):
        self.groups: dict[int, AbstractNode] = {}
        self.by_depth: dict[int, list[AbstractNode]] = {}
        self.membership: dict[int, int] = {}
        self._next_id = 0

    def group_of(self, node) -> AbstractNode | None:
        gid = self.membership.get(node.id)
        return None if gid is None else self.groups[gid]

    def new_group(self, node) -> AbstractNode:
        g = AbstractNode(self._next_id, node.depth, node.key)
        self._next_id += 1
        self.groups[g.id] = g
        self.by_depth.setdefault(node.depth, []).append(g)
        self.add(node, g)
        return g

    def add(self, node, group: AbstractNode, admissions=()):
        if node.id in self.membership:
            raise ValueError(f"node {node.id} is already grouped")
        if node.depth != group.depth:
            raise ValueError("group members must share a depth")
        group.members.append(node)
        group.admissions.extend(admissions)
        self.membership[node.id] = group.id
        node.group = group
        group.refresh()

    def split(self):
        """Back to the identity abstraction; ground statistics are untouched."""
        for g in self.groups.values():
            for m in g.members:
                m.group = None
        self.groups.clear()
        self.by_depth.clear()
        self.membership.clear()

    def is_identity(self) -> bool:
        return all(len(g) <= 1 for g in self.groups.values())

    def abstract_id(self, node):
        """Label of the abstract state holding ``node`` (itself if ungrouped)."""
        gid = self.membership.get(node.id)
        return ("node", node.id) if gid is None else ("group", gid)

    def max_group_size(self) -> int:
        return max((len(g) for g in self.groups.values()), default=0)

    def __len__(self):
        return len(self.groups)


# approximate homomorphism errors --------------------------------------


def _common_actions(s1, s2):
    sup1 = s1.support()
    sup2 = s2.support()
    return sup1, sup2, [a for a in sup1 if a in sup2]


def epsilon_r(s1, s2, leaf_policy: str = "value"):
    """Largest reward gap over the actions both nodes have tried."""
    sup1, sup2, common = _common_actions(s1, s2)
    if not common:
        if leaf_policy == "value" and not sup1 and not sup2 and s1.n and s2.n:
            return abs(s1.q - s2.q)
        return INCOMPARABLE
    worst = 0.0
    for a in common:
        c1, c2 = sup1[a], sup2[a]
        gap = abs(c1.w / c1.n - c2.w / c2.n)
        if gap > worst:
            worst = gap
    return worst


def _successor_distribution(node, action, phi: AbstractionPhi | None, form: str) -> dict:
    dist = {}
    for succ, p in _transition(node, action):
        label = ("node", succ.id) if form == "ground" or phi is None else phi.abstract_id(succ)
        dist[label] = dist.get(label, 0.0) + p
    return dist


def _transition(node, action):
    child = node.children[action]
    return [(child, 1.0)]


def epsilon_t(s1, s2, phi: AbstractionPhi | None = None, form: str = "abstract", leaf_policy: str = "value"):
    """Worst total-variation gap between successor distributions.

    With ``form="abstract"`` successors are pooled by abstract state first;
    with ``form="ground"`` they are compared node by node.
    """
    sup1, sup2, common = _common_actions(s1, s2)
    if not common:
        if leaf_policy == "value" and not sup1 and not sup2 and s1.n and s2.n:
            return 0.0
        return INCOMPARABLE
    worst = 0.0
    for a in common:
        d1 = _successor_distribution(s1, a, phi, form)
        d2 = _successor_distribution(s2, a, phi, form)
        tv = sum(abs(d1.get(k, 0.0) - d2.get(k, 0.0)) for k in set(d1) | set(d2))
        if tv > worst:
            worst = tv
    return worst


# construction -----------------------------------------------------------


@dataclass
class AbstractionConfig:
    eta_r: float
    eta_t: float
    size_limit: int | None = None
    strict_cap: bool = True
    epsilon_t_form: str = "abstract"
    leaf_policy: str = "value"


def _at_capacity(group: AbstractNode, cfg: AbstractionConfig) -> bool:
    if cfg.size_limit is None:
        return False
    if cfg.strict_cap:
        return len(group) >= cfg.size_limit
    return len(group) > cfg.size_limit


def _admit(s1, group: AbstractNode, phi: AbstractionPhi, cfg: AbstractionConfig):
    """Pairwise errors against every member, or ``None`` on the first rejection."""
    record = []
    for s2 in group.members:
        er = epsilon_r(s1, s2, cfg.leaf_policy)
        if er is INCOMPARABLE or er > cfg.eta_r:
            return None
        et = epsilon_t(s1, s2, phi, cfg.epsilon_t_form, cfg.leaf_policy)
        if et is INCOMPARABLE or et > cfg.eta_t:
            return None
        record.append((s1.id, s2.id, er, et))
    return record


def construct_abstraction(
    tree,
    phi: AbstractionPhi,
    eta_r: float,
    eta_t: float,
    depth: int | None = None,
    size_limit: int | None = None,
    *,
    strict_cap: bool = True,
    epsilon_t_form: str = "abstract",
    leaf_policy: str = "value",
) -> AbstractionPhi:
    """Place every ungrouped node of depth ``depth..1`` into a group.

    Depths are visited bottom-up so successors are grouped before their
    parents are compared.  A node joins the first same-depth group (by id)
    that has room and whose every member is within both thresholds; failing
    that it starts a group of its own.
    """
    cfg = AbstractionConfig(eta_r, eta_t, size_limit, strict_cap, epsilon_t_form, leaf_policy)
    if depth is None:
        depth = len(tree.levels) - 1
    for level in range(min(depth, len(tree.levels) - 1), 0, -1):
        for s1 in tree.levels[level]:
            if s1.id in phi.membership:
                continue
            placed = False
            for g in phi.by_depth.get(level, ()):
                if g.key != s1.key or _at_capacity(g, cfg):
                    continue
                record = _admit(s1, g, phi, cfg)
                if record is not None:
                    phi.add(s1, g, record)
                    placed = True
                    break
            if not placed:
                phi.new_group(s1)
    return phi


def split_abstraction(phi: AbstractionPhi) -> AbstractionPhi:
    phi.split()
    return phi


def rg_assign(node, groups_at_depth: list, rng: random.Random):
    """Random grouping: each of the N groups or a new one, each w.p. 1/(N+1).

    Returns the chosen group, or ``None`` for "start a new group".
    """
    k = rng.randrange(len(groups_at_depth) + 1)
    return None if k == len(groups_at_depth) else groups_at_depth[k]


def random_grouping(tree, phi: AbstractionPhi, rng: random.Random) -> AbstractionPhi:
    for level in range(len(tree.levels) - 1, 0, -1):
        for node in tree.levels[level]:
            if node.id in phi.membership:
                continue
            candidates = [g for g in phi.by_depth.get(level, ()) if g.key == node.key]
            g = rg_assign(node, candidates, rng)
            if g is None:
                phi.new_group(node)
            else:
                phi.add(node, g)
    return phi


def compression_rate(tree, phi: AbstractionPhi) -> float:
    """Ground nodes below the root over abstract states below the root."""
    ground = sum(len(level) for level in tree.levels[1:])
    if ground == 0:
        return 1.0
    return ground / abstract_count(tree, phi)


def abstract_count(tree, phi: AbstractionPhi) -> int:
    ground = sum(len(level) for level in tree.levels[1:])
    grouped = sum(len(g) for g in phi.groups.values() if g.depth >= 1)
    groups = sum(1 for g in phi.groups.values() if g.depth >= 1)
    return groups + (ground - grouped)
