"""Brute-force reference implementations used as test oracles.

They work on plain dictionaries extracted from a tree, never on the library's
own error functions, so a shared bug cannot hide behind both.
"""
import math
import random

from scsa.search.tree import Tree

ACTIONS = ("a", "b", "c", "d")
VALUES = (0.0, 0.25, 0.5, 0.75, 1.0)


def random_fixture(rng: random.Random, max_nodes=50):
    """A random tree of at most ``max_nodes`` nodes with hand-set statistics.

    Values sit on a quarter grid so reward gaps land exactly on thresholds.
    """
    tree = Tree()
    tree.new_node(None, None, to_move=0, actor=0)
    size = rng.randint(1, max_nodes)
    while len(tree) < size:
        parent = rng.choice(tree.nodes)
        free = [a for a in ACTIONS if a not in parent.children]
        if not free or parent.depth >= 4:
            continue
        a = rng.choice(free)
        node = tree.new_node(parent, a, to_move=rng.randint(0, 1), actor=rng.randint(1, 2))
    for node in tree.nodes:
        node.n = rng.choice((0, 1, 1, 2, 4))
        node.w = node.n * rng.choice(VALUES)
    return tree


def grow(tree: Tree, rng: random.Random, extra: int):
    """Add ``extra`` more nodes (same sampling as :func:`random_fixture`)."""
    target = len(tree) + extra
    tries = 0
    while len(tree) < target and tries < 10_000:
        tries += 1
        parent = rng.choice(tree.nodes)
        free = [a for a in ACTIONS if a not in parent.children]
        if not free or parent.depth >= 4:
            continue
        node = tree.new_node(parent, rng.choice(free), to_move=rng.randint(0, 1), actor=rng.randint(1, 2))
        node.n = rng.choice((0, 1, 2))
        node.w = node.n * rng.choice(VALUES)


def edge_table(node):
    """``{action: (mean reward, {successor id: probability})}`` for tried actions."""
    return {a: (c.w / c.n, {c.id: 1.0}) for a, c in node.children.items() if c.n >= 1}


def brute_epsilons(node1, node2, label, leaf_policy="value"):
    """(eps_R, eps_T) by direct enumeration; ``None`` when incomparable."""
    t1, t2 = edge_table(node1), edge_table(node2)
    common = sorted(set(t1) & set(t2))
    if not common:
        if leaf_policy == "value" and not t1 and not t2 and node1.n > 0 and node2.n > 0:
            return abs(node1.w / node1.n - node2.w / node2.n), 0.0
        return None, None
    er = max(abs(t1[a][0] - t2[a][0]) for a in common)
    et = 0.0
    for a in common:
        p1, p2 = {}, {}
        for sid, p in t1[a][1].items():
            p1[label(sid)] = p1.get(label(sid), 0.0) + p
        for sid, p in t2[a][1].items():
            p2[label(sid)] = p2.get(label(sid), 0.0) + p
        et = max(et, sum(abs(p1.get(k, 0.0) - p2.get(k, 0.0)) for k in set(p1) | set(p2)))
    return er, et


class BruteAbstraction:
    """Node-id → group-index map built by literal greedy grouping."""

    def __init__(self):
        self.members = []  # group index -> list of nodes
        self.depth = []
        self.key = []
        self.of = {}  # node id -> group index

    def label(self, node_id):
        g = self.of.get(node_id)
        return ("node", node_id) if g is None else ("group", g)

    def run(self, tree, eta_r, eta_t, size_limit=None, strict_cap=True, form="abstract", leaf_policy="value"):
        label = self.label if form == "abstract" else (lambda sid: ("node", sid))
        max_depth = max(n.depth for n in tree.nodes)
        for depth in range(max_depth, 0, -1):
            for node in [n for n in tree.nodes if n.depth == depth]:
                if node.id in self.of:
                    continue
                chosen = None
                for g in range(len(self.members)):
                    if self.depth[g] != depth or self.key[g] != (depth, node.to_move, node.actor):
                        continue
                    size = len(self.members[g])
                    if size_limit is not None and (size >= size_limit if strict_cap else size > size_limit):
                        continue
                    ok = True
                    for other in self.members[g]:
                        er, et = brute_epsilons(node, other, label, leaf_policy)
                        if er is None or er > eta_r or et > eta_t:
                            ok = False
                            break
                    if ok:
                        chosen = g
                        break
                if chosen is None:
                    self.members.append([])
                    self.depth.append(depth)
                    self.key.append((depth, node.to_move, node.actor))
                    chosen = len(self.members) - 1
                self.members[chosen].append(node)
                self.of[node.id] = chosen
        return self


def chi_square(observed, expected):
    return sum((o - e) ** 2 / e for o, e in zip(observed, expected))


# upper 1% point of the chi-square distribution, keyed by degrees of freedom
CHI2_99 = {1: 6.634896601021214, 2: 9.21034037197618, 3: 11.344866730144373, 4: 13.276704135987622}


def isclose(a, b):
    if a is None or b is None:
        return a is b
    return math.isclose(a, b, rel_tol=0.0, abs_tol=1e-12)
