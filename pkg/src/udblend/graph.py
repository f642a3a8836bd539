"""Vote graphs and maximum spanning arborescence decoding.

Nodes are ``0..n`` with ``0`` the artificial root.  Arc weights are integer
vote counts.  Among several maximum-weight arborescences the decoder returns
the one whose head vector ``(head(1), ..., head(n))`` is lexicographically
smallest, so the result never depends on iteration order.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping

Arc = tuple[int, int]  # (head, dependent)

MAX_BRUTE_FORCE_NODES = 8


class InfeasibleGraphError(ValueError):
    def __init__(self, node: int, reason: str = "has no incoming arc"):
        self.node = node
        super().__init__(f"no spanning arborescence: node {node} {reason}")


@dataclass
class WeightedArcGraph:
    """Digraph over ``0..n`` with integer weights and per-arc label votes."""

    n: int
    weight: dict[Arc, int] = field(default_factory=dict)
    labels: dict[Arc, Counter] = field(default_factory=dict)

    def add_vote(self, head: int, dep: int, label: str, count: int = 1) -> None:
        if head == dep:
            raise ValueError(f"self-loop on node {dep}")
        if dep == 0:
            raise ValueError("arcs into the root are not allowed")
        if not (0 <= head <= self.n and 1 <= dep <= self.n):
            raise ValueError(f"arc ({head}, {dep}) outside nodes 0..{self.n}")
        if count < 1:
            raise ValueError("vote count must be positive")
        arc = (head, dep)
        self.weight[arc] = self.weight.get(arc, 0) + count
        self.labels.setdefault(arc, Counter())[label] += count

    @classmethod
    def from_weights(cls, n: int, weights: Mapping[Arc, int], label: str = "_") -> "WeightedArcGraph":
        g = cls(n)
        for (h, d), w in weights.items():
            g.add_vote(h, d, label, w)
        return g

    def incoming(self, dep: int) -> list[int]:
        return sorted(h for (h, d) in self.weight if d == dep)

    def tree_weight(self, tree: Mapping[int, int]) -> int:
        return sum(self.weight[(h, d)] for d, h in tree.items())

    def scaled(self, factor: int) -> "WeightedArcGraph":
        g = WeightedArcGraph(self.n)
        for arc, counts in self.labels.items():
            for label, c in counts.items():
                g.add_vote(arc[0], arc[1], label, c * factor)
        return g


def is_arborescence(n: int, tree: Mapping[int, int]) -> bool:
    """True iff ``tree`` gives every node 1..n a head and all reach node 0."""
    if set(tree) != set(range(1, n + 1)):
        return False
    for start in range(1, n + 1):
        seen = set()
        node = start
        while node != 0:
            if node in seen or node not in tree:
                return False
            seen.add(node)
            node = tree[node]
    return True


# -- Chu-Liu-Edmonds ---------------------------------------------------------


def _find_cycle(best: Mapping[int, int]) -> list[int] | None:
    done: set[int] = set()
    for start in sorted(best):
        path: list[int] = []
        on_path: set[int] = set()
        node = start
        while node in best and node not in done:
            if node in on_path:
                return path[path.index(node):]
            on_path.add(node)
            path.append(node)
            node = best[node]
        done.update(path)
    return None


def _cle(nodes: list[int], scores: dict[Arc, int], root: int) -> dict[int, int]:
    incoming: dict[int, list[tuple[int, int]]] = {}
    for (h, d), s in scores.items():
        incoming.setdefault(d, []).append((s, -h))
    best: dict[int, int] = {}
    for d in nodes:
        if d == root:
            continue
        if d not in incoming:
            raise InfeasibleGraphError(d)
        best[d] = -max(incoming[d])[1]

    cycle = _find_cycle(best)
    if cycle is None:
        return best

    in_cycle = set(cycle)
    c = max(nodes) + 1
    new_scores: dict[Arc, int] = {}
    enter: dict[int, int] = {}  # outside head -> dependent inside the cycle
    leave: dict[int, int] = {}  # outside dependent -> head inside the cycle
    for (h, d), s in scores.items():
        if h in in_cycle and d in in_cycle:
            continue
        if d in in_cycle:
            adj = s - scores[(best[d], d)]
            if (h, c) not in new_scores or adj > new_scores[(h, c)]:
                new_scores[(h, c)] = adj
                enter[h] = d
        elif h in in_cycle:
            if (c, d) not in new_scores or s > new_scores[(c, d)]:
                new_scores[(c, d)] = s
                leave[d] = h
        else:
            new_scores[(h, d)] = s

    if not any(d == c for (_, d) in new_scores):
        raise InfeasibleGraphError(min(cycle), "lies on a cycle that no outside node can reach")

    contracted = [v for v in nodes if v not in in_cycle] + [c]
    sub = _cle(contracted, new_scores, root)

    heads: dict[int, int] = {}
    for d, h in sub.items():
        if d == c:
            for v in cycle:
                heads[v] = best[v]
            heads[enter[h]] = h
        elif h == c:
            heads[d] = leave[d]
        else:
            heads[d] = h
    return heads


def cle_decode(g: WeightedArcGraph) -> dict[int, int]:
    """Maximum-weight spanning arborescence of ``g`` rooted at 0, as ``{dep: head}``.

    Weights are lifted to ``w * K - head * (n+1) ** (n - dep)`` with
    ``K = (n+1) ** n``.  The second term reads the head vector as a base-(n+1)
    number, so the lifted optimum is the max-weight tree with the
    lexicographically smallest head vector, and it is unique.
    """
    n = g.n
    if n == 0:
        return {}
    for d in range(1, n + 1):
        if not any(dd == d for (_, dd) in g.weight):
            raise InfeasibleGraphError(d)
    base = n + 1
    big = base**n
    scores = {(h, d): w * big - h * base ** (n - d) for (h, d), w in g.weight.items()}
    tree = _cle(list(range(n + 1)), scores, 0)
    return dict(sorted(tree.items()))


def brute_force_arborescences(g: WeightedArcGraph) -> dict[int, int]:
    """Exhaustive reference decoder for small graphs (n <= 8).

    Enumerates every head assignment over existing arcs and keeps the
    arborescence with maximum weight, breaking ties by the lexicographically
    smallest head vector.
    """
    n = g.n
    if n > MAX_BRUTE_FORCE_NODES:
        raise ValueError(f"brute force limited to n <= {MAX_BRUTE_FORCE_NODES}, got {n}")
    if n == 0:
        return {}
    options = []
    for d in range(1, n + 1):
        heads = g.incoming(d)
        if not heads:
            raise InfeasibleGraphError(d)
        options.append(heads)
    best_key = None
    best_tree = None
    for assignment in itertools.product(*options):
        tree = dict(zip(range(1, n + 1), assignment))
        if not is_arborescence(n, tree):
            continue
        key = (-g.tree_weight(tree), assignment)
        if best_key is None or key < best_key:
            best_key, best_tree = key, tree
    if best_tree is None:
        raise InfeasibleGraphError(1, "cannot be placed in any arborescence")
    return best_tree
