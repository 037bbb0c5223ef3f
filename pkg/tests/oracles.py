"""Independent reference implementations used only to cross-check the library.

Deliberately different algorithms from the package: union-find instead of
BFS, exhaustive path and assignment enumeration instead of DP or branch and
bound. Slow is fine here; these run on small instances.
"""

from __future__ import annotations

from itertools import product
from typing import Hashable, Iterable, Sequence


class UnionFind:
    """Disjoint sets over arbitrary hashable items, union by size."""

    def __init__(self, items: Iterable[Hashable]):
        self.parent = {item: item for item in items}
        self.size = {item: 1 for item in self.parent}

    def find(self, item: Hashable) -> Hashable:
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a: Hashable, b: Hashable) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


def union_find_partition(nodes: Iterable[Hashable],
                         edges: Iterable[tuple]) -> set[frozenset]:
    """Connected components as a set of frozensets."""
    uf = UnionFind(nodes)
    for a, b in edges:
        uf.union(a, b)
    groups: dict = {}
    for node in uf.parent:
        groups.setdefault(uf.find(node), set()).add(node)
    return {frozenset(members) for members in groups.values()}


def brute_force_longest_path(nodes: Iterable[Hashable],
                             edges: Iterable[tuple]) -> int:
    """Longest directed path in edges, by enumerating every simple path."""
    successors: dict = {node: set() for node in nodes}
    for a, b in edges:
        successors[a].add(b)

    def walk(node, on_path: set) -> int:
        best = 0
        for succ in successors[node]:
            if succ in on_path:
                continue  # guards against accidental cycles in test input
            on_path.add(succ)
            best = max(best, 1 + walk(succ, on_path))
            on_path.discard(succ)
        return best

    return max((walk(node, {node}) for node in successors), default=0)


def brute_force_makespan(sizes: Sequence[int], cores: int) -> int:
    """Minimum makespan over every core assignment. O(cores**len(sizes))."""
    if not sizes:
        return 0
    if len(sizes) > 10:
        raise ValueError("instance too large for full enumeration")
    best = sum(sizes)
    for assignment in product(range(cores), repeat=len(sizes)):
        loads = [0] * cores
        for size, core in zip(sizes, assignment):
            loads[core] += size
        best = min(best, max(loads))
    return best
