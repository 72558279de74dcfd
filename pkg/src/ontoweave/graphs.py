"""Small graph helpers over ``{node: [successors]}`` adjacency dicts."""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Mapping
from typing import TypeVar

N = TypeVar("N", bound=Hashable)


def find_cycle(adjacency: Mapping[N, Iterable[N]]) -> list[N] | None:
    """Return one directed cycle as ``[a, b, ..., a]`` or None if acyclic.

    Nodes and successors are visited in sorted order so the witness is
    deterministic.  Iterative, so deep hierarchies do not hit the recursion
    limit.
    """
    WHITE, GREY, BLACK = 0, 1, 2
    color: dict[N, int] = {}
    succ = {n: sorted(vs) for n, vs in adjacency.items()}
    for start in sorted(succ):
        if color.get(start, WHITE) != WHITE:
            continue
        stack: list[tuple[N, int]] = [(start, 0)]
        trail: list[N] = [start]
        color[start] = GREY
        while stack:
            node, i = stack[-1]
            children = succ.get(node, ())
            if i == len(children):
                stack.pop()
                trail.pop()
                color[node] = BLACK
                continue
            stack[-1] = (node, i + 1)
            nxt = children[i]
            state = color.get(nxt, WHITE)
            if state == GREY:
                return trail[trail.index(nxt):] + [nxt]
            if state == WHITE:
                color[nxt] = GREY
                stack.append((nxt, 0))
                trail.append(nxt)
    return None


class UnionFind:
    """Disjoint sets with path halving and union by size."""

    def __init__(self, items: Iterable[Hashable] = ()):
        self.parent: dict = {}
        self.size: dict = {}
        for x in items:
            self.add(x)

    def add(self, x) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x):
        self.add(x)
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def groups(self) -> list[list]:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


def count_weak_components(edges: Iterable[tuple[Hashable, Hashable]]) -> int:
    """Number of weakly connected components spanned by ``edges``."""
    uf = UnionFind()
    for a, b in edges:
        uf.union(a, b)
    return sum(1 for x in uf.parent if uf.parent[x] == x)
