"""Assemble unmerged concepts into one seed-rooted hierarchy.

The seed hierarchy is taken as is.  Every other unmerged concept is attached
through its shortest path to a root of its own source hierarchy: the path is
cut at the first concept already in the domain hierarchy (an anchor) and
intermediate concepts that are not unmerged members of the same source are
dropped.
"""

from __future__ import annotations

from collections import defaultdict, deque
from collections.abc import Collection, Iterable
from dataclasses import dataclass, field
from functools import cached_property

from .errors import CyclicSource, NoAnchorOnPath
from .graphs import find_cycle
from .ingest import Severity, ValidationReport
from .model import (
    AlignmentConfig,
    ConceptId,
    HierarchyEdge,
    Merge,
    Path,
    SourceId,
    sig,
    source_of,
)
from .dedup import apply_merges


@dataclass(frozen=True)
class SourceHierarchyGraph:
    """Child -> parents adjacency of one source's hierarchy fragment."""

    source: SourceId
    parents: dict[ConceptId, tuple[ConceptId, ...]]

    @cached_property
    def nodes(self) -> frozenset[ConceptId]:
        return frozenset(self.parents) | frozenset(p for ps in self.parents.values() for p in ps)

    @cached_property
    def roots(self) -> frozenset[ConceptId]:
        """Nodes without parents; parents from other sources are roots too."""
        return frozenset(n for n in self.nodes if not self.parents.get(n))

    @cached_property
    def depth(self) -> dict[ConceptId, int]:
        """Edge count of the shortest path from each node to any root."""
        children: dict[ConceptId, list[ConceptId]] = defaultdict(list)
        for child, ps in self.parents.items():
            for p in ps:
                children[p].append(child)
        dist = {r: 0 for r in self.roots}
        queue = deque(sorted(self.roots))
        while queue:
            node = queue.popleft()
            d = dist[node] + 1
            for c in children.get(node, ()):
                if c not in dist:
                    dist[c] = d
                    queue.append(c)
        return dist

    @property
    def edges(self) -> tuple[HierarchyEdge, ...]:
        return tuple(HierarchyEdge(c, p) for c, ps in self.parents.items() for p in ps)


@dataclass(frozen=True)
class Attachment:
    """One concept joined to the domain hierarchy.

    Path lengths count edges, so a path of a root to itself has length 0.
    """

    concept: ConceptId
    anchor: ConceptId
    original_path_length: int
    pruned_path_length: int


@dataclass(frozen=True)
class ConnectivityResult:
    domain_hierarchy: tuple[HierarchyEdge, ...]
    connected: frozenset[ConceptId]
    disconnected: frozenset[ConceptId]
    attachments: tuple[Attachment, ...]
    report: ValidationReport = field(default_factory=ValidationReport)


def _graph(source: SourceId, edges: Iterable[HierarchyEdge]) -> SourceHierarchyGraph:
    parents: dict[ConceptId, set[ConceptId]] = defaultdict(set)
    for child, parent in edges:
        parents[child].add(parent)
    return SourceHierarchyGraph(source, {c: tuple(sorted(ps)) for c, ps in parents.items()})


def get_hierarchy(
    source: SourceId,
    edges: Iterable[HierarchyEdge],
    merges: Iterable[Merge] | None = None,
) -> SourceHierarchyGraph:
    """Hierarchy fragment made of the edges whose child belongs to ``source``.

    The fragment is checked for cycles before ``merges`` (if any) rewrite its
    concepts; the rewritten graph can merge two ids of a path into one, and
    path search copes with that.
    """
    prefix = source + ":"
    own = [e for e in edges if e.child.startswith(prefix)]
    graph = _graph(source, own)
    cycle = find_cycle(graph.parents)
    if cycle is not None:
        raise CyclicSource(source, cycle)
    if merges:
        graph = _graph(source, apply_merges(own, merges))
    return graph


def shortest_path_to_root(concept: ConceptId, graph: SourceHierarchyGraph) -> Path | None:
    """Shortest child->parent path from ``concept`` to a root of ``graph``.

    Among paths of equal length the lexicographically smallest sequence of
    ids wins.  None when the concept is not in the graph.
    """
    depth = graph.depth
    if concept not in depth:
        return None
    path = [concept]
    node = concept
    while depth[node]:
        want = depth[node] - 1
        node = min(p for p in graph.parents[node] if depth.get(p) == want)
        path.append(node)
    return Path(path)


def prune_path(path: Path, keep: Collection[ConceptId], anchors: Collection[ConceptId]) -> Path:
    """Cut ``path`` after its first anchor and drop interior ids not in ``keep``."""
    for i in range(1, len(path)):
        if path[i] in anchors:
            interior = [c for c in path[1:i] if c in keep]
            return Path([path[0], *interior, path[i]])
    raise NoAnchorOnPath(f"no anchor on path from {path[0]!r}")


def convert_to_edges(path: Path) -> tuple[HierarchyEdge, ...]:
    if len(path) < 2:
        raise ValueError("a path needs at least two concepts to form an edge")
    return tuple(HierarchyEdge(a, b) for a, b in zip(path, path[1:]))


def verify_dag(edges: Iterable[HierarchyEdge]) -> tuple[bool, list[ConceptId] | None]:
    """``(True, None)`` for an acyclic edge set, else ``(False, cycle)``."""
    adj: dict[ConceptId, list[ConceptId]] = defaultdict(list)
    for child, parent in edges:
        adj[child].append(parent)
    cycle = find_cycle(adj)
    return cycle is None, cycle


def _reaches(adj: dict[ConceptId, set[ConceptId]], start: ConceptId, goal: ConceptId) -> bool:
    seen = {start}
    stack = [start]
    while stack:
        node = stack.pop()
        if node == goal:
            return True
        for nxt in adj.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return False


def _seed_hierarchy(
    seed: SourceId, edges: Iterable[HierarchyEdge], merges: Iterable[Merge], report: ValidationReport
) -> list[HierarchyEdge]:
    prefix = seed + ":"
    own = [e for e in edges if e.child.startswith(prefix)]
    cycle = find_cycle(_graph(seed, own).parents)
    if cycle is not None:
        raise CyclicSource(seed, cycle)
    rewritten = list(apply_merges(own, merges))
    if verify_dag(rewritten)[0]:
        return rewritten
    # Merges folded a cross-source parent into a seed concept and closed a
    # loop.  Keep seed-internal edges first, then add the rest in sorted order
    # unless they close a cycle.
    ordered = sorted(rewritten, key=lambda e: (not e.parent.startswith(prefix), e))
    adj: dict[ConceptId, set[ConceptId]] = defaultdict(set)
    kept, dropped = [], []
    for e in ordered:
        if _reaches(adj, e.parent, e.child):
            dropped.append(e)
            continue
        adj[e.child].add(e.parent)
        kept.append(e)
    report.add(
        "seed_cycle_edges",
        Severity.WARNING,
        dropped,
        "seed hierarchy edges dropped because merging turned them into a cycle",
    )
    return kept


def connect_concepts(
    unmerged: Iterable[ConceptId],
    hierarchy: Iterable[HierarchyEdge],
    canonical_merges: Iterable[Merge],
    config: AlignmentConfig,
) -> ConnectivityResult:
    """Grow the domain hierarchy from the seed hierarchy.

    Sources are visited in priority order and their unmerged concepts in id
    order; each attachment can serve as an anchor for the next one.  Path
    search runs on hierarchy edges rewritten through ``canonical_merges``.
    Unmerged concepts without a path reaching an anchor, including seed
    concepts outside the seed hierarchy, end up in ``disconnected``.
    """
    hierarchy = tuple(hierarchy)
    merges = tuple(canonical_merges)
    seed = config.seed
    report = ValidationReport()

    domain = _seed_hierarchy(seed, hierarchy, merges, report)
    connected = sig(domain)
    for m in merges:
        if source_of(m.target) == seed:
            connected.add(m.source)
            connected.add(m.target)

    unmerged = set(unmerged)
    by_source: dict[SourceId, set[ConceptId]] = defaultdict(set)
    for c in unmerged:
        by_source[source_of(c)].add(c)

    attachments = []
    for source in config.sources:
        if source == seed:
            continue
        keep = by_source.get(source, set())
        todo = sorted(c for c in keep if c not in connected)
        if not todo:
            continue
        graph = get_hierarchy(source, hierarchy, merges)
        for c in todo:
            if c in connected:
                continue
            path = shortest_path_to_root(c, graph)
            if path is None:
                continue
            try:
                pruned = prune_path(path, keep, connected)
            except NoAnchorOnPath:
                continue
            domain.extend(convert_to_edges(pruned))
            connected.update(pruned)
            attachments.append(Attachment(c, pruned[-1], len(path) - 1, len(pruned) - 1))

    return ConnectivityResult(
        domain_hierarchy=tuple(sorted(set(domain))),
        connected=frozenset(connected),
        disconnected=frozenset(unmerged - connected),
        attachments=tuple(attachments),
        report=report,
    )
