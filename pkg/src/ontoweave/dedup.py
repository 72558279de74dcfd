"""Concept deduplication.

The pipeline resolves obsolete renamings first, then aligns the remaining
concepts to higher priority sources one mapping type group at a time, and
finally collapses every merge cluster onto a single canonical concept.
"""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Collection, Iterable, Sequence
from dataclasses import dataclass, field
from typing import TypeVar, overload

from .graphs import UnionFind
from .ingest import InputBundle, Severity, ValidationReport
from .model import (
    AlignmentConfig,
    ConceptId,
    HierarchyEdge,
    Mapping,
    Merge,
    NodeRecord,
    NodeTable,
    SourceId,
    merge_map,
    source_of,
)

T = TypeVar("T", Mapping, HierarchyEdge)


@dataclass(frozen=True)
class AlignmentStep:
    """Counters for one (group, source) iteration of the alignment loop.

    ``mappings_considered`` counts mappings of the group touching the source
    whose other endpoint was still unmerged when the iteration started.
    """

    round_index: int
    step_index: int
    group_name: str
    source: SourceId
    mappings_considered: int
    merges_produced: int
    dropped_multi_target: int


@dataclass(frozen=True)
class DedupResult:
    domain_concepts: NodeTable
    unmerged: frozenset[ConceptId]
    canonical_merges: tuple[Merge, ...]
    domain_mappings: tuple[Mapping, ...]
    steps: tuple[AlignmentStep, ...]
    obsolete_merges: tuple[Merge, ...]
    internal_mappings: tuple[Mapping, ...] = ()
    report: ValidationReport = field(default_factory=ValidationReport)

    @property
    def all_merges(self) -> tuple[Merge, ...]:
        return tuple(sorted(self.canonical_merges + self.obsolete_merges))


def compute_obsolete_merges(
    mappings: Iterable[Mapping],
    obsolete: Collection[ConceptId],
    relations: Collection[str] | None = None,
    report: ValidationReport | None = None,
) -> tuple[tuple[Merge, ...], tuple[Mapping, ...]]:
    """Merges from obsolete ids to their current replacements.

    Returns ``(obsolete_merges, internal_mappings)``.  Internal mappings are
    the within-source mappings whose relation is in ``relations`` (any
    relation when None).  Each internal mapping is read as a renaming from its
    obsolete end to its other end; between two obsolete ids the written
    direction is kept.  Renamings are followed through obsolete ids until a
    current id is reached.  Obsolete ids reaching more than one current id, or
    reaching a renaming cycle, get no merge and are reported.
    """
    obsolete = frozenset(obsolete)
    internal = tuple(
        m
        for m in mappings
        if source_of(m.source) == source_of(m.target)
        and (relations is None or m.relation in relations)
    )

    renamed_to: dict[ConceptId, set[ConceptId]] = defaultdict(set)
    for m in internal:
        a_obs, b_obs = m.source in obsolete, m.target in obsolete
        if a_obs:
            renamed_to[m.source].add(m.target)
        elif b_obs:
            renamed_to[m.target].add(m.source)

    resolved: dict[ConceptId, frozenset[ConceptId] | None] = {}
    tainted: set[ConceptId] = set()
    on_stack: set[ConceptId] = set()
    for start in sorted(renamed_to):
        if start in resolved:
            continue
        stack = [(start, iter(sorted(renamed_to[start])))]
        on_stack.add(start)
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                on_stack.discard(node)
                if node in tainted:
                    resolved[node] = None
                    continue
                acc: set[ConceptId] = set()
                for t in renamed_to[node]:
                    if t not in obsolete:
                        acc.add(t)
                    elif resolved.get(t, frozenset()) is None:
                        acc = None
                        break
                    else:
                        acc |= resolved.get(t, frozenset())
                resolved[node] = None if acc is None else frozenset(acc)
                continue
            if nxt not in obsolete or nxt in resolved:
                continue
            if nxt in on_stack:
                idx = next(i for i, (n, _) in enumerate(stack) if n == nxt)
                tainted.update(n for n, _ in stack[idx:])
                continue
            on_stack.add(nxt)
            stack.append((nxt, iter(sorted(renamed_to.get(nxt, ())))))

    merges, ambiguous, cyclic = [], [], []
    for c in sorted(resolved):
        targets = resolved[c]
        if targets is None:
            cyclic.append((c,))
        elif len(targets) == 1:
            merges.append(Merge(c, next(iter(targets))))
        elif len(targets) > 1:
            ambiguous.append((c, " | ".join(sorted(targets))))
    if report is not None:
        report.add(
            "obsolete_cycle",
            Severity.WARNING,
            cyclic,
            "obsolete ids whose renaming chain runs into a cycle (merges skipped)",
        )
        report.add(
            "obsolete_ambiguous",
            Severity.WARNING,
            ambiguous,
            "obsolete ids renamed to more than one current id (merges skipped)",
        )
    return tuple(merges), internal


def _rewrite(items: Iterable[T], table: dict[ConceptId, ConceptId]) -> tuple[T, ...]:
    out: dict[T, None] = {}
    for item in items:
        a, b = item[0], item[1]
        a, b = table.get(a, a), table.get(b, b)
        if a == b:
            continue
        out[type(item)(a, b, *item[2:])] = None
    return tuple(out)


def update_mappings(mappings: Iterable[Mapping], merges: Iterable[Merge]) -> tuple[Mapping, ...]:
    """Rewrite mapping endpoints through ``merges``.

    Mappings that become self-mappings are dropped and duplicates collapse to
    their first occurrence.
    """
    return _rewrite(mappings, merge_map(merges))


@overload
def apply_merges(table: NodeTable, merges: Iterable[Merge]) -> NodeTable: ...
@overload
def apply_merges(table: Iterable[T], merges: Iterable[Merge]) -> tuple[T, ...]: ...


def apply_merges(table, merges):
    """Replace every merged concept by its merge target.

    On a :class:`NodeTable` merged ids disappear and each target is kept once.
    On mapping or hierarchy edge sets, triples that become reflexive are
    dropped and duplicates collapse.
    """
    mm = merge_map(merges)
    if isinstance(table, NodeTable):
        seen: dict[ConceptId, bool] = {}
        for cid, obsolete in table:
            new = mm.get(cid, cid)
            if new not in seen:
                seen[new] = obsolete if new == cid else False
        return NodeTable(NodeRecord(c, o) for c, o in seen.items())
    if not mm:
        return tuple(dict.fromkeys(table))
    return _rewrite(table, mm)


def _index_mappings(
    mappings: Iterable[Mapping], config: AlignmentConfig, current: Collection[ConceptId]
) -> dict[tuple[int, SourceId], list[Mapping]]:
    index: dict[tuple[int, SourceId], list[Mapping]] = defaultdict(list)
    for m in mappings:
        g = config.group_index(m.relation)
        if g is None or m.source not in current or m.target not in current:
            continue
        a, b = source_of(m.source), source_of(m.target)
        if a == b:
            continue
        index[(g, a)].append(m)
        index[(g, b)].append(m)
    return index


def compute_merges(
    concepts: NodeTable | Collection[ConceptId],
    updated_mappings: Iterable[Mapping],
    config: AlignmentConfig,
    round_index: int = 0,
) -> tuple[list[Merge], list[AlignmentStep]]:
    """Align unmerged concepts to each source, group by group.

    For every mapping type group (outer loop) and source in priority order
    (inner loop), mappings of the group with one endpoint in the source are
    oriented towards that endpoint.  An unmerged concept on the other end is
    merged when it points to exactly one concept of the source in this
    iteration; concepts pointing to several are held back and stay eligible
    for later iterations.  Seed concepts are never merged away.  Mappings
    within a single source and mappings touching ids outside ``concepts``
    (or obsolete ones) take no part.

    The merges may still form chains across iterations; pass them through
    :func:`aggregate_merges` to obtain a stable set.
    """
    current = concepts.current if isinstance(concepts, NodeTable) else frozenset(concepts)
    seed_prefix = config.seed + ":"
    unmerged = {c for c in current if not c.startswith(seed_prefix)}
    index = _index_mappings(updated_mappings, config, current)

    merges: list[Merge] = []
    steps: list[AlignmentStep] = []
    for gi, group in enumerate(config.mapping_type_groups):
        for source in config.sources:
            oriented: dict[ConceptId, set[ConceptId]] = defaultdict(set)
            considered = 0
            for m in index.get((gi, source), ()):
                if source_of(m.source) == source:
                    target, other = m.source, m.target
                else:
                    target, other = m.target, m.source
                if other not in unmerged:
                    continue
                considered += 1
                oriented[other].add(target)
            produced = 0
            held_back = 0
            for c in sorted(oriented):
                targets = oriented[c]
                if len(targets) == 1:
                    merges.append(Merge(c, next(iter(targets))))
                    unmerged.discard(c)
                    produced += 1
                else:
                    held_back += 1
            steps.append(
                AlignmentStep(
                    round_index, len(steps), group.name, source, considered, produced, held_back
                )
            )
    return merges, steps


def aggregate_merges(
    merges: Iterable[Merge],
    sources: Sequence[SourceId],
    report: ValidationReport | None = None,
) -> tuple[Merge, ...]:
    """Collapse merge clusters onto their canonical concept.

    Clusters are the weakly connected components of the merge graph.  The
    canonical concept is the member from the highest priority source, ties
    going to the smallest id.  A cluster holding several concepts of
    ``sources[0]`` (the seed) keeps them all: only its non-seed members are
    merged, onto the smallest seed member, and the cluster is reported.
    """
    rank = {s: i for i, s in enumerate(sources)}
    last = len(sources)
    seed = sources[0] if sources else None
    uf = UnionFind()
    for m in merges:
        uf.union(m.source, m.target)

    out: list[Merge] = []
    multi_seed = []
    for members in uf.groups():
        seeds = sorted(c for c in members if source_of(c) == seed)
        if len(seeds) > 1:
            canonical = seeds[0]
            multi_seed.append((canonical, " | ".join(seeds[1:])))
            out.extend(Merge(c, canonical) for c in members if source_of(c) != seed)
            continue
        canonical = min(members, key=lambda c: (rank.get(source_of(c), last), c))
        out.extend(Merge(c, canonical) for c in members if c != canonical)
    if report is not None:
        report.add(
            "multiple_seed_currents",
            Severity.WARNING,
            sorted(multi_seed),
            "merge clusters containing several seed concepts",
        )
    return tuple(sorted(out))


def deduplicate(bundle: InputBundle, until_stable: bool = True) -> DedupResult:
    """Run the full deduplication stage on a validated bundle.

    With ``until_stable`` the alignment is repeated on the rewritten concepts
    and mappings until a round produces no merge, so that deduplicating the
    output again yields nothing.  ``until_stable=False`` runs a single round.
    """
    config = bundle.config
    nodes = bundle.nodes
    report = ValidationReport()

    obsolete_raw, internal = compute_obsolete_merges(
        bundle.mappings, nodes.obsolete, config.equivalence_relations, report
    )
    internal_set = set(internal)
    remaining = update_mappings((m for m in bundle.mappings if m not in internal_set), obsolete_raw)

    current = nodes.only_current()
    aligned: list[Merge] = []
    steps: list[AlignmentStep] = []
    concepts, mappings = current, remaining
    round_index = 0
    while True:
        new, round_steps = compute_merges(concepts, mappings, config, round_index)
        steps.extend(round_steps)
        if not new:
            break
        aligned.extend(new)
        if not until_stable:
            break
        canonical = aggregate_merges(aligned, config.sources)
        concepts = apply_merges(current, canonical)
        mappings = apply_merges(remaining, canonical)
        round_index += 1

    canonical = aggregate_merges(aligned, config.sources, report)
    target_of = merge_map(canonical)
    obsolete_merges = tuple(sorted(Merge(o, target_of.get(t, t)) for o, t in obsolete_raw))

    domain = apply_merges(current, canonical)
    domain_mappings = tuple(
        m for m in apply_merges(remaining, canonical) if m.source in domain and m.target in domain
    )
    renamed = {m.source for m in obsolete_raw}
    report.add(
        "obsolete_unresolved",
        Severity.WARNING,
        [(c,) for c in sorted(nodes.obsolete - renamed)],
        "obsolete concepts without a usable renaming (excluded from the domain)",
    )
    obsolete = nodes.obsolete
    report.add(
        "internal_equivalences",
        Severity.WARNING,
        [m for m in internal if m.source not in obsolete and m.target not in obsolete],
        "within-source equivalences between current concepts (not merged)",
    )
    return DedupResult(
        domain_concepts=domain,
        unmerged=frozenset(domain.ids),
        canonical_merges=canonical,
        domain_mappings=domain_mappings,
        steps=tuple(steps),
        obsolete_merges=obsolete_merges,
        internal_mappings=internal,
        report=report,
    )
