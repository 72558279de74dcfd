"""Triple algebra shared by every pipeline stage.

Concept ids are plain ``str`` values of the form ``SOURCE:LOCAL``.  Mappings,
hierarchy edges and merges are small named tuples so that sets of them hash,
sort and compare cheaply; every table is immutable once built.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Iterator, Mapping as MappingABC
from dataclasses import dataclass, field
from typing import NamedTuple, Union

from .errors import (
    BadConceptId,
    DuplicateId,
    DuplicateSource,
    EmptyGroup,
    OverlappingGroups,
    SeedNotFirst,
)

ConceptId = str
SourceId = str


def source_of(concept: ConceptId) -> SourceId:
    """Namespace prefix of a concept id (text before the first colon)."""
    return concept.partition(":")[0]


def parse_concept_id(text: str, line: int | None = None) -> ConceptId:
    """Trim and check a raw concept id.

    >>> parse_concept_id("  MONDO:0004979 ")
    'MONDO:0004979'
    """
    cid = text.strip()
    source, sep, local = cid.partition(":")
    if not sep or not source or not local:
        raise BadConceptId(f"not a SOURCE:LOCAL concept id: {text!r}", line)
    return cid


def normalize_relation(tag: str) -> str:
    # ASCII-only lowercasing keeps group membership locale independent.
    return tag.strip().translate(_ASCII_LOWER)


_ASCII_LOWER = str.maketrans("ABCDEFGHIJKLMNOPQRSTUVWXYZ", "abcdefghijklmnopqrstuvwxyz")


class Mapping(NamedTuple):
    source: ConceptId
    target: ConceptId
    relation: str
    provenance: str = ""


class HierarchyEdge(NamedTuple):
    """``child`` is subsumed by ``parent``."""

    child: ConceptId
    parent: ConceptId


class Merge(NamedTuple):
    """``source`` is replaced by ``target`` wherever it occurs."""

    source: ConceptId
    target: ConceptId


class Path(tuple):
    """Concepts from a start concept up to a root, following child->parent edges."""

    __slots__ = ()

    def __repr__(self) -> str:
        return f"Path({list(self)!r})"


class Side(enum.Enum):
    SOURCE = "source"
    TARGET = "target"
    BOTH = "both"


Triple = Union[Mapping, HierarchyEdge, Merge]


def sig(items: Iterable[Triple | Path], side: Side = Side.BOTH) -> set[ConceptId]:
    """Concept names occurring in ``items`` at the requested position(s).

    Hierarchy edges count the child as source and the parent as target.
    Paths contribute every member regardless of ``side``.
    """
    out: set[ConceptId] = set()
    for item in items:
        if isinstance(item, Path):
            out.update(item)
            continue
        if side is not Side.TARGET:
            out.add(item[0])
        if side is not Side.SOURCE:
            out.add(item[1])
    return out


class NodeRecord(NamedTuple):
    id: ConceptId
    obsolete: bool = False


class NodeTable:
    """Ordered, duplicate-free concept table with obsolescence flags."""

    __slots__ = ("_flags", "_current", "_obsolete")

    def __init__(self, records: Iterable[NodeRecord | tuple[str, bool]] = ()):
        flags: dict[ConceptId, bool] = {}
        for cid, obsolete in records:
            if cid in flags:
                raise DuplicateId(f"duplicate concept id {cid!r}")
            flags[cid] = bool(obsolete)
        self._flags = flags
        self._current: frozenset[ConceptId] | None = None
        self._obsolete: frozenset[ConceptId] | None = None

    @classmethod
    def from_ids(cls, ids: Iterable[ConceptId], obsolete: Iterable[ConceptId] = ()) -> NodeTable:
        obs = set(obsolete)
        return cls(NodeRecord(c, c in obs) for c in ids)

    def __iter__(self) -> Iterator[NodeRecord]:
        return (NodeRecord(c, o) for c, o in self._flags.items())

    def __len__(self) -> int:
        return len(self._flags)

    def __contains__(self, cid: object) -> bool:
        return cid in self._flags

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NodeTable):
            return NotImplemented
        return list(self._flags.items()) == list(other._flags.items())

    def __repr__(self) -> str:
        return f"NodeTable({list(self)!r})"

    @property
    def ids(self) -> tuple[ConceptId, ...]:
        return tuple(self._flags)

    @property
    def current(self) -> frozenset[ConceptId]:
        if self._current is None:
            self._current = frozenset(c for c, o in self._flags.items() if not o)
        return self._current

    @property
    def obsolete(self) -> frozenset[ConceptId]:
        if self._obsolete is None:
            self._obsolete = frozenset(c for c, o in self._flags.items() if o)
        return self._obsolete

    def is_obsolete(self, cid: ConceptId) -> bool:
        return self._flags[cid]

    def only_current(self) -> NodeTable:
        return NodeTable(r for r in self if not r.obsolete)


def get_concepts(nodes: NodeTable | Iterable[ConceptId], source: SourceId) -> set[ConceptId]:
    """All concept ids whose namespace prefix is ``source``."""
    ids = nodes.ids if isinstance(nodes, NodeTable) else nodes
    prefix = source + ":"
    return {c for c in ids if c.startswith(prefix)}


def is_stable(merges: Iterable[Merge]) -> bool:
    """True when every concept is in at most one merge, and only as its source.

    Several merges may share a target as long as that target is never itself
    merged away.
    """
    merges = list(merges)
    sources: set[ConceptId] = set()
    for m in merges:
        if m.source == m.target or m.source in sources:
            return False
        sources.add(m.source)
    return all(m.target not in sources for m in merges)


def merge_map(merges: Iterable[Merge]) -> dict[ConceptId, ConceptId]:
    return {m.source: m.target for m in merges}


@dataclass(frozen=True)
class MappingTypeGroup:
    name: str
    relations: frozenset[str]


@dataclass(frozen=True)
class AlignmentConfig:
    """Seed ontology, source priority order and ordered relation groups.

    ``sources[0]`` is the seed and has the highest priority.
    """

    seed: SourceId
    sources: tuple[SourceId, ...]
    mapping_type_groups: tuple[MappingTypeGroup, ...]
    _priority: dict[SourceId, int] = field(init=False, repr=False, compare=False)
    _group_of: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        sources = tuple(self.sources)
        if len(set(sources)) != len(sources):
            dupes = sorted({s for s in sources if sources.count(s) > 1})
            raise DuplicateSource(f"sources listed more than once: {dupes}")
        if not sources or sources[0] != self.seed:
            raise SeedNotFirst(f"seed {self.seed!r} must be the first source, got {list(sources)}")
        groups = []
        group_of: dict[str, int] = {}
        for i, g in enumerate(self.mapping_type_groups):
            rels = frozenset(normalize_relation(r) for r in g.relations)
            if not rels:
                raise EmptyGroup(f"mapping type group {g.name!r} has no relations")
            for r in sorted(rels):
                if r in group_of:
                    other = groups[group_of[r]].name
                    raise OverlappingGroups(f"relation {r!r} is in groups {other!r} and {g.name!r}")
                group_of[r] = i
            groups.append(MappingTypeGroup(g.name, rels))
        object.__setattr__(self, "sources", sources)
        object.__setattr__(self, "mapping_type_groups", tuple(groups))
        object.__setattr__(self, "_priority", {s: i for i, s in enumerate(sources)})
        object.__setattr__(self, "_group_of", group_of)

    @classmethod
    def build(
        cls,
        seed: SourceId,
        sources: Iterable[SourceId],
        groups: MappingABC[str, Iterable[str]] | Iterable[tuple[str, Iterable[str]]],
    ) -> AlignmentConfig:
        items = groups.items() if isinstance(groups, MappingABC) else groups
        return cls(
            seed,
            tuple(sources),
            tuple(MappingTypeGroup(name, frozenset(rels)) for name, rels in items),
        )

    def priority(self, source: SourceId) -> int:
        """Rank of ``source``; 0 is the seed, unknown sources rank last."""
        return self._priority.get(source, len(self.sources))

    def group_index(self, relation: str) -> int | None:
        return self._group_of.get(normalize_relation(relation))

    @property
    def equivalence_relations(self) -> frozenset[str]:
        """Relations of the first group, used for obsolete renamings."""
        if not self.mapping_type_groups:
            return frozenset()
        return self.mapping_type_groups[0].relations
