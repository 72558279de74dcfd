"""Reading and checking the three input tables and the alignment config.

Parsers raise on format violations (bad ids, ragged rows, duplicate node ids).
``validate_inputs`` never raises; it runs a fixed catalogue of checks and
returns a :class:`ValidationReport`.
"""

from __future__ import annotations

import csv
import enum
import heapq
import io
import os
from collections import defaultdict
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field, replace
from pathlib import Path as FsPath
from typing import IO, Any, Union

import yaml

from .errors import ConfigError, MalformedRow, MissingColumn, SelfEdge, DuplicateId
from .graphs import find_cycle
from .model import (
    AlignmentConfig,
    HierarchyEdge,
    Mapping,
    MappingTypeGroup,
    NodeRecord,
    NodeTable,
    normalize_relation,
    parse_concept_id,
    source_of,
)

Source = Union[str, os.PathLike, bytes, IO[str], IO[bytes]]

MAX_SAMPLES = 10


class Severity(str, enum.Enum):
    ERROR = "Error"
    WARNING = "Warning"


@dataclass(frozen=True)
class Finding:
    check_id: str
    severity: Severity
    count: int
    sample_rows: tuple[tuple[str, ...], ...] = ()
    message: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "check_id": self.check_id,
            "severity": self.severity.value,
            "count": self.count,
            "message": self.message,
            "sample_rows": [list(r) for r in self.sample_rows],
        }


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    def add(
        self,
        check_id: str,
        severity: Severity,
        rows: Iterable[Iterable[str]],
        message: str = "",
        count: int | None = None,
    ) -> None:
        """Record a finding; nothing is recorded when ``rows`` is empty.

        The sample holds the smallest rows so it does not depend on input order.
        """
        rows = [tuple(r) for r in rows]
        n = len(rows) if count is None else count
        if n == 0:
            return
        sample = heapq.nsmallest(MAX_SAMPLES, rows, key=lambda r: tuple(map(str, r)))
        self.findings.append(Finding(check_id, severity, n, tuple(sample), message))

    def extend(self, other: ValidationReport | Iterable[Finding]) -> None:
        self.findings.extend(other.findings if isinstance(other, ValidationReport) else other)

    @property
    def has_errors(self) -> bool:
        return any(f.severity is Severity.ERROR for f in self.findings)

    @property
    def has_warnings(self) -> bool:
        return any(f.severity is Severity.WARNING for f in self.findings)

    def by_check(self, check_id: str) -> Finding | None:
        return next((f for f in self.findings if f.check_id == check_id), None)

    def __iter__(self) -> Iterator[Finding]:
        return iter(self.findings)

    def __len__(self) -> int:
        return len(self.findings)


@dataclass(frozen=True)
class InputBundle:
    nodes: NodeTable
    mappings: tuple[Mapping, ...]
    hierarchy: tuple[HierarchyEdge, ...]
    config: AlignmentConfig
    parse_findings: tuple[Finding, ...] = ()
    validated: bool = False


# -- parsing -----------------------------------------------------------------


def _read_text(src: Source) -> str:
    if isinstance(src, bytes):
        return src.decode("utf-8-sig")
    if isinstance(src, (str, os.PathLike)):
        return FsPath(src).read_text(encoding="utf-8-sig")
    data = src.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    return data


def _rows(src: Source, required: list[str], delimiter: str) -> Iterator[tuple[int, dict[str, str]]]:
    reader = csv.reader(io.StringIO(_read_text(src), newline=""), delimiter=delimiter)
    header = None
    for row in reader:
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if header is None:
            header = [h.strip() for h in row]
            missing = [c for c in required if c not in header]
            if missing:
                raise MissingColumn(f"header lacks column(s) {missing}", reader.line_num)
            continue
        if len(row) != len(header):
            raise MalformedRow(f"expected {len(header)} columns, got {len(row)}", reader.line_num)
        yield reader.line_num, dict(zip(header, row))


_TRUE = {"true", "1", "t", "yes"}
_FALSE = {"false", "0", "f", "no", ""}


def _parse_bool(text: str, line: int) -> bool:
    v = text.strip().lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise MalformedRow(f"obsolete flag must be true/false/1/0, got {text!r}", line)


def parse_nodes(src: Source, delimiter: str = ",") -> NodeTable:
    """Parse a ``default_id[,obsolete]`` table."""
    records = []
    seen: set[str] = set()
    for line, row in _rows(src, ["default_id"], delimiter):
        cid = parse_concept_id(row["default_id"], line)
        if cid in seen:
            raise DuplicateId(f"duplicate concept id {cid!r}", line)
        seen.add(cid)
        obsolete = _parse_bool(row["obsolete"], line) if "obsolete" in row else False
        records.append(NodeRecord(cid, obsolete))
    return NodeTable(records)


def parse_mappings(
    src: Source, delimiter: str = ",", report: ValidationReport | None = None
) -> tuple[Mapping, ...]:
    """Parse ``source_id,target_id,relation[,provenance]`` rows.

    Row order is kept.  Exact duplicate rows and self-mappings are dropped;
    both are recorded as warnings in ``report`` when one is given.
    """
    out: dict[Mapping, None] = {}
    dupes, selfs = [], []
    for line, row in _rows(src, ["source_id", "target_id", "relation"], delimiter):
        m = Mapping(
            parse_concept_id(row["source_id"], line),
            parse_concept_id(row["target_id"], line),
            normalize_relation(row["relation"]),
            row.get("provenance", "").strip(),
        )
        if m.source == m.target:
            selfs.append(m)
        elif m in out:
            dupes.append(m)
        else:
            out[m] = None
    if report is not None:
        report.add("duplicate_mapping_rows", Severity.WARNING, dupes, "identical mapping rows collapsed")
        report.add("self_mapping", Severity.WARNING, selfs, "mappings from a concept to itself rejected")
    return tuple(out)


def parse_hierarchy(
    src: Source, delimiter: str = ",", report: ValidationReport | None = None
) -> tuple[HierarchyEdge, ...]:
    """Parse ``source_id,target_id`` rows where the source is the child."""
    out: dict[HierarchyEdge, None] = {}
    dupes = []
    for line, row in _rows(src, ["source_id", "target_id"], delimiter):
        e = HierarchyEdge(parse_concept_id(row["source_id"], line), parse_concept_id(row["target_id"], line))
        if e.child == e.parent:
            raise SelfEdge(f"hierarchy edge from {e.child!r} to itself", line)
        if e in out:
            dupes.append(e)
        else:
            out[e] = None
    if report is not None:
        report.add("duplicate_hierarchy_rows", Severity.WARNING, dupes, "identical hierarchy rows collapsed")
    return tuple(out)


def config_from_dict(data: dict[str, Any]) -> AlignmentConfig:
    """Build a config from ``seed``, ``sources`` and ``mapping_type_groups``.

    Groups may be written as ``{name: ..., relations: [...]}`` entries or as
    single-key ``{name: [...]}`` entries.
    """
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    try:
        seed = str(data["seed"]).strip()
        sources = [str(s).strip() for s in data["sources"]]
        raw_groups = data["mapping_type_groups"]
    except KeyError as exc:
        raise ConfigError(f"config is missing key {exc.args[0]!r}") from None
    groups = []
    for i, g in enumerate(raw_groups or []):
        if isinstance(g, dict) and "relations" in g:
            name, rels = str(g.get("name", f"group{i}")), g["relations"]
        elif isinstance(g, dict) and len(g) == 1:
            ((name, rels),) = g.items()
        else:
            raise ConfigError(f"cannot read mapping type group #{i}: {g!r}")
        if isinstance(rels, str):
            rels = [rels]
        groups.append(MappingTypeGroup(str(name), frozenset(str(r) for r in rels or [])))
    return AlignmentConfig(seed, tuple(sources), tuple(groups))


def parse_config(src: Source) -> AlignmentConfig:
    """Read a YAML (or JSON) alignment config."""
    try:
        data = yaml.safe_load(_read_text(src))
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML/JSON: {exc}") from None
    return config_from_dict(data)


def config_to_dict(config: AlignmentConfig) -> dict[str, Any]:
    return {
        "seed": config.seed,
        "sources": list(config.sources),
        "mapping_type_groups": [
            {"name": g.name, "relations": sorted(g.relations)} for g in config.mapping_type_groups
        ],
    }


def _find_table(input_dir: FsPath, stem: str) -> tuple[FsPath, str]:
    for suffix, delim in ((".csv", ","), (".tsv", "\t")):
        p = input_dir / f"{stem}{suffix}"
        if p.exists():
            return p, delim
    raise FileNotFoundError(f"{input_dir} has no {stem}.csv or {stem}.tsv")


def load_bundle(input_dir: str | os.PathLike, config_path: str | os.PathLike) -> InputBundle:
    """Parse ``nodes``, ``mappings`` and ``edges_hierarchy`` tables plus the config."""
    input_dir = FsPath(input_dir)
    report = ValidationReport()
    path, delim = _find_table(input_dir, "nodes")
    nodes = parse_nodes(path, delim)
    path, delim = _find_table(input_dir, "mappings")
    mappings = parse_mappings(path, delim, report)
    path, delim = _find_table(input_dir, "edges_hierarchy")
    hierarchy = parse_hierarchy(path, delim, report)
    config = parse_config(config_path)
    return InputBundle(nodes, mappings, hierarchy, config, tuple(report.findings))


# -- validation ---------------------------------------------------------------


def _hierarchy_by_source(edges: Iterable[HierarchyEdge]) -> dict[str, dict[str, list[str]]]:
    by_source: dict[str, dict[str, list[str]]] = defaultdict(lambda: defaultdict(list))
    for child, parent in edges:
        by_source[source_of(child)][child].append(parent)
    return by_source


def _dangling(bundle: InputBundle) -> tuple[list[Mapping], list[HierarchyEdge]]:
    nodes = bundle.nodes
    maps = [m for m in bundle.mappings if m.source not in nodes or m.target not in nodes]
    edges = [e for e in bundle.hierarchy if e.child not in nodes or e.parent not in nodes]
    return maps, edges


def _obsolete_edges(bundle: InputBundle) -> list[HierarchyEdge]:
    obsolete = bundle.nodes.obsolete
    return [e for e in bundle.hierarchy if e.child in obsolete or e.parent in obsolete]


def validate_inputs(bundle: InputBundle) -> ValidationReport:
    """Run the input check catalogue.

    ========  ========  ===================================================
    check     severity  condition
    ========  ========  ===================================================
    v1        Warning   mapping/hierarchy endpoint missing from the nodes
    v2        Error     id prefix not listed in ``config.sources``
    v3        Warning   mapping relation not in any mapping type group
    v4        Error     a per-source hierarchy contains a cycle
    v5        Error     a nonempty per-source hierarchy has no root
    v6        Warning   hierarchy edge touches an obsolete concept
    ========  ========  ===================================================

    Findings recorded while parsing come first.
    """
    report = ValidationReport(list(bundle.parse_findings))
    config = bundle.config

    maps, edges = _dangling(bundle)
    report.add(
        "v1",
        Severity.WARNING,
        [("mapping", *m) for m in maps] + [("hierarchy", *e) for e in edges],
        "rows referencing concepts absent from the node table (dropped)",
    )

    known = set(config.sources)
    unknown: dict[str, str] = {}
    ids = list(bundle.nodes.ids)
    ids += [c for m in bundle.mappings for c in (m.source, m.target)]
    ids += [c for e in bundle.hierarchy for c in e]
    for cid in ids:
        s = source_of(cid)
        if s not in known and s not in unknown:
            unknown[s] = cid
    report.add(
        "v2",
        Severity.ERROR,
        sorted(unknown.items()),
        "concept sources missing from the configured source list",
    )

    unusable = [m for m in bundle.mappings if config.group_index(m.relation) is None]
    report.add(
        "v3",
        Severity.WARNING,
        unusable,
        "mappings whose relation is in no mapping type group (unusable)",
    )

    cyclic, rootless = [], []
    for source, adj in sorted(_hierarchy_by_source(bundle.hierarchy).items()):
        cycle = find_cycle(adj)
        if cycle is not None:
            cyclic.append((source, " -> ".join(cycle)))
        members = set(adj) | {p for ps in adj.values() for p in ps}
        if adj and not any(n not in adj for n in members):
            rootless.append((source,))
    report.add("v4", Severity.ERROR, cyclic, "per-source hierarchies containing a cycle")
    report.add("v5", Severity.ERROR, rootless, "per-source hierarchies without a root")

    report.add(
        "v6",
        Severity.WARNING,
        _obsolete_edges(bundle),
        "hierarchy edges touching obsolete concepts (dropped)",
    )
    return report


def drop_flagged_rows(bundle: InputBundle) -> InputBundle:
    """Remove rows flagged by v1 and v6 and mark the bundle validated."""
    maps, edges = _dangling(bundle)
    bad_edges = set(edges) | set(_obsolete_edges(bundle))
    bad_maps = set(maps)
    return replace(
        bundle,
        mappings=tuple(m for m in bundle.mappings if m not in bad_maps),
        hierarchy=tuple(e for e in bundle.hierarchy if e not in bad_edges),
        validated=True,
    )
