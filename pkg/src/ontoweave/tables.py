"""Row views of domain objects and canonical CSV writing.

Every emitted table is sorted by all of its columns, left to right, so that
identical results always serialize to identical bytes.
"""

from __future__ import annotations

import csv
import io
import os
from collections.abc import Iterable
from dataclasses import astuple
from pathlib import Path as FsPath
from typing import Any

from .connect import Attachment, ConnectivityResult
from .dedup import AlignmentStep, DedupResult
from .ingest import InputBundle
from .model import HierarchyEdge, Mapping, Merge, NodeTable

Table = tuple[tuple[str, ...], list[tuple[Any, ...]]]

NODE_COLUMNS = ("default_id", "obsolete")
MAPPING_COLUMNS = ("source_id", "target_id", "relation", "provenance")
EDGE_COLUMNS = ("source_id", "target_id")
MERGE_COLUMNS = ("source_id", "target_id")
STEP_COLUMNS = (
    "round_index",
    "step_index",
    "group_name",
    "source",
    "mappings_considered",
    "merges_produced",
    "dropped_multi_target",
)
ATTACHMENT_COLUMNS = ("concept", "anchor", "original_path_length", "pruned_path_length")

OUTPUT_FILES = (
    "merges.csv",
    "merges_obsolete.csv",
    "nodes_domain.csv",
    "nodes_unmapped.csv",
    "mappings_domain.csv",
    "alignment_steps.csv",
    "edges_hierarchy_domain.csv",
    "connectivity_attachments.csv",
)


def nodes_table(nodes: NodeTable) -> Table:
    return NODE_COLUMNS, sorted((r.id, "true" if r.obsolete else "false") for r in nodes)


def mappings_table(mappings: Iterable[Mapping]) -> Table:
    return MAPPING_COLUMNS, sorted(tuple(m) for m in mappings)


def hierarchy_table(edges: Iterable[HierarchyEdge]) -> Table:
    return EDGE_COLUMNS, sorted(tuple(e) for e in edges)


def merges_table(merges: Iterable[Merge]) -> Table:
    return MERGE_COLUMNS, sorted(tuple(m) for m in merges)


def steps_table(steps: Iterable[AlignmentStep]) -> Table:
    return STEP_COLUMNS, sorted(astuple(s) for s in steps)


def attachments_table(attachments: Iterable[Attachment]) -> Table:
    return ATTACHMENT_COLUMNS, sorted(astuple(a) for a in attachments)


def input_tables(bundle: InputBundle) -> dict[str, Table]:
    return {
        "nodes.csv": nodes_table(bundle.nodes),
        "mappings.csv": mappings_table(bundle.mappings),
        "edges_hierarchy.csv": hierarchy_table(bundle.hierarchy),
    }


def output_tables(dedup: DedupResult, conn: ConnectivityResult) -> dict[str, Table]:
    tables = {
        "merges.csv": merges_table(dedup.canonical_merges),
        "merges_obsolete.csv": merges_table(dedup.obsolete_merges),
        "nodes_domain.csv": nodes_table(dedup.domain_concepts),
        "nodes_unmapped.csv": (("default_id",), sorted((c,) for c in dedup.unmerged)),
        "mappings_domain.csv": mappings_table(dedup.domain_mappings),
        "alignment_steps.csv": steps_table(dedup.steps),
        "edges_hierarchy_domain.csv": hierarchy_table(conn.domain_hierarchy),
        "connectivity_attachments.csv": attachments_table(conn.attachments),
    }
    assert tuple(tables) == OUTPUT_FILES
    return tables


def render_csv(table: Table, delimiter: str = ",") -> str:
    columns, rows = table
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def write_table(path: str | os.PathLike, table: Table, delimiter: str = ",") -> None:
    FsPath(path).write_text(render_csv(table, delimiter), encoding="utf-8")
