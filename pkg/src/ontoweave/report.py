"""Pipeline metrics, table profiles and the static HTML report."""

from __future__ import annotations

import html
import json
from collections import Counter
from collections.abc import Iterable, Mapping as MappingABC, Sequence
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Any

from .connect import ConnectivityResult
from .dedup import AlignmentStep, DedupResult
from .graphs import count_weak_components
from .ingest import Finding, InputBundle, ValidationReport
from .model import merge_map, source_of
from .tables import Table

COMPARISON_ROWS = (
    ("concept_sources", "Concept sources (ontologies)"),
    ("concepts", "Concepts"),
    ("concept_merges", "Concept merges"),
    ("mappings", "Mappings"),
    ("connected_subgraphs", "Connected subgraphs"),
    ("hierarchy_edges", "Hierarchy edges"),
)

DEDUP_STATUS = (
    ("seed", "Seed"),
    ("merged_to_seed", "Merged to seed"),
    ("merged_to_other", "Merged to other (excluding to seed)"),
    ("unmapped", "Unmapped"),
)
CONNECTIVITY_STATUS = (
    ("connected_seed_plus_merged", "Connected seed + merged to seed"),
    ("connected_other", "Connected"),
    ("disconnected", "Disconnected"),
)

ID_COLUMNS = frozenset({"default_id", "source_id", "target_id", "concept", "anchor"})


def percent(count: int, total: int) -> float:
    """``count / total`` as a percentage rounded half-up to two decimals."""
    if not total:
        return 0.0
    value = Decimal(count) * 100 / Decimal(total)
    return float(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass
class PipelineMetrics:
    """Input/output comparison and per-concept status breakdown.

    ``comparison`` maps each row key to ``{"input": n, "output": n}``;
    ``concept_merges`` has no input value.  ``status`` maps each status key to
    ``{"count": n, "percent": p}`` where ``p`` is relative to
    ``input_concepts``.  Durations are whole milliseconds and are the only
    values that differ between runs on the same inputs.
    """

    input_concepts: int
    comparison: dict[str, dict[str, int | None]]
    status: dict[str, dict[str, float | int]]
    durations_ms: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: MappingABC[str, Any]) -> PipelineMetrics:
        return cls(
            input_concepts=data["input_concepts"],
            comparison={k: dict(v) for k, v in data["comparison"].items()},
            status={k: dict(v) for k, v in data["status"].items()},
            durations_ms=dict(data.get("durations_ms", {})),
        )


def compute_metrics(
    bundle: InputBundle,
    dedup: DedupResult,
    conn: ConnectivityResult,
    durations_ms: MappingABC[str, int] | None = None,
) -> PipelineMetrics:
    """Summarize one pipeline run.

    Every input concept gets one deduplication status and one connectivity
    status, so each group of counts sums to the number of input concepts.
    Merged concepts are classified by the source of their canonical target
    and count as connected when that target is.  Obsolete concepts left
    without a renaming are unmapped and disconnected.
    """
    seed = bundle.config.seed
    target_of = merge_map(dedup.all_merges)
    status = Counter({k: 0 for k, _ in DEDUP_STATUS + CONNECTIVITY_STATUS})
    for cid, obsolete in bundle.nodes:
        rep: str | None = cid
        if cid in target_of:
            rep = target_of[cid]
            dedup_status = "merged_to_seed" if source_of(rep) == seed else "merged_to_other"
        elif obsolete:
            rep, dedup_status = None, "unmapped"
        elif source_of(cid) == seed:
            dedup_status = "seed"
        else:
            dedup_status = "unmapped"
        status[dedup_status] += 1
        if rep is None or rep not in conn.connected:
            status["disconnected"] += 1
        elif dedup_status in ("seed", "merged_to_seed"):
            status["connected_seed_plus_merged"] += 1
        else:
            status["connected_other"] += 1

    n = len(bundle.nodes)
    comparison = {
        "concept_sources": {
            "input": len({source_of(c) for c in bundle.nodes.ids}),
            "output": len({source_of(c) for c in dedup.domain_concepts.ids}),
        },
        "concepts": {"input": n, "output": len(dedup.domain_concepts)},
        "concept_merges": {"input": None, "output": len(dedup.all_merges)},
        "mappings": {"input": len(bundle.mappings), "output": len(dedup.domain_mappings)},
        "connected_subgraphs": {
            "input": count_weak_components(bundle.hierarchy),
            "output": count_weak_components(conn.domain_hierarchy),
        },
        "hierarchy_edges": {"input": len(bundle.hierarchy), "output": len(conn.domain_hierarchy)},
    }
    return PipelineMetrics(
        input_concepts=n,
        comparison=comparison,
        status={k: {"count": status[k], "percent": percent(status[k], n)} for k, _ in DEDUP_STATUS + CONNECTIVITY_STATUS},
        durations_ms=dict(durations_ms or {}),
    )


@dataclass
class ColumnProfile:
    name: str
    distinct: int
    nulls: int


@dataclass
class TableProfile:
    name: str
    rows: int
    columns: list[ColumnProfile]
    source_prefixes: dict[str, int]

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def profile_table(name: str, table: Table) -> TableProfile:
    columns, rows = table
    cols = []
    prefixes: Counter[str] = Counter()
    for i, col in enumerate(columns):
        values = [r[i] for r in rows]
        nulls = sum(1 for v in values if v is None or v == "")
        cols.append(ColumnProfile(col, len(set(values)), nulls))
        if col in ID_COLUMNS:
            prefixes.update(source_of(v) for v in values if v)
    return TableProfile(name, len(rows), cols, dict(sorted(prefixes.items())))


def profile_tables(*groups: MappingABC[str, Table]) -> list[TableProfile]:
    """Profile every table of every ``{file name: table}`` group, in order."""
    return [profile_table(name, t) for g in groups for name, t in g.items()]


# -- rendering ----------------------------------------------------------------

_CSS = """
body{font-family:system-ui,sans-serif;margin:2em auto;max-width:70em;color:#222}
h1{border-bottom:2px solid #446}h2{margin-top:2em;color:#335}
table{border-collapse:collapse;margin:.5em 0 1.5em}
th,td{border:1px solid #bbb;padding:.25em .6em;text-align:left}
td.n{text-align:right;font-variant-numeric:tabular-nums}
th{background:#eef}
code{font-size:90%}
""".strip()


def _fmt(v: Any) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, float):
        return f"{v:.2f}"
    return str(v)


def _table(headers: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    head = "".join(f"<th>{html.escape(h)}</th>" for h in headers)
    body = []
    for row in rows:
        cells = []
        for v in row:
            cls = ' class="n"' if isinstance(v, (int, float)) or v is None else ""
            cells.append(f"<td{cls}>{html.escape(_fmt(v))}</td>")
        body.append("<tr>" + "".join(cells) + "</tr>")
    return f"<table><thead><tr>{head}</tr></thead><tbody>{''.join(body)}</tbody></table>"


def report_document(
    metrics: PipelineMetrics,
    profiles: Sequence[TableProfile],
    validation: ValidationReport | Iterable[Finding],
    steps: Sequence[AlignmentStep],
) -> dict[str, Any]:
    findings = validation.findings if isinstance(validation, ValidationReport) else list(validation)
    return {
        "metrics": metrics.to_dict(),
        "profiles": [p.to_dict() for p in profiles],
        "alignment_steps": [asdict(s) for s in steps],
        "validation": [f.to_dict() for f in findings],
    }


def render_report(
    metrics: PipelineMetrics,
    profiles: Sequence[TableProfile],
    validation: ValidationReport | Iterable[Finding],
    steps: Sequence[AlignmentStep],
) -> tuple[str, str]:
    """Return ``(html, json)`` documents describing one run.

    The HTML is self-contained; every number it shows is also in the JSON.
    """
    doc = report_document(metrics, profiles, validation, steps)
    m = doc["metrics"]
    parts = [
        "<!DOCTYPE html>",
        '<html lang="en"><head><meta charset="utf-8">',
        "<title>Ontology integration report</title>",
        f"<style>{_CSS}</style></head><body>",
        "<h1>Ontology integration report</h1>",
        '<section id="overview"><h2>Overview</h2>',
        _table(
            ["Metric", "Count (input)", "Count (output)"],
            [(label, m["comparison"][k]["input"], m["comparison"][k]["output"]) for k, label in COMPARISON_ROWS],
        ),
        "<h3>Concept deduplication status</h3>",
        _table(
            ["Concept set", "Count", "Ratio (%)"],
            [("Input", m["input_concepts"], 100.0 if m["input_concepts"] else 0.0)]
            + [(label, m["status"][k]["count"], m["status"][k]["percent"]) for k, label in DEDUP_STATUS],
        ),
        "</section>",
        '<section id="profiles"><h2>Table profiles</h2>',
    ]
    for p in doc["profiles"]:
        parts.append(f"<h3><code>{html.escape(p['name'])}</code>: {p['rows']} rows</h3>")
        parts.append(_table(["Column", "Distinct", "Nulls"], [(c["name"], c["distinct"], c["nulls"]) for c in p["columns"]]))
        if p["source_prefixes"]:
            parts.append(_table(["Source prefix", "Occurrences"], sorted(p["source_prefixes"].items())))
    parts.append("</section>")
    parts.append('<section id="alignment"><h2>Alignment steps</h2>')
    parts.append(
        _table(
            ["Round", "Step", "Group", "Source", "Mappings considered", "Merges", "Held back (multi-target)"],
            [
                (s["round_index"], s["step_index"], s["group_name"], s["source"], s["mappings_considered"], s["merges_produced"], s["dropped_multi_target"])
                for s in doc["alignment_steps"]
            ],
        )
    )
    parts.append("</section>")
    parts.append('<section id="connectivity"><h2>Connectivity</h2>')
    parts.append(
        _table(
            ["Concept set", "Count", "Ratio (%)"],
            [(label, m["status"][k]["count"], m["status"][k]["percent"]) for k, label in CONNECTIVITY_STATUS],
        )
    )
    if m["durations_ms"]:
        parts.append("<h3>Stage durations</h3>")
        parts.append(_table(["Stage", "Milliseconds"], list(m["durations_ms"].items())))
    parts.append("</section>")
    parts.append('<section id="validation"><h2>Validation findings</h2>')
    if doc["validation"]:
        rows = []
        for f in doc["validation"]:
            sample = "; ".join(",".join(r) for r in f["sample_rows"])
            rows.append((f["check_id"], f["severity"], f["count"], f["message"], sample))
        parts.append(_table(["Check", "Severity", "Count", "Description", "Sample rows"], rows))
    else:
        parts.append("<p>No findings.</p>")
    parts.append("</section></body></html>\n")
    return "\n".join(parts), json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
