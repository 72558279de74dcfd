import json
from collections import Counter

from hypothesis import given
from hypothesis import strategies as st

from conftest import clean_bundle, small_spec
from ontoweave import (
    AlignmentConfig,
    HierarchyEdge,
    InputBundle,
    Mapping,
    NodeTable,
    PipelineMetrics,
    ValidationReport,
    compute_metrics,
    connect_concepts,
    deduplicate,
    profile_tables,
    render_report,
)
from ontoweave.graphs import UnionFind, count_weak_components
from ontoweave.report import COMPARISON_ROWS, CONNECTIVITY_STATUS, DEDUP_STATUS, percent
from ontoweave.tables import input_tables, output_tables

CFG = AlignmentConfig.build("SEED", ["SEED", "S1"], {"eqv": ["equivalent_to"]})


def pipeline(bundle):
    d = deduplicate(bundle)
    c = connect_concepts(d.unmerged, bundle.hierarchy, d.canonical_merges, bundle.config)
    return d, c, compute_metrics(bundle, d, c)


def two_hierarchies():
    nodes = NodeTable.from_ids(["SEED:root", "SEED:b", "S1:r", "S1:a"])
    hierarchy = (HierarchyEdge("SEED:b", "SEED:root"), HierarchyEdge("S1:a", "S1:r"))
    mappings = (Mapping("S1:r", "SEED:root", "equivalent_to"),)
    return InputBundle(nodes, mappings, hierarchy, CFG, validated=True)


def test_empty_bundle_gives_zero_metrics():
    _, _, m = pipeline(InputBundle(NodeTable(), (), (), CFG, validated=True))
    assert m.input_concepts == 0
    for key, _ in COMPARISON_ROWS:
        assert m.comparison[key]["output"] == 0
        assert m.comparison[key]["input"] in (0, None)
    assert all(v == {"count": 0, "percent": 0.0} for v in m.status.values())


def test_two_subgraphs_collapse_to_one():
    _, c, m = pipeline(two_hierarchies())
    assert m.comparison["connected_subgraphs"] == {"input": 2, "output": 1}
    assert HierarchyEdge("S1:a", "SEED:root") in c.domain_hierarchy
    assert m.status["merged_to_seed"]["count"] == 1
    assert m.status["connected_seed_plus_merged"]["count"] == 3
    assert m.status["connected_other"]["count"] == 1
    assert m.status["seed"]["percent"] == 50.0


def test_weak_components_match_union_find():
    edges = [("a", "b"), ("c", "d"), ("d", "e"), ("f", "f")]
    uf = UnionFind()
    for a, b in edges:
        uf.union(a, b)
    assert count_weak_components(edges) == len(uf.groups()) == 3


@given(st.integers(0, 10_000))
def test_status_counts_sum_to_input(seed):
    bundle = clean_bundle(seed, small_spec(seed))
    _, _, m = pipeline(bundle)
    dedup_total = sum(m.status[k]["count"] for k, _ in DEDUP_STATUS)
    conn_total = sum(m.status[k]["count"] for k, _ in CONNECTIVITY_STATUS)
    assert dedup_total == conn_total == m.input_concepts == len(bundle.nodes)


def test_percent_rounds_half_up():
    assert percent(1, 8) == 12.5
    assert percent(1, 3) == 33.33
    assert percent(2, 3) == 66.67
    assert percent(1, 800) == 0.13  # 0.125 rounds up
    assert percent(5, 0) == 0.0


def test_profiles():
    bundle = two_hierarchies()
    d, c, _ = pipeline(bundle)
    profiles = {p.name: p for p in profile_tables(input_tables(bundle), output_tables(d, c))}
    nodes = profiles["nodes.csv"]
    assert nodes.rows == 4
    assert nodes.source_prefixes == {"S1": 2, "SEED": 2}
    relation = next(col for col in profiles["mappings.csv"].columns if col.name == "relation")
    assert relation.distinct == 1
    assert profiles["merges_obsolete.csv"].rows == 0
    assert all(col.distinct <= p.rows for p in profiles.values() for col in p.columns)


def test_profile_distinct_matches_sort_uniq():
    bundle = clean_bundle(3, small_spec(3))
    (p,) = [p for p in profile_tables(input_tables(bundle)) if p.name == "mappings.csv"]
    relation = next(col for col in p.columns if col.name == "relation")
    assert relation.distinct == len(Counter(m.relation for m in bundle.mappings))


def test_render_is_deterministic_and_json_round_trips():
    bundle = two_hierarchies()
    d, c, m = pipeline(bundle)
    profiles = profile_tables(input_tables(bundle), output_tables(d, c))
    findings = ValidationReport()
    first = render_report(m, profiles, findings, d.steps)
    second = render_report(m, profiles, findings, d.steps)
    assert first == second
    page, doc = first
    assert PipelineMetrics.from_dict(json.loads(doc)["metrics"]) == m
    for _, label in COMPARISON_ROWS:
        assert f"<td>{label}</td>" in page
    for section in ("overview", "profiles", "alignment", "connectivity", "validation"):
        assert f'id="{section}"' in page
    assert "http://" not in page and "https://" not in page


def test_metrics_only_render():
    _, _, m = pipeline(InputBundle(NodeTable(), (), (), CFG, validated=True))
    page, doc = render_report(m, [], [], [])
    assert all(label in page for _, label in COMPARISON_ROWS)
    assert json.loads(doc)["metrics"]["input_concepts"] == 0
