"""Attaching non-seed concepts to the seed hierarchy.

The seed hierarchy is kept as is.  A concept from another source climbs its
own hierarchy along the shortest path to a root; the climb stops at the first
concept already in the domain hierarchy (the anchor).  Intermediate concepts
that were merged away or belong to nobody's unmerged set are skipped, so the
new edge may jump several levels.

    python demos/02_connectivity.py
"""

from __future__ import annotations

from ontoweave import (
    AlignmentConfig,
    HierarchyEdge as E,
    InputBundle,
    Mapping,
    NodeTable,
    connect_concepts,
    deduplicate,
    verify_dag,
)

config = AlignmentConfig.build("SEED", ["SEED", "ORPHA"], {"eqv": ["equivalent_to"]})
nodes = NodeTable.from_ids(
    [
        "SEED:disease",
        "SEED:lung_disease",
        "ORPHA:rare_disease",
        "ORPHA:rare_lung_disease",
        "ORPHA:rare_ild",
        "ORPHA:orphan",
    ]
)
hierarchy = (
    E("SEED:lung_disease", "SEED:disease"),
    E("ORPHA:rare_ild", "ORPHA:rare_lung_disease"),
    E("ORPHA:rare_lung_disease", "ORPHA:rare_disease"),
)
mappings = (Mapping("ORPHA:rare_lung_disease", "SEED:lung_disease", "equivalent_to"),)

bundle = InputBundle(nodes, mappings, hierarchy, config, validated=True)
dedup = deduplicate(bundle)
print("merged:", [f"{m.source} -> {m.target}" for m in dedup.canonical_merges])

conn = connect_concepts(dedup.unmerged, hierarchy, dedup.canonical_merges, config)
print("\ndomain hierarchy:")
for e in conn.domain_hierarchy:
    print(f"  {e.child}  is_a  {e.parent}")

print("\nattachments:")
for a in conn.attachments:
    print(f"  {a.concept} via {a.anchor} (path {a.original_path_length} -> {a.pruned_path_length} edges)")

# ORPHA:rare_disease is a root whose only path goes nowhere near the seed.
print("\ndisconnected:", sorted(conn.disconnected))
print("acyclic:", verify_dag(conn.domain_hierarchy)[0])
