"""Deduplicating three overlapping sources.

Three ontologies describe the same disease: S3 (the seed, highest priority),
S2 and S1.  S1 also holds a concept nobody else knows about.  Alignment runs
group by group and source by source, and every merge cluster is then
collapsed so that each member points straight at its canonical concept.

    python demos/01_merge_clusters.py
"""

from __future__ import annotations

from ontoweave import (
    AlignmentConfig,
    InputBundle,
    Mapping,
    Merge,
    NodeTable,
    aggregate_merges,
    compute_merges,
    deduplicate,
    is_stable,
)

config = AlignmentConfig.build(
    seed="S3",
    sources=["S3", "S2", "S1"],
    groups={"eqv": ["equivalent_to"], "xref": ["xref"]},
)
nodes = NodeTable.from_ids(["S1:001", "S1:002", "S2:001", "S3:001"])
mappings = (
    Mapping("S1:001", "S2:001", "equivalent_to"),
    Mapping("S2:001", "S3:001", "xref"),
)

# One alignment round.  S2:001 is only a merge target after the S2
# iteration, so it is still free when S1 is visited and gets pointed back at
# S1:001.  The round therefore yields a two-member cluster, not a chain.
raw, steps = compute_merges(nodes, mappings, config)
print("round 0 merges:")
for m in raw:
    print(f"  {m.source} -> {m.target}")
print("stable as produced?", is_stable(raw))

print("\nper (group, source) iteration:")
for s in steps:
    print(f"  {s.group_name:5} {s.source}: considered={s.mappings_considered} merged={s.merges_produced}")

# Clusters collapse onto their best-ranked member.  A chain spanning all three
# sources ends up pointing at the seed concept.
chain = [Merge("S1:001", "S2:001"), Merge("S2:001", "S3:001")]
print("\nchain collapsed:")
for m in aggregate_merges(chain, config.sources):
    print(f"  {m.source} -> {m.target}")

# The full stage repeats rounds on the rewritten mappings until nothing merges,
# so the xref to S3 is picked up once S1:001 and S2:001 have been folded.
result = deduplicate(InputBundle(nodes, mappings, (), config, validated=True))
productive = len({s.round_index for s in result.steps if s.merges_produced})
print(f"\ncanonical merges after {productive} merging rounds:")
for m in result.canonical_merges:
    print(f"  {m.source} -> {m.target}")
print("stable?", is_stable(result.canonical_merges))
print("domain concepts:", ", ".join(result.domain_concepts.ids))
print(f"{len(nodes.current)} current in = {len(result.domain_concepts)} kept + {len(result.canonical_merges)} merged")
