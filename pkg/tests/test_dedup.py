from hypothesis import given
from hypothesis import strategies as st

from conftest import clean_bundle, small_spec
from ontoweave import (
    AlignmentConfig,
    HierarchyEdge,
    InputBundle,
    Mapping,
    Merge,
    NodeTable,
    ValidationReport,
    aggregate_merges,
    apply_merges,
    compute_merges,
    compute_obsolete_merges,
    deduplicate,
    is_stable,
    source_of,
    update_mappings,
)

EQ = "equivalent_to"
CHAIN = [Merge("S1:001", "S2:001"), Merge("S2:001", "S3:001")]
CHAIN_CANONICAL = (Merge("S1:001", "S3:001"), Merge("S2:001", "S3:001"))


# -- obsolete renamings -----------------------------------------------------------


def test_obsolete_direct_renaming():
    merges, internal = compute_obsolete_merges([Mapping("A:old", "A:new", EQ)], {"A:old"})
    assert merges == (Merge("A:old", "A:new"),)
    assert internal == (Mapping("A:old", "A:new", EQ),)


def test_obsolete_renaming_against_written_direction():
    merges, _ = compute_obsolete_merges([Mapping("A:new", "A:old", EQ)], {"A:old"})
    assert merges == (Merge("A:old", "A:new"),)


def test_obsolete_chain_follows_through_obsolete_ids():
    mappings = [Mapping("A:1", "A:2", EQ), Mapping("A:2", "A:3", EQ)]
    merges, _ = compute_obsolete_merges(mappings, {"A:1", "A:2"})
    assert set(merges) == {Merge("A:1", "A:3"), Merge("A:2", "A:3")}


def test_no_obsolete_ids_leaves_only_internal_mappings():
    mappings = [Mapping("A:1", "A:2", EQ), Mapping("A:1", "B:1", EQ)]
    merges, internal = compute_obsolete_merges(mappings, set())
    assert merges == ()
    assert internal == (Mapping("A:1", "A:2", EQ),)


def test_obsolete_ambiguous_and_cyclic_are_reported():
    report = ValidationReport()
    mappings = [
        Mapping("A:o", "A:x", EQ),
        Mapping("A:o", "A:y", EQ),
        Mapping("A:p", "A:q", EQ),
        Mapping("A:q", "A:p", EQ),
        Mapping("A:q", "A:z", EQ),
    ]
    merges, _ = compute_obsolete_merges(mappings, {"A:o", "A:p", "A:q"}, report=report)
    assert merges == ()
    assert report.by_check("obsolete_ambiguous").count == 1
    assert report.by_check("obsolete_cycle").count == 2


def test_obsolete_merges_respect_relation_filter():
    mappings = [Mapping("A:old", "A:new", "xref")]
    assert compute_obsolete_merges(mappings, {"A:old"}, {EQ}) == ((), ())


# -- rewriting --------------------------------------------------------------------


def test_update_mappings_examples():
    old = Merge("A:old", "A:new")
    assert update_mappings([Mapping("A:old", "B:1", "xref")], [old]) == (Mapping("A:new", "B:1", "xref"),)
    assert update_mappings([Mapping("A:old", "A:new", EQ)], [old]) == ()
    both = [Mapping("A:old", "B:1", "xref"), Mapping("A:new", "B:1", "xref")]
    assert update_mappings(both, [old]) == (Mapping("A:new", "B:1", "xref"),)


def test_apply_merges_examples():
    table = NodeTable.from_ids(["S1:001", "S2:001", "S3:001"])
    assert apply_merges(table, CHAIN_CANONICAL) == NodeTable.from_ids(["S3:001"])
    assert apply_merges(table, []) == table
    edge = [HierarchyEdge("S1:001", "S1:002")]
    assert apply_merges(edge, [Merge("S1:001", "S3:001")]) == (HierarchyEdge("S3:001", "S1:002"),)


concept = st.builds(lambda s, n: f"{s}:{n}", st.sampled_from(["S1", "S2", "S3"]), st.integers(0, 6))


@st.composite
def stable_merges(draw):
    targets = draw(st.sets(concept, max_size=4))
    pool = draw(st.sets(concept, max_size=8)) - targets
    return {Merge(c, draw(st.sampled_from(sorted(targets)))) for c in pool} if targets else set()


@given(st.lists(st.tuples(concept, concept)), stable_merges())
def test_apply_merges_matches_cellwise_substitution(edges, merges):
    edges = [HierarchyEdge(a, b) for a, b in edges if a != b]
    table = dict(merges)
    expected = {(table.get(a, a), table.get(b, b)) for a, b in edges}
    expected = {e for e in expected if e[0] != e[1]}
    out = apply_merges(edges, merges)
    assert set(out) == expected and len(out) == len(expected)
    assert not sig_sources(out) & set(table)


def sig_sources(edges):
    return {c for e in edges for c in e}


# -- alignment --------------------------------------------------------------------


def test_single_alignment_to_higher_priority():
    cfg = AlignmentConfig.build("S2", ["S2", "S1"], {"eqv": [EQ]})
    merges, steps = compute_merges(["S1:001", "S2:001"], [Mapping("S1:001", "S2:001", EQ)], cfg)
    assert merges == [Merge("S1:001", "S2:001")]
    assert [(s.source, s.merges_produced) for s in steps] == [("S2", 1), ("S1", 0)]


def test_multi_target_concept_is_held_back():
    cfg = AlignmentConfig.build("S2", ["S2", "S1"], {"eqv": [EQ]})
    mappings = [Mapping("S1:a", "S2:x", EQ), Mapping("S1:a", "S2:y", EQ)]
    merges, steps = compute_merges(["S1:a", "S2:x", "S2:y"], mappings, cfg)
    assert merges == []
    assert steps[0].dropped_multi_target == 1 and steps[0].mappings_considered == 2


def test_held_back_concept_stays_eligible_for_later_groups():
    cfg = AlignmentConfig.build("S2", ["S2", "S1", "S0"], {"eqv": [EQ], "xref": ["xref"]})
    mappings = [
        Mapping("S0:a", "S2:x", EQ),
        Mapping("S0:a", "S2:y", EQ),
        Mapping("S0:a", "S1:z", "xref"),
    ]
    merges, _ = compute_merges(["S0:a", "S2:x", "S2:y", "S1:z"], mappings, cfg)
    assert merges[0] == Merge("S0:a", "S1:z")
    # the target is still unmerged, so the S0 iteration points it back;
    # aggregation settles the pair on the higher priority member
    assert aggregate_merges(merges, cfg.sources) == (Merge("S0:a", "S1:z"),)


def test_merges_point_towards_the_seed():
    cfg = AlignmentConfig.build("S3", ["S3", "S2"], {"eqv": [EQ]})
    merges, steps = compute_merges(["S3:001", "S2:001"], [Mapping("S3:001", "S2:001", EQ)], cfg)
    assert merges == [Merge("S2:001", "S3:001")]
    assert [(s.source, s.merges_produced) for s in steps] == [("S3", 1), ("S2", 0)]


def test_group_order_beats_source_order():
    cfg = AlignmentConfig.build("S3", ["S3", "S2", "S1"], {"eqv": [EQ], "xref": ["xref"]})
    mappings = [Mapping("S1:a", "S3:a", "xref"), Mapping("S1:a", "S2:a", EQ)]
    merges, _ = compute_merges(["S1:a", "S2:a", "S3:a"], mappings, cfg)
    assert merges[0] == Merge("S1:a", "S2:a")
    assert Merge("S1:a", "S3:a") not in merges


def test_within_source_and_unknown_mappings_are_ignored():
    cfg = AlignmentConfig.build("S2", ["S2", "S1"], {"eqv": [EQ]})
    mappings = [Mapping("S1:a", "S1:b", EQ), Mapping("S1:a", "S2:gone", EQ)]
    assert compute_merges(["S1:a", "S1:b"], mappings, cfg)[0] == []


# -- aggregation ------------------------------------------------------------------


def test_merge_chain_collapses_to_canonical_set():
    assert aggregate_merges(CHAIN, ["S3", "S2", "S1"]) == CHAIN_CANONICAL


def test_aggregate_singleton_unchanged():
    assert aggregate_merges([Merge("A:1", "B:1")], ["B", "A"]) == (Merge("A:1", "B:1"),)


def test_aggregate_star_points_to_best_source():
    star = [Merge("A:1", "C:1"), Merge("B:1", "C:1"), Merge("C:1", "D:1")]
    assert aggregate_merges(star, ["D", "C", "B", "A"]) == (
        Merge("A:1", "D:1"),
        Merge("B:1", "D:1"),
        Merge("C:1", "D:1"),
    )


def test_aggregate_keeps_several_seed_members_apart():
    report = ValidationReport()
    merges = [Merge("B:1", "A:1"), Merge("B:1", "A:2")]
    out = aggregate_merges(merges, ["A", "B"], report)
    assert out == (Merge("B:1", "A:1"),)
    assert report.by_check("multiple_seed_currents").count == 1


@given(st.lists(st.tuples(concept, concept)))
def test_aggregate_is_stable_and_idempotent(pairs):
    merges = [Merge(a, b) for a, b in pairs if a != b]
    order = ["S3", "S2", "S1"]
    out = aggregate_merges(merges, order)
    assert is_stable(out)
    assert aggregate_merges(out, order) == out
    for m in out:
        assert source_of(m.source) != "S3"


# -- full stage -------------------------------------------------------------------


def make_bundle(nodes, mappings, config, obsolete=()):
    return InputBundle(NodeTable.from_ids(nodes, obsolete), tuple(mappings), (), config, validated=True)


def test_no_mappings_merges_nothing(abc_config):
    nodes = ["S1:001", "S2:001", "S3:001"]
    result = deduplicate(make_bundle(nodes, [], abc_config, obsolete=["S1:001"]))
    assert result.canonical_merges == ()
    assert set(result.domain_concepts.ids) == {"S2:001", "S3:001"}
    assert result.unmerged == {"S2:001", "S3:001"}


def test_three_source_chain(abc_config):
    mappings = [Mapping("S1:001", "S2:001", EQ), Mapping("S2:001", "S3:001", "xref")]
    result = deduplicate(make_bundle(["S1:001", "S1:002", "S2:001", "S3:001"], mappings, abc_config))
    assert set(result.domain_concepts.ids) == {"S3:001", "S1:002"}
    assert result.canonical_merges == CHAIN_CANONICAL
    assert result.domain_mappings == ()


def test_obsolete_ids_leave_the_domain_and_merge_to_canonical(abc_config):
    mappings = [Mapping("S1:old", "S1:new", EQ), Mapping("S1:old", "S3:a", EQ)]
    result = deduplicate(make_bundle(["S1:old", "S1:new", "S3:a"], mappings, abc_config, obsolete=["S1:old"]))
    assert result.obsolete_merges == (Merge("S1:old", "S3:a"),)
    assert result.canonical_merges == (Merge("S1:new", "S3:a"),)
    assert set(result.domain_concepts.ids) == {"S3:a"}


def test_internal_equivalences_are_reported_not_merged(abc_config):
    result = deduplicate(make_bundle(["S2:a", "S2:b"], [Mapping("S2:a", "S2:b", EQ)], abc_config))
    assert result.canonical_merges == ()
    assert result.report.by_check("internal_equivalences").count == 1


def test_single_round_can_leave_work_for_a_rerun():
    # S1:a is held back in round one (two S2 targets); once those collapse
    # onto S3:x the rewritten mappings align it.
    cfg = AlignmentConfig.build("S3", ["S3", "S2", "S1"], {"eqv": [EQ]})
    nodes = ["S1:a", "S2:x", "S2:y", "S3:x"]
    mappings = [
        Mapping("S1:a", "S2:x", EQ),
        Mapping("S1:a", "S2:y", EQ),
        Mapping("S2:x", "S3:x", EQ),
        Mapping("S2:y", "S3:x", EQ),
    ]
    once = deduplicate(make_bundle(nodes, mappings, cfg), until_stable=False)
    assert "S1:a" in once.unmerged
    full = deduplicate(make_bundle(nodes, mappings, cfg))
    assert set(full.domain_concepts.ids) == {"S3:x"}
    productive = {s.round_index for s in full.steps if s.merges_produced}
    assert productive == {0, 1}
    assert max(s.round_index for s in full.steps) == 2


@given(st.integers(0, 10_000))
def test_generated_bundles_keep_the_invariants(seed):
    bundle = clean_bundle(seed, small_spec(seed))
    result = deduplicate(bundle)
    cfg = bundle.config
    assert is_stable(result.all_merges)
    assert len(bundle.nodes.current) == len(result.domain_concepts) + len(result.canonical_merges)
    assert not any(source_of(m.source) == cfg.seed for m in result.canonical_merges)
    assert set(result.domain_concepts.ids) == bundle.nodes.current - {m.source for m in result.canonical_merges}
    assert all(m.source in result.unmerged and m.target in result.unmerged for m in result.domain_mappings)
    again = deduplicate(
        InputBundle(result.domain_concepts, result.domain_mappings, (), cfg, validated=True)
    )
    assert again.canonical_merges == ()
