"""Deduplicate knowledge-graph concepts and assemble them into one seed-rooted DAG."""

from .connect import (
    Attachment,
    ConnectivityResult,
    SourceHierarchyGraph,
    connect_concepts,
    convert_to_edges,
    get_hierarchy,
    prune_path,
    shortest_path_to_root,
    verify_dag,
)
from .dedup import (
    AlignmentStep,
    DedupResult,
    aggregate_merges,
    apply_merges,
    compute_merges,
    compute_obsolete_merges,
    deduplicate,
    update_mappings,
)
from .ingest import (
    Finding,
    InputBundle,
    Severity,
    ValidationReport,
    drop_flagged_rows,
    load_bundle,
    parse_config,
    parse_hierarchy,
    parse_mappings,
    parse_nodes,
    validate_inputs,
)
from .model import (
    AlignmentConfig,
    HierarchyEdge,
    Mapping,
    MappingTypeGroup,
    Merge,
    NodeRecord,
    NodeTable,
    Path,
    Side,
    get_concepts,
    is_stable,
    sig,
    source_of,
)
from .report import PipelineMetrics, compute_metrics, profile_tables, render_report

__version__ = "0.1.0"
