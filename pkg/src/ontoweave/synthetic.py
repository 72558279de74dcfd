"""Random but reproducible input bundles for tests, demos and benchmarks.

Concepts of several sources are drawn from a pool of latent entities; an
entity present in more than one source yields equivalence mappings between
its ids.  On top of that the generator adds wrong mappings (which create
multi-target ambiguity), unusable relations, obsolete ids with renaming
chains, and per-source hierarchies with occasional cross-source parents.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from pathlib import Path as FsPath

import yaml

from .ingest import InputBundle, config_to_dict
from .model import AlignmentConfig, HierarchyEdge, Mapping, NodeRecord, NodeTable
from .tables import hierarchy_table, mappings_table, nodes_table, render_csv

EQUIVALENCE = ("equivalent_to", "exact_match")
XREF = ("xref", "database_cross_reference")
UNUSABLE = ("broader", "related_to")


@dataclass(frozen=True)
class BundleSpec:
    n_sources: int = 4
    n_concepts: int = 200
    overlap: float = 0.3
    wrong_mapping_rate: float = 0.05
    unusable_rate: float = 0.02
    obsolete_rate: float = 0.05
    chain_rate: float = 0.3
    extra_parent_rate: float = 0.1
    cross_parent_rate: float = 0.05
    n_mappings: int | None = None
    n_edges: int | None = None


def default_config(sources: list[str]) -> AlignmentConfig:
    return AlignmentConfig.build(sources[0], sources, {"eqv": EQUIVALENCE, "xref": XREF})


def generate_bundle(seed: int, spec: BundleSpec = BundleSpec()) -> InputBundle:
    """Build a bundle that passes input validation."""
    rng = random.Random(seed)
    sources = [f"O{i}" for i in range(spec.n_sources)]
    per_source: dict[str, list[str]] = {s: [] for s in sources}
    counters = dict.fromkeys(sources, 0)

    def new_id(src: str) -> str:
        counters[src] += 1
        return f"{src}:{counters[src]:06d}"

    mappings: dict[Mapping, None] = {}

    def add_mapping(a: str, b: str, relation: str) -> None:
        if a == b:
            return
        if rng.random() < 0.5:
            a, b = b, a
        mappings[Mapping(a, b, relation, rng.choice(("curated", "lexical", "import")))] = None

    # Latent entities, each present in a home source and maybe in others.
    remaining = spec.n_concepts
    while remaining > 0:
        home = rng.choice(sources)
        members = [home]
        if rng.random() < spec.overlap:
            others = [s for s in sources if s != home]
            members += rng.sample(others, k=min(len(others), rng.choice((1, 1, 2))))
        members = members[:remaining]
        ids = []
        for s in members:
            cid = new_id(s)
            per_source[s].append(cid)
            ids.append(cid)
        remaining -= len(ids)
        for a, b in zip(ids, ids[1:]):
            rel = rng.choice(EQUIVALENCE) if rng.random() < 0.7 else rng.choice(XREF)
            add_mapping(a, b, rel)

    all_ids = [c for s in sources for c in per_source[s]]
    n_wrong = int(len(all_ids) * spec.wrong_mapping_rate)
    for _ in range(n_wrong):
        a, b = rng.sample(all_ids, 2)
        if a.split(":")[0] != b.split(":")[0]:
            add_mapping(a, b, rng.choice(EQUIVALENCE + XREF))
    for _ in range(int(len(all_ids) * spec.unusable_rate)):
        a, b = rng.sample(all_ids, 2)
        add_mapping(a, b, rng.choice(UNUSABLE))
    if spec.n_mappings is not None:
        while len(mappings) < spec.n_mappings:
            a, b = rng.choice(all_ids), rng.choice(all_ids)
            if a.split(":")[0] != b.split(":")[0]:
                add_mapping(a, b, rng.choice(EQUIVALENCE + XREF + UNUSABLE))

    # Obsolete ids renamed to current ones, sometimes through another obsolete id.
    obsolete: list[str] = []
    for s in sources:
        for current in list(per_source[s]):
            if rng.random() >= spec.obsolete_rate:
                continue
            old = new_id(s)
            obsolete.append(old)
            mappings[Mapping(old, current, rng.choice(EQUIVALENCE), "renaming")] = None
            if rng.random() < spec.chain_rate:
                older = new_id(s)
                obsolete.append(older)
                mappings[Mapping(older, old, EQUIVALENCE[0], "renaming")] = None
            if rng.random() < 0.3:
                other = rng.choice(all_ids)
                if other.split(":")[0] != s:
                    add_mapping(old, other, rng.choice(XREF))

    # Per-source hierarchies: parents are always earlier ids, so each is a DAG.
    edges: dict[HierarchyEdge, None] = {}
    seed_ids = per_source[sources[0]]
    orders: dict[str, list[str]] = {}
    for s in sources:
        ids = orders[s] = per_source[s][:]
        rng.shuffle(ids)
        n_roots = max(1, len(ids) // 50)
        for i, child in enumerate(ids):
            if i < n_roots:
                if s != sources[0] and seed_ids and rng.random() < spec.cross_parent_rate * 4:
                    edges[HierarchyEdge(child, rng.choice(seed_ids))] = None
                continue
            edges[HierarchyEdge(child, ids[rng.randrange(max(0, i - 20), i)])] = None
            if rng.random() < spec.extra_parent_rate:
                edges[HierarchyEdge(child, ids[rng.randrange(i)])] = None
            if rng.random() < spec.cross_parent_rate:
                other = rng.choice(all_ids)
                if other.split(":")[0] != s:
                    edges[HierarchyEdge(child, other)] = None
    if spec.n_edges is not None:
        while len(edges) < spec.n_edges:
            s = rng.choice(sources)
            ids = orders[s]
            if len(ids) < 2:
                continue
            i, j = sorted(rng.sample(range(len(ids)), 2))
            edges[HierarchyEdge(ids[j], ids[i])] = None

    nodes = NodeTable(
        [NodeRecord(c, False) for c in all_ids] + [NodeRecord(c, True) for c in obsolete]
    )
    order = list(nodes)
    rng.shuffle(order)
    return InputBundle(NodeTable(order), tuple(mappings), tuple(edges), default_config(sources))


def write_bundle(bundle: InputBundle, directory: str | os.PathLike, shuffle_seed: int | None = None) -> FsPath:
    """Write a bundle as an input directory; returns the config file path.

    Rows are in canonical order unless ``shuffle_seed`` is given.
    """
    directory = FsPath(directory)
    directory.mkdir(parents=True, exist_ok=True)
    tables = {
        "nodes.csv": nodes_table(bundle.nodes),
        "mappings.csv": mappings_table(bundle.mappings),
        "edges_hierarchy.csv": hierarchy_table(bundle.hierarchy),
    }
    rng = random.Random(shuffle_seed)
    for name, (columns, rows) in tables.items():
        if shuffle_seed is not None:
            rows = rows[:]
            rng.shuffle(rows)
        (directory / name).write_text(render_csv((columns, rows)), encoding="utf-8")
    config_path = directory / "config.yaml"
    config_path.write_text(yaml.safe_dump(config_to_dict(bundle.config), sort_keys=False), encoding="utf-8")
    return config_path
