"""``integrate`` command: ingest -> deduplicate -> connect -> report.

Exit codes: 0 success, 1 input errors, 2 warnings with ``--fail-on-warning``,
3 internal invariant violation.  Outputs are staged in a temporary directory
and moved into place only when the whole run succeeded.
"""

from __future__ import annotations

import argparse
import logging
import os
import shutil
import sys
import tempfile
import time
from contextlib import contextmanager
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from .connect import connect_concepts, verify_dag
from .dedup import deduplicate
from .errors import OntoweaveError
from .ingest import ValidationReport, drop_flagged_rows, load_bundle, validate_inputs
from .model import is_stable
from .report import compute_metrics, profile_tables, render_report
from .tables import input_tables, output_tables, write_table

log = logging.getLogger("ontoweave")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_WARNINGS = 2
EXIT_INTERNAL = 3


@dataclass(frozen=True)
class RunOptions:
    input_dir: Path
    config_path: Path
    output_dir: Path
    fail_on_warning: bool = False
    emit_report: bool = True


@contextmanager
def _timed(durations: dict[str, int], name: str):
    t0 = time.perf_counter()
    try:
        yield
    finally:
        durations[name] = round((time.perf_counter() - t0) * 1000)


def _log_findings(report: ValidationReport) -> None:
    for f in report:
        log.warning("%s [%s] %d: %s", f.check_id, f.severity.value, f.count, f.message)


def _publish(staging: Path, output_dir: Path) -> None:
    backup = None
    if output_dir.exists():
        backup = output_dir.with_name(f".{output_dir.name}.old-{os.getpid()}")
        os.replace(output_dir, backup)
    os.replace(staging, output_dir)
    if backup is not None:
        shutil.rmtree(backup)


def run(options: RunOptions) -> int:
    """Execute the whole pipeline and return the process exit code."""
    durations: dict[str, int] = {}
    try:
        with _timed(durations, "ingest"):
            bundle = load_bundle(options.input_dir, options.config_path)
            report = validate_inputs(bundle)
    except (OntoweaveError, OSError) as exc:
        log.error("cannot read inputs: %s", exc)
        return EXIT_INVALID
    _log_findings(report)
    if report.has_errors:
        log.error("input validation failed; nothing written")
        return EXIT_INVALID
    if options.fail_on_warning and report.has_warnings:
        log.error("input validation produced warnings and --fail-on-warning is set")
        return EXIT_WARNINGS

    clean = drop_flagged_rows(bundle)
    with _timed(durations, "deduplication"):
        dedup = deduplicate(clean)
    if not is_stable(dedup.all_merges):
        log.error("internal error: merge set is not stable")
        return EXIT_INTERNAL
    with _timed(durations, "connectivity"):
        conn = connect_concepts(dedup.unmerged, clean.hierarchy, dedup.canonical_merges, clean.config)
    ok, cycle = verify_dag(conn.domain_hierarchy)
    if not ok:
        log.error("internal error: domain hierarchy has a cycle: %s", " -> ".join(cycle or []))
        return EXIT_INTERNAL
    _log_findings(dedup.report)
    _log_findings(conn.report)

    outputs = output_tables(dedup, conn)
    output_dir = Path(options.output_dir).resolve()
    output_dir.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=f".{output_dir.name}.staging-", dir=output_dir.parent))
    try:
        for name, table in outputs.items():
            write_table(staging / name, table)
        if options.emit_report:
            with _timed(durations, "report"):
                findings = ValidationReport()
                findings.extend(report)
                findings.extend(dedup.report)
                findings.extend(conn.report)
                profiles = profile_tables(input_tables(bundle), outputs)
                metrics = compute_metrics(bundle, dedup, conn)
            metrics.durations_ms = dict(durations)
            page, doc = render_report(metrics, profiles, findings, dedup.steps)
            (staging / "report").mkdir()
            (staging / "report" / "index.html").write_text(page, encoding="utf-8")
            (staging / "report" / "metrics.json").write_text(doc, encoding="utf-8")
        _publish(staging, output_dir)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    log.info("wrote %d tables to %s", len(outputs), output_dir)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="integrate",
        description="Deduplicate concepts and build a seed-rooted domain hierarchy.",
    )
    p.add_argument("--input", required=True, type=Path, help="directory with nodes, mappings and edges_hierarchy tables")
    p.add_argument("--config", required=True, type=Path, help="YAML/JSON alignment config")
    p.add_argument("--output", required=True, type=Path, help="directory to (re)create with the results")
    p.add_argument("--fail-on-warning", action="store_true", help="exit 2 when input validation warns")
    p.add_argument("--no-report", action="store_true", help="skip the HTML/JSON report")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    return run(
        RunOptions(
            input_dir=args.input,
            config_path=args.config,
            output_dir=args.output,
            fail_on_warning=args.fail_on_warning,
            emit_report=not args.no_report,
        )
    )


if __name__ == "__main__":
    sys.exit(main())
