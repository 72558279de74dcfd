"""Running the full pipeline on a generated bundle.

Generates a noisy five-source bundle, writes it as an input directory, runs
the ``integrate`` pipeline and prints the overview table from
``report/metrics.json``.  Open ``<output>/report/index.html`` for the full
report.

    python demos/03_end_to_end.py [output_dir]
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

from ontoweave.cli import main
from ontoweave.report import COMPARISON_ROWS, CONNECTIVITY_STATUS, DEDUP_STATUS
from ontoweave.synthetic import BundleSpec, generate_bundle, write_bundle

work = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="ontoweave-demo-"))
spec = BundleSpec(n_sources=5, n_concepts=2_000, overlap=0.4, wrong_mapping_rate=0.08)
config_path = write_bundle(generate_bundle(7, spec), work / "input")

code = main(["--input", str(work / "input"), "--config", str(config_path), "--output", str(work / "output")])
print("exit code:", code)

doc = json.loads((work / "output" / "report" / "metrics.json").read_text())
m = doc["metrics"]
print(f"\n{'':34}{'input':>10}{'output':>10}")
for key, label in COMPARISON_ROWS:
    row = m["comparison"][key]
    print(f"{label:34}{row['input'] if row['input'] is not None else '-':>10}{row['output']:>10}")

print()
for key, label in DEDUP_STATUS + CONNECTIVITY_STATUS:
    s = m["status"][key]
    print(f"{label:40}{s['count']:>8}{s['percent']:>9.2f}%")

print("\nreport:", work / "output" / "report" / "index.html")
