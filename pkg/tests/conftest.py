import random

import pytest
from hypothesis import HealthCheck, settings

from ontoweave import AlignmentConfig, drop_flagged_rows, validate_inputs
from ontoweave.synthetic import BundleSpec, generate_bundle

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def corpus_spec(seed: int) -> BundleSpec:
    """Fixture parameters: 3-6 sources, 50-500 concepts, overlap 0.1-0.6."""
    r = random.Random(seed)
    return BundleSpec(
        n_sources=r.randint(3, 6),
        n_concepts=r.randint(50, 500),
        overlap=r.uniform(0.1, 0.6),
        wrong_mapping_rate=r.uniform(0.02, 0.15),
        obsolete_rate=r.uniform(0.0, 0.1),
        cross_parent_rate=r.uniform(0.0, 0.15),
    )


def small_spec(seed: int) -> BundleSpec:
    r = random.Random(seed)
    return BundleSpec(
        n_sources=r.randint(3, 5),
        n_concepts=r.randint(8, 24),
        overlap=r.uniform(0.2, 0.8),
        wrong_mapping_rate=0.3,
        obsolete_rate=0.1,
        cross_parent_rate=0.2,
    )


def clean_bundle(seed: int, spec: BundleSpec):
    bundle = generate_bundle(seed, spec)
    assert not validate_inputs(bundle).has_errors
    return drop_flagged_rows(bundle)


@pytest.fixture
def abc_config():
    return AlignmentConfig.build("S3", ["S3", "S2", "S1"], {"eqv": ["equivalent_to"], "xref": ["xref"]})


# -- acceptance summary ---------------------------------------------------------

_criteria: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _criteria[name] = (report.outcome.upper(), report.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda n: int(n.split("_")[2])):
        outcome, _ = _criteria[name]
        verdict = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
