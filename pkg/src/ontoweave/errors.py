"""Exception hierarchy.

Parsing and configuration problems raise; content problems found while
validating or running the pipeline are reported as findings instead.
"""

from __future__ import annotations


class OntoweaveError(Exception):
    """Base class for every error raised by this package."""


class IngestError(OntoweaveError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedRow(IngestError):
    pass


class BadConceptId(IngestError):
    pass


class DuplicateId(IngestError):
    pass


class SelfEdge(IngestError):
    pass


class MissingColumn(IngestError):
    pass


class ConfigError(OntoweaveError):
    pass


class SeedNotFirst(ConfigError):
    pass


class DuplicateSource(ConfigError):
    pass


class OverlappingGroups(ConfigError):
    pass


class EmptyGroup(ConfigError):
    pass


class CyclicSource(OntoweaveError):
    """A per-source hierarchy contains a cycle."""

    def __init__(self, source: str, cycle: list[str]):
        self.source = source
        self.cycle = cycle
        super().__init__(f"hierarchy of {source} is cyclic: {' -> '.join(cycle)}")


class NoAnchorOnPath(OntoweaveError):
    pass
