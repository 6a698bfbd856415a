"""Exception types shared across the package.

Every CLI-visible failure maps to one of these; the CLI turns them into
distinct exit codes (see cli.EXIT_CODES).
"""


class WalkstoreError(Exception):
    """Base class for all walkstore errors."""


class FormatError(WalkstoreError):
    """A file or blob could not be parsed (bad magic, version, JSON, ...)."""


class UnsupportedGraphError(WalkstoreError):
    """The graph does not meet the preconditions of the requested store."""


class InvalidWalkError(WalkstoreError):
    """A vertex sequence is not a walk on the given graph."""


class RangeError(WalkstoreError):
    """An index, key or value is outside its declared range."""


class ParameterError(WalkstoreError):
    """A build parameter is invalid (zero block size, K_min < 2, ...)."""


class UnsupportedOperationError(WalkstoreError):
    """The operation is not available for this configuration (e.g. append
    on a spill-tree array)."""


class GenerationError(WalkstoreError):
    """Walk generation failed (dead-end vertex, empty walk set)."""


class ResourceError(WalkstoreError):
    """A configured resource limit would be exceeded."""
