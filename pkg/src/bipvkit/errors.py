"""Exception hierarchy shared across the toolkit.

Every error carries an ``exit_code`` so the CLI can map failures onto its
exit-code contract: 1 validation, 2 schema, 3 missing input, 4 computation.
"""


class BipvError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ValidationError(BipvError):
    """Input values violate a documented invariant."""

    exit_code = 1


class InvalidParameterError(ValidationError):
    """A function argument is outside its documented domain."""


class SchemaError(BipvError):
    """A file does not match its interchange schema."""

    exit_code = 2


class CorruptMaskError(SchemaError):
    """An RLE mask is internally inconsistent (run sum, run shape)."""


class MissingInputError(BipvError):
    """A referenced file, tile, or table cell is absent."""

    exit_code = 3


class ComputationError(BipvError):
    """A result is mathematically undefined for the given inputs."""

    exit_code = 4


class UndefinedMetricError(ComputationError):
    """Metric denominator is zero (no evaluated pixels)."""


class UndefinedLcoeError(ComputationError):
    """Discounted lifetime energy is zero."""
