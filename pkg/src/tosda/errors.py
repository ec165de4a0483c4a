"""Exception types shared across the package."""


class TosdaError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(TosdaError, ValueError):
    """An argument is outside its documented domain."""


class GeometryInconsistencyError(TosdaError, ValueError):
    """A requested geometry is self-contradictory (duplicate positions,
    cardinality mismatch, overlapping sub-arrays).

    ``segments`` optionally carries the offending segment description.
    """

    def __init__(self, message, segments=None):
        super().__init__(message)
        self.segments = segments


class UnsupportedSizeError(TosdaError, ValueError):
    """A sensor count below the variant's feasible minimum was requested."""

    def __init__(self, message, minimum=None):
        super().__init__(message)
        self.minimum = minimum


class ArrayFileError(TosdaError, ValueError):
    """An array position file could not be read."""


class ArrayParseError(ArrayFileError):
    """The file is not syntactically valid (bad JSON, missing keys)."""


class ArrayValidationError(ArrayFileError):
    """The file parsed but its content violates array invariants."""


class CapacityExceededError(TosdaError, ValueError):
    """More sources requested than the virtual array can resolve."""


class InternalConsistencyError(TosdaError, RuntimeError):
    """Two views of the same quantity disagree; indicates a bug or a
    corrupted intermediate, never bad user input."""
