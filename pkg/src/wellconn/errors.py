"""Exception types shared across the package."""


class WellconnError(Exception):
    """Base class for all errors raised by this package."""


class EdgelistParseError(WellconnError):
    """A line of an edgelist file could not be parsed."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"edgelist line {line_number}: {message}")
        self.line_number = line_number


class ClusteringParseError(WellconnError):
    """A line of a clustering file could not be parsed, or assignments conflict."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"clustering line {line_number}: {message}")
        self.line_number = line_number


class ContractViolation(WellconnError):
    """An operation was called outside its stated preconditions."""


class UniverseMismatch(WellconnError):
    """Two clusterings (or a clustering and a graph) cover different node sets."""


class UnitMismatch(WellconnError):
    """Description-length values with different unit tags were combined."""


class TreatmentError(WellconnError):
    """A treatment failed while processing a cluster."""


class ExternalClustererError(TreatmentError):
    """The external re-clustering command failed or returned unusable output."""
