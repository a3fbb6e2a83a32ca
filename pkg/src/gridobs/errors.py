"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: any GridObsError is a
validation failure (exit 1); plain OSError is an I/O failure (exit 2).
"""


class GridObsError(Exception):
    """Base class for all validation and domain errors."""


class TaxonomyError(GridObsError):
    """Unknown token, or a (component, quantity) pair outside the applicability map."""


class MatrixValidationError(GridObsError):
    """A comparison matrix violates positivity, reciprocity, or the unit diagonal."""


class UnsupportedSizeError(GridObsError):
    """Matrix size outside the supported 2..10 range for consistency checking."""


class AggregationError(GridObsError):
    """Priority vectors with mismatched item lists, or bad expert weights."""


class IncompleteQuestionnaireError(GridObsError):
    """An expert's questionnaire is missing one or more comparison contexts."""

    def __init__(self, message, gaps=None):
        super().__init__(message)
        self.gaps = list(gaps or [])


class TableLookupError(GridObsError):
    """A weight-table cell required for scoring is missing."""


class LoadError(GridObsError):
    """Malformed input file; carries the offending line when known."""

    def __init__(self, message, path=None, line=None):
        super().__init__(message)
        self.path = path
        self.line = line

    def __str__(self):
        loc = ""
        if self.path is not None:
            loc = f"{self.path}:"
            if self.line is not None:
                loc += f"{self.line}:"
            loc += " "
        return loc + super().__str__()


class ReconciliationError(GridObsError):
    """Snapshot records that do not reconcile against the inventory."""


class UndefinedScoreError(GridObsError):
    """Score requested over an empty scope or a zero weighted total."""


class ComparisonMismatchError(GridObsError):
    """Snapshot comparison over different area sets."""

    def __init__(self, message, missing_before=(), missing_after=()):
        super().__init__(message)
        self.missing_before = sorted(missing_before)
        self.missing_after = sorted(missing_after)


class ConflictError(GridObsError):
    """Attempt to persist a snapshot id that already exists."""
