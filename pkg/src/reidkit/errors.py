"""Exception types shared across the toolkit.

All domain errors derive from ReidkitError so the CLI can map them to a
single nonzero exit code; usage errors are raised as BadValue and exit
differently (see cli module).
"""


class ReidkitError(Exception):
    """Base class for every error raised by this package."""


# file ingestion / corpus
class BadMagic(ReidkitError):
    pass


class TruncatedFile(ReidkitError):
    pass


class DimMismatch(ReidkitError):
    pass


class MissingField(ReidkitError):
    pass


class DuplicateRecordId(ReidkitError):
    pass


class RowCountMismatch(ReidkitError):
    pass


class UnknownTag(ReidkitError):
    pass


class BadValue(ReidkitError):
    """Invalid parameter or field value (also used for CLI flag values)."""


# metrics
class NonFiniteInput(ReidkitError):
    pass


class EmptyGallery(ReidkitError):
    pass


class EmptyGroup(ReidkitError):
    pass


class ZeroVector(ReidkitError):
    pass


class NoEvaluableQueries(ReidkitError):
    pass


class EmptyScoreList(ReidkitError):
    pass


# mining / training
class InsufficientIdentities(ReidkitError):
    pass


class NoNegativesInBatch(ReidkitError):
    pass


class DegenerateBatch(ReidkitError):
    pass


class DegenerateDistance(ReidkitError):
    pass


class ShapeMismatch(ReidkitError):
    pass


# image operations
class UnreachableCoverage(ReidkitError):
    pass


class BadParameter(ReidkitError):
    pass


# reporting
class KeyMismatch(ReidkitError):
    pass
