"""Exception hierarchy for the workbench.

Every exception carries a stable ``code`` string that is used verbatim in
wire envelopes, CLI output and audit payloads, so renaming a class never
changes the externally visible error vocabulary.
"""

from __future__ import annotations


class VistaxError(Exception):
    """Base class; ``code`` is the stable machine-readable error name."""

    code = "Internal"

    def __init__(self, message: str = "", locus: str | None = None):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.locus = locus


# --- schema authoring / lifecycle ---

class FrozenSchemaError(VistaxError):
    code = "FrozenSchema"


class DuplicatePropertyError(VistaxError):
    code = "DuplicateProperty"


class EmptyDomainError(VistaxError):
    code = "EmptyDomain"


class UnknownParentError(VistaxError):
    code = "UnknownParent"


class UnknownPropertyError(VistaxError):
    code = "UnknownProperty"


class UnknownNodeError(VistaxError):
    code = "UnknownNode"


class ValueOutOfDomainError(VistaxError):
    code = "ValueOutOfDomain"


class ValidationFailedError(VistaxError):
    code = "ValidationFailed"

    def __init__(self, report, message: str = ""):
        super().__init__(message or "schema has validation errors")
        self.report = report


class SchemaNotFrozenError(VistaxError):
    code = "SchemaNotFrozen"


class NoBindingError(VistaxError):
    code = "NoBinding"


class AlreadyAssignedError(VistaxError):
    code = "AlreadyAssigned"


# --- annotation sessions ---

class UnknownImageError(VistaxError):
    code = "UnknownImage"


class InvalidBBoxError(VistaxError):
    code = "InvalidBBox"


class UnknownRegionError(VistaxError):
    code = "UnknownRegion"


class RegionFinalizedError(VistaxError):
    code = "RegionFinalized"


class NotAssertedError(VistaxError):
    code = "NotAsserted"


class PartialNotAcceptedError(VistaxError):
    code = "PartialNotAccepted"


class EmptyAssertionsError(VistaxError):
    code = "EmptyAssertions"


# --- agreement metrics ---

class MixedSchemaVersionsError(VistaxError):
    code = "MixedSchemaVersions"


class NoComparableItemsError(VistaxError):
    code = "NoComparableItems"


class NoSharedItemsError(VistaxError):
    code = "NoSharedItems"


class NoEligibleItemsError(VistaxError):
    code = "NoEligibleItems"


class MismatchedItemUniverseError(VistaxError):
    code = "MismatchedItemUniverse"


# --- simulation ---

class EmptyPoolError(VistaxError):
    code = "EmptyPool"


# --- persistence ---

class CorruptFileError(VistaxError):
    code = "CorruptFile"


class VersionMismatchError(VistaxError):
    code = "VersionMismatch"


class UnknownSchemaStampError(VistaxError):
    code = "UnknownSchemaStamp"


class InconsistentRecordError(VistaxError):
    code = "InconsistentRecord"

    def __init__(self, message: str = "", inconsistencies=None):
        super().__init__(message)
        self.inconsistencies = list(inconsistencies or [])
