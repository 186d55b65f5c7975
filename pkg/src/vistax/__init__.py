"""vistax: a genus-differentia image-annotation workbench.

Schemas are authored in a small DSL (or programmatically), validated against
a canon suite, frozen into a controlled vocabulary, and then driven by
annotation sessions whose labels are always derived from the frozen schema,
never typed. Agreement metrics and a synthetic-annotator harness quantify
how much the property-grounded workflow narrows annotator disagreement.
"""

from .canons import Finding, ValidationReport, freeze, validate
from .errors import VistaxError
from .labels import (
    AlignmentMiss,
    AlignmentReport,
    canonical_label,
    check_gloss_alignment,
    synthesize_label,
)
from .model import (
    BOOLEAN,
    ENUM,
    INTEGER,
    ClassificationNode,
    ContextProfile,
    DifferentiaConstraint,
    LexicalBinding,
    PropertyDef,
    ResolutionResult,
    Schema,
)
from .registry import ConceptRegistry
from .resolve import resolve

__all__ = [
    "BOOLEAN",
    "ENUM",
    "INTEGER",
    "AlignmentMiss",
    "AlignmentReport",
    "ClassificationNode",
    "ConceptRegistry",
    "ContextProfile",
    "DifferentiaConstraint",
    "Finding",
    "LexicalBinding",
    "PropertyDef",
    "ResolutionResult",
    "Schema",
    "ValidationReport",
    "VistaxError",
    "canonical_label",
    "check_gloss_alignment",
    "freeze",
    "resolve",
    "synthesize_label",
    "validate",
]

__version__ = "0.1.0"
