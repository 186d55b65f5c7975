from .ast import ConstraintDecl, NodeDecl, PropertyDecl, SchemaDocument
from .lower import LowerResult, compile_text, lower
from .parser import ParseResult, parse
from .serializer import serialize
from .tokens import ParseDiagnostic, SourceSpan

__all__ = [
    "ConstraintDecl",
    "LowerResult",
    "NodeDecl",
    "ParseDiagnostic",
    "ParseResult",
    "PropertyDecl",
    "SchemaDocument",
    "SourceSpan",
    "compile_text",
    "lower",
    "parse",
    "serialize",
]
