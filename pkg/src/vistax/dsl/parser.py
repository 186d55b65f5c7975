"""Hand-written recursive descent parser with statement-level recovery.

On a syntax error inside a block the parser records a diagnostic, skips to
the end of the offending line (or the block's closing brace) and keeps
going, so one pass reports every independent mistake. Name resolution
(constraints referencing undeclared properties, duplicate declarations)
runs as a post-pass over the whole document and also reports spans.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import ConstraintDecl, NodeDecl, PropertyDecl, SchemaDocument
from .tokens import (
    EOF,
    EQUALS,
    IDENT,
    INT,
    LBRACE,
    NEWLINE,
    RANGE,
    RBRACE,
    STRING,
    Lexer,
    ParseDiagnostic,
    SourceSpan,
    Token,
)


@dataclass
class ParseResult:
    document: SchemaDocument | None
    diagnostics: list[ParseDiagnostic]

    @property
    def ok(self) -> bool:
        return (self.document is not None
                and not any(d.severity == "error" for d in self.diagnostics))


class _SyntaxError(Exception):
    def __init__(self, message: str, span: SourceSpan, expected: tuple[str, ...] = ()):
        self.message = message
        self.span = span
        self.expected = expected


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics: list[ParseDiagnostic] = []

    # --- token plumbing ---

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind == kind and (text is None or tok.text == text):
            return self.advance()
        wanted = text if text is not None else kind
        shown = tok.text if tok.text else tok.kind
        raise _SyntaxError(f"expected {wanted!r}, found {shown!r}"
                           + (f" in {what}" if what else ""),
                           tok.span, expected=(wanted,))

    def keyword(self, word: str, what: str | None = None) -> Token:
        return self.expect(IDENT, word, what)

    def error(self, message: str, span: SourceSpan, expected: tuple[str, ...] = ()):
        self.diagnostics.append(ParseDiagnostic(severity="error", message=message,
                                                span=span, expected=expected))

    def skip_newlines(self):
        while self.at(NEWLINE):
            self.advance()

    def end_statement(self):
        if self.at(NEWLINE):
            self.advance()
        elif not self.at(RBRACE) and not self.at(EOF):
            tok = self.peek()
            raise _SyntaxError(f"expected end of line, found {tok.text!r}",
                               tok.span, expected=("NEWLINE",))

    def recover_to_line_end(self):
        """Panic-mode recovery: drop tokens to the end of the current line,
        without consuming a closing brace so block structure survives."""
        while not self.at(NEWLINE) and not self.at(RBRACE) and not self.at(EOF):
            if self.at(LBRACE):
                # skip a whole nested block introduced by the broken statement
                depth = 0
                while not self.at(EOF):
                    if self.at(LBRACE):
                        depth += 1
                    elif self.at(RBRACE):
                        depth -= 1
                        if depth == 0:
                            self.advance()
                            break
                    self.advance()
                continue
            self.advance()
        if self.at(NEWLINE):
            self.advance()

    # --- grammar ---

    def parse_document(self) -> SchemaDocument | None:
        self.skip_newlines()
        if self.at(EOF):
            self.error("expected schema header", self.peek().span, expected=("schema",))
            return None
        head = self.peek()
        if not self.at(IDENT, "schema"):
            self.error("expected schema header", head.span, expected=("schema",))
            return None
        self.advance()
        try:
            name_tok = self.expect(IDENT, what="schema header")
            self.expect(LBRACE, what="schema header")
            self.skip_newlines()
        except _SyntaxError as exc:
            self.error(exc.message, exc.span, exc.expected)
            return None
        doc = SchemaDocument(schema_id=name_tok.value, context_name=name_tok.value,
                             span=head.span)
        properties: list[PropertyDecl] = []
        top_nodes: list[NodeDecl] = []
        self.skip_newlines()
        while not self.at(RBRACE) and not self.at(EOF):
            try:
                tok = self.peek()
                if self.at(IDENT, "context"):
                    self.parse_context(doc)
                elif self.at(IDENT, "registry"):
                    self.parse_registry(doc)
                elif self.at(IDENT, "property"):
                    properties.append(self.parse_property())
                elif self.at(IDENT, "node"):
                    top_nodes.append(self.parse_node())
                else:
                    raise _SyntaxError(
                        f"expected declaration, found {tok.text!r}", tok.span,
                        expected=("context", "registry", "property", "node"))
            except _SyntaxError as exc:
                self.error(exc.message, exc.span, exc.expected)
                self.recover_to_line_end()
            self.skip_newlines()
        if self.at(RBRACE):
            self.advance()
            self.skip_newlines()
            if not self.at(EOF):
                self.error("unexpected input after schema block",
                           self.peek().span)
        else:
            self.error("unclosed schema block", self.peek().span, expected=("}",))
        doc.properties = tuple(properties)
        if len(top_nodes) == 1:
            doc.root = top_nodes[0]
        elif not top_nodes:
            self.error("schema declares no root node", doc.span or self.peek().span)
        else:
            self.error("schema must declare exactly one top-level node",
                       top_nodes[1].span or self.peek().span)
            doc.root = top_nodes[0]
        return doc

    def parse_context(self, doc: SchemaDocument):
        self.keyword("context")
        self.expect(LBRACE, what="context block")
        self.skip_newlines()
        while not self.at(RBRACE) and not self.at(EOF):
            try:
                tok = self.peek()
                if self.at(IDENT, "name"):
                    self.advance()
                    doc.context_name = self.parse_string_value("context name")
                elif self.at(IDENT, "purpose"):
                    self.advance()
                    doc.context_purpose = self.parse_string_value("context purpose")
                elif self.at(IDENT, "language"):
                    self.advance()
                    doc.context_language = self.expect(IDENT, what="context language").value
                else:
                    raise _SyntaxError(f"expected context field, found {tok.text!r}",
                                       tok.span, expected=("name", "purpose", "language"))
                self.end_statement()
            except _SyntaxError as exc:
                self.error(exc.message, exc.span, exc.expected)
                self.recover_to_line_end()
            self.skip_newlines()
        self.expect(RBRACE, what="context block")
        self.end_statement()

    def parse_registry(self, doc: SchemaDocument):
        self.keyword("registry")
        self.keyword("base", what="registry statement")
        base_tok = self.expect(INT, what="registry statement")
        if base_tok.value < 1:
            self.error("registry base must be a positive integer", base_tok.span)
        else:
            doc.registry_base = base_tok.value
        self.end_statement()

    def parse_property(self) -> PropertyDecl:
        head = self.keyword("property")
        name_tok = self.expect(IDENT, what="property declaration")
        kind_tok = self.expect(IDENT, what="property declaration")
        int_range = None
        if kind_tok.text == "enum":
            kind = "enum"
        elif kind_tok.text == "bool":
            kind = "boolean"
        elif kind_tok.text == "int":
            kind = "integer"
            lo = self.expect(INT, what="integer range").value
            self.expect(RANGE, what="integer range")
            hi = self.expect(INT, what="integer range").value
            int_range = (lo, hi)
        else:
            raise _SyntaxError(f"unknown property kind {kind_tok.text!r}",
                               kind_tok.span, expected=("enum", "int", "bool"))
        self.expect(LBRACE, what="property declaration")
        self.skip_newlines()
        phrases: list[tuple[object, str]] = []
        while not self.at(RBRACE) and not self.at(EOF):
            try:
                tok = self.peek()
                if tok.kind == INT:
                    value = self.advance().value
                elif tok.kind == IDENT:
                    value = self.advance().value
                else:
                    raise _SyntaxError(f"expected domain value, found {tok.text!r}",
                                       tok.span, expected=(IDENT, INT))
                phrase = self.parse_string_value("phrase")
                phrases.append((value, phrase))
                self.end_statement()
            except _SyntaxError as exc:
                self.error(exc.message, exc.span, exc.expected)
                self.recover_to_line_end()
            self.skip_newlines()
        self.expect(RBRACE, what="property declaration")
        self.end_statement()
        return PropertyDecl(name=name_tok.value, kind=kind, int_range=int_range,
                            phrases=tuple(phrases), span=name_tok.span)

    def parse_node(self) -> NodeDecl:
        self.keyword("node")
        name_tok = self.expect(IDENT, what="node declaration")
        self.expect(LBRACE, what="node declaration")
        self.skip_newlines()
        node = NodeDecl(name=name_tok.value, span=name_tok.span)
        constraints: list[ConstraintDecl] = []
        children: list[NodeDecl] = []
        while not self.at(RBRACE) and not self.at(EOF):
            try:
                tok = self.peek()
                if self.at(IDENT, "when"):
                    self.advance()
                    constraints.extend(self.parse_when())
                elif self.at(IDENT, "label"):
                    self.advance()
                    node.label = self.parse_string_value("label")
                    if self.at(IDENT, "lang"):
                        self.advance()
                        node.language = self.expect(IDENT, what="label language").value
                    self.end_statement()
                elif self.at(IDENT, "gloss"):
                    self.advance()
                    node.gloss = self.parse_string_value("gloss")
                    self.end_statement()
                elif self.at(IDENT, "synonyms"):
                    # a list of single literals; concatenation would make
                    # `"a" "b"` ambiguous here
                    self.advance()
                    syns = [self.expect(STRING, what="synonym").value]
                    while self.at(STRING):
                        syns.append(self.advance().value)
                    node.synonyms = tuple(syns)
                    self.end_statement()
                elif self.at(IDENT, "id"):
                    self.advance()
                    node.concept_id = self.expect(INT, what="concept id").value
                    self.end_statement()
                elif self.at(IDENT, "node"):
                    children.append(self.parse_node())
                else:
                    raise _SyntaxError(
                        f"expected node field, found {tok.text!r}", tok.span,
                        expected=("when", "label", "gloss", "synonyms", "id", "node"))
            except _SyntaxError as exc:
                self.error(exc.message, exc.span, exc.expected)
                self.recover_to_line_end()
            self.skip_newlines()
        self.expect(RBRACE, what="node declaration")
        self.end_statement()
        node.constraints = tuple(constraints)
        node.children = tuple(children)
        return node

    def parse_when(self) -> list[ConstraintDecl]:
        out = []
        while True:
            prop_tok = self.expect(IDENT, what="constraint")
            self.expect(EQUALS, what="constraint")
            val_tok = self.peek()
            if val_tok.kind in (IDENT, INT):
                self.advance()
            else:
                raise _SyntaxError(f"expected constraint value, found {val_tok.text!r}",
                                   val_tok.span, expected=(IDENT, INT))
            out.append(ConstraintDecl(property=prop_tok.value, value=val_tok.value,
                                      span=prop_tok.span))
            if self.at(IDENT, "and"):
                self.advance()
                continue
            break
        self.end_statement()
        return out

    def parse_string_value(self, what: str) -> str:
        """One or more adjacent string literals, concatenated. A literal at
        the very start of the next line continues the value."""
        first = self.expect(STRING, what=what)
        parts = [first.value]
        while True:
            if self.at(STRING):
                parts.append(self.advance().value)
            elif self.at(NEWLINE) and self.peek(1).kind == STRING:
                self.advance()
                parts.append(self.advance().value)
            else:
                break
        return "".join(parts)


def _check_names(doc: SchemaDocument, diagnostics: list[ParseDiagnostic]):
    def err(message, span):
        diagnostics.append(ParseDiagnostic(severity="error", message=message,
                                           span=span or SourceSpan(1, 1, 0, 0)))

    declared = {}
    for prop in doc.properties:
        if prop.name in declared:
            err(f"property {prop.name!r} declared twice", prop.span)
        declared[prop.name] = prop
    seen_nodes = {}
    for node in doc.iter_nodes():
        if node.name in seen_nodes:
            err(f"node {node.name!r} declared twice", node.span)
        seen_nodes[node.name] = node
        for c in node.constraints:
            if c.property not in declared:
                err(f"constraint references undeclared property {c.property!r}", c.span)
        if node.label is not None and node.gloss is None:
            err(f"node {node.name!r} has a label but no gloss", node.span)
        if node.language is None:
            node.language = doc.context_language if node.label is not None else None


def parse(text: str) -> ParseResult:
    lexer = Lexer(text)
    tokens = lexer.tokens()
    parser = _Parser(tokens)
    document = parser.parse_document()
    diagnostics = list(lexer.diagnostics) + parser.diagnostics
    if document is not None:
        _check_names(document, diagnostics)
    return ParseResult(document=document, diagnostics=diagnostics)
