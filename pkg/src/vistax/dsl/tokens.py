"""Lexer for the schema definition language.

The language is line-oriented: statements end at a newline, blocks are
delimited with braces, comments run from ``#`` to end of line. String
literals are double-quoted with the usual escapes and adjacent literals
concatenate (long glosses continue onto the next line when it starts with
another string literal).
"""

from __future__ import annotations

from dataclasses import dataclass

IDENT = "IDENT"
INT = "INT"
STRING = "STRING"
LBRACE = "LBRACE"
RBRACE = "RBRACE"
EQUALS = "EQUALS"
RANGE = "RANGE"
NEWLINE = "NEWLINE"
EOF = "EOF"

_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t", "r": "\r"}


@dataclass(frozen=True)
class SourceSpan:
    """1-based line/column plus a byte offset range, start <= end."""

    line: int
    column: int
    start: int
    end: int

    def render(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: SourceSpan
    expected: tuple[str, ...] = ()
    code: str | None = None

    def render(self) -> str:
        return f"{self.span.render()}: {self.severity}: {self.message}"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    value: object
    span: SourceSpan


class Lexer:
    def __init__(self, text: str):
        self.text = text
        # byte offset of each character, so spans can point into the raw file
        offsets = [0]
        for ch in text:
            offsets.append(offsets[-1] + len(ch.encode("utf-8")))
        self._byte_at = offsets
        self.pos = 0
        self.line = 1
        self.col = 1
        self.diagnostics: list[ParseDiagnostic] = []

    def _span(self, start_pos: int, start_line: int, start_col: int, end_pos: int) -> SourceSpan:
        return SourceSpan(line=start_line, column=start_col,
                          start=self._byte_at[start_pos], end=self._byte_at[end_pos])

    def _error(self, message: str, start_pos: int, start_line: int, start_col: int):
        self.diagnostics.append(ParseDiagnostic(
            severity="error", message=message,
            span=self._span(start_pos, start_line, start_col, self.pos)))

    def _advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        text = self.text
        n = len(text)
        while self.pos < n:
            start_pos, start_line, start_col = self.pos, self.line, self.col
            ch = text[self.pos]
            if ch == "#":
                while self.pos < n and text[self.pos] != "\n":
                    self._advance()
                continue
            if ch == "\n":
                self._advance()
                if out and out[-1].kind != NEWLINE:
                    out.append(Token(NEWLINE, "\n", None,
                                     self._span(start_pos, start_line, start_col, self.pos)))
                continue
            if ch in " \t\r":
                self._advance()
                continue
            if ch == "{":
                self._advance()
                out.append(Token(LBRACE, "{", None,
                                 self._span(start_pos, start_line, start_col, self.pos)))
                continue
            if ch == "}":
                self._advance()
                out.append(Token(RBRACE, "}", None,
                                 self._span(start_pos, start_line, start_col, self.pos)))
                continue
            if ch == "=":
                self._advance()
                out.append(Token(EQUALS, "=", None,
                                 self._span(start_pos, start_line, start_col, self.pos)))
                continue
            if ch == "." and self.pos + 1 < n and text[self.pos + 1] == ".":
                self._advance()
                self._advance()
                out.append(Token(RANGE, "..", None,
                                 self._span(start_pos, start_line, start_col, self.pos)))
                continue
            if ch == '"':
                token = self._string(start_pos, start_line, start_col)
                if token is not None:
                    out.append(token)
                continue
            if ch.isdigit() or (ch == "-" and self.pos + 1 < n and text[self.pos + 1].isdigit()):
                self._advance()
                while self.pos < n and text[self.pos].isdigit():
                    self._advance()
                raw = text[start_pos:self.pos]
                out.append(Token(INT, raw, int(raw),
                                 self._span(start_pos, start_line, start_col, self.pos)))
                continue
            if ch.isalpha() or ch == "_":
                self._advance()
                while self.pos < n and (text[self.pos].isalnum() or text[self.pos] == "_"):
                    self._advance()
                raw = text[start_pos:self.pos]
                out.append(Token(IDENT, raw, raw,
                                 self._span(start_pos, start_line, start_col, self.pos)))
                continue
            self._advance()
            self._error(f"unexpected character {ch!r}", start_pos, start_line, start_col)
        if out and out[-1].kind != NEWLINE:
            out.append(Token(NEWLINE, "\n", None,
                             self._span(n, self.line, self.col, n)))
        out.append(Token(EOF, "", None, self._span(n, self.line, self.col, n)))
        return out

    def _string(self, start_pos: int, start_line: int, start_col: int) -> Token | None:
        self._advance()  # opening quote
        chunks: list[str] = []
        text = self.text
        n = len(text)
        while self.pos < n:
            ch = text[self.pos]
            if ch == '"':
                self._advance()
                return Token(STRING, text[start_pos:self.pos], "".join(chunks),
                             self._span(start_pos, start_line, start_col, self.pos))
            if ch == "\n":
                break
            if ch == "\\":
                self._advance()
                if self.pos >= n:
                    break
                esc = self._advance()
                if esc in _ESCAPES:
                    chunks.append(_ESCAPES[esc])
                else:
                    self._error(f"unknown escape sequence \\{esc}",
                                start_pos, start_line, start_col)
                continue
            chunks.append(self._advance())
        self._error("unterminated string literal", start_pos, start_line, start_col)
        return None
