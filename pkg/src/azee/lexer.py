#!/usr/bin/env python3
"""
Line scanner shared by the grammar (``.azgr``) and mapping (``.azmap``)
languages.

Both are line oriented: one statement per line, ``#`` starts a comment,
blocks are opened by a statement and consist of the following lines
which are indented deeper (spaces only).
"""
from collections import namedtuple
import re

from .exceptions import AzeeSyntaxError

Token = namedtuple("Token", ["kind", "value", "line", "column"])
SourceLine = namedtuple("SourceLine", ["number", "indent", "tokens", "end_column"])
Statement = namedtuple("Statement", ["line", "body"])

_TOKEN_RE = re.compile(
    r"""
    (?P<string>"[^"\n]*")
  | (?P<ellipsis>\.\.\.)
  | (?P<arrow>=>)
  | (?P<variable>\$[A-Za-z][A-Za-z0-9_-]*)
  | (?P<name>[A-Za-z][A-Za-z0-9_-]*)
  | (?P<number>[0-9]+)
  | (?P<punct>[():,/])
    """,
    re.VERBOSE,
)


def describe(token):
    """Human readable rendering of a token for error messages"""
    if token is None:
        return "end of line"
    if token.kind == "string":
        return f"string {token.value}"
    return f"'{token.value}'"


def scan(text, source="<string>"):
    """Split a source text into non-empty tokenised lines.

    Parameters
    ----------
    text : str
        The source.
    source : str, optional
        Name used in error messages.

    Returns
    -------
    list(SourceLine)

    Raises
    ------
    AzeeSyntaxError
        On tabs in the indentation, unterminated strings and characters
        which do not start any token.
    """
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.lstrip(" ")
        indent = len(raw) - len(stripped)
        if stripped.startswith("\t"):
            raise AzeeSyntaxError(
                "tabs are not allowed for indentation", source, number, indent + 1
            )
        tokens = []
        pos = indent
        while pos < len(raw):
            char = raw[pos]
            if char in " \t":
                pos += 1
                continue
            if char == "#":
                break
            match = _TOKEN_RE.match(raw, pos)
            if match is None:
                message = (
                    "unterminated string"
                    if char == '"'
                    else f"unexpected character '{char}'"
                )
                raise AzeeSyntaxError(message, source, number, pos + 1)
            value = match.group()
            if match.lastgroup == "string":
                value = value[1:-1]
            tokens.append(Token(match.lastgroup, value, number, pos + 1))
            pos = match.end()
        if tokens:
            lines.append(SourceLine(number, indent, tokens, len(raw) + 1))
    return lines


def nest(lines, source="<string>"):
    """Group scanned lines into statements with their indented bodies"""
    if not lines:
        return []
    if lines[0].indent != 0:
        raise AzeeSyntaxError("unexpected indent", source, lines[0].number, 1)
    body, _ = _block(lines, 0, 0, source)
    return body


def _block(lines, i, indent, source):
    body = []
    while i < len(lines) and lines[i].indent >= indent:
        line = lines[i]
        if line.indent != indent:
            raise AzeeSyntaxError(
                "inconsistent indentation", source, line.number, line.indent + 1
            )
        i += 1
        children = []
        if i < len(lines) and lines[i].indent > indent:
            children, i = _block(lines, i, lines[i].indent, source)
        body.append(Statement(line, children))
    return body, i


class TokenCursor:
    """Walks the tokens of a single source line"""

    def __init__(self, line, source="<string>"):
        self._line = line
        self._tokens = line.tokens
        self._pos = 0
        self.source = source

    def peek(self):
        if self._pos < len(self._tokens):
            return self._tokens[self._pos]
        return None

    def at_end(self):
        return self._pos >= len(self._tokens)

    def accept(self, kind, value=None):
        """Consume and return the next token if it matches, else None"""
        token = self.peek()
        if token is None or token.kind != kind:
            return None
        if value is not None and token.value != value:
            return None
        self._pos += 1
        return token

    def expect(self, kind, value=None, what=None):
        token = self.accept(kind, value)
        if token is None:
            raise self.error(
                f"unexpected {describe(self.peek())}", expected=(what or value or kind,)
            )
        return token

    def expect_one_of(self, kind, values):
        token = self.peek()
        if token is not None and token.kind == kind and token.value in values:
            self._pos += 1
            return token
        raise self.error(
            f"unexpected {describe(token)}", expected=tuple(f"'{v}'" for v in values)
        )

    def expect_end(self):
        if not self.at_end():
            raise self.error(
                f"unexpected {describe(self.peek())}", expected=("end of line",)
            )

    def rest(self):
        """Consume the remaining tokens as a line of their own"""
        tokens = self._tokens[self._pos :]
        self._pos = len(self._tokens)
        return SourceLine(
            self._line.number, tokens[0].column - 1, tokens, self._line.end_column
        )

    def error(self, message, expected=()):
        token = self.peek()
        column = token.column if token is not None else self._line.end_column
        return AzeeSyntaxError(
            message, self.source, self._line.number, column, expected=expected
        )
