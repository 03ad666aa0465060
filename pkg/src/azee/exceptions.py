#!/usr/bin/env python3
"""Exceptions raised by the azee pipeline.

Every exception is also a builtin type, so callers which do not care
about azee can keep catching ``ValueError`` or ``KeyError``.
"""


class AzeeError(Exception):
    """Base class of all azee errors."""


class AzeeSyntaxError(AzeeError, ValueError):
    """Malformed grammar, expression or mapping source.

    Parameters
    ----------
    message : str
        What went wrong.
    source : str
        Name of the source (file name or a ``<...>`` placeholder).
    line, column : int
        1-based position of the offending token.
    expected : tuple(str), optional
        The tokens which would have been accepted.
    """

    def __init__(self, message, source="<string>", line=0, column=0, expected=()):
        self.message = message
        self.source = source
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        super().__init__(str(self))

    def __str__(self):
        text = f"{self.source}:{self.line}:{self.column}: {self.message}"
        if self.expected:
            text += " (expected {})".format(", ".join(self.expected))
        return text


class GrammarError(AzeeError, ValueError):
    """A grammar violates its invariants."""

    def __init__(self, diagnostics, source="<string>"):
        self.diagnostics = tuple(diagnostics)
        self.source = source
        lines = [f"{source}:{d}" for d in self.diagnostics]
        super().__init__("\n".join(lines))


class UnknownRuleError(AzeeError, KeyError):
    """No rule with the requested header."""

    def __init__(self, header, suggestion=None):
        self.header = header
        self.suggestion = suggestion

    def __str__(self):
        text = f"unknown rule header '{self.header}'"
        if self.suggestion is not None:
            text += f", did you mean '{self.suggestion}'?"
        return text


class ExpressionError(AzeeError, ValueError):
    """An expression does not check against the grammar."""

    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class ResolveError(AzeeError):
    """The timing constraints of a score can not be resolved."""


class ScoreConflictError(ResolveError):
    """Two blocks are forced to overlap on one articulator track."""

    def __init__(self, articulator, first, second):
        self.articulator = articulator
        self.first = first
        self.second = second
        super().__init__(
            f"articulator conflict on '{articulator}': "
            f"'{first.state}' [{first.start_ms}, {first.end_ms}) from {first.path} "
            f"overlaps '{second.state}' [{second.start_ms}, {second.end_ms}) "
            f"from {second.path}"
        )

    @property
    def paths(self):
        """The provenance paths of both blocks"""
        return self.first.path, self.second.path


class ConstraintCycleError(ResolveError):
    """The constraint graph is not acyclic."""

    def __init__(self, points):
        self.points = tuple(points)
        super().__init__(
            "constraint cycle through sync points "
            + " -> ".join(str(p) for p in self.points)
        )


class InconsistentConstraintsError(ResolveError):
    """The constraint system has no (positive) solution."""


class MappingError(AzeeError, ValueError):
    """A mapping file is well-formed but semantically invalid."""

    def __init__(self, message, source="<string>", line=0):
        self.source = source
        self.line = line
        super().__init__(f"{source}:{line}: {message}")
