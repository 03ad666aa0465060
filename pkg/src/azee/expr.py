#!/usr/bin/env python3
"""
AZee expressions: functional trees of rule applications.

Rule headers are used as operators whose arguments are the rule
parameters, un-modelled content is described in square brackets::

    info-about([about 200 people], dead())

"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
import logging
import re
from typing import Tuple, Union

from .definitions import META
from .exceptions import AzeeSyntaxError
from .grammar import Diagnostic, Overlay, Posture, Seq, Slot, overlay_spans
from .tools import format_path, nearest_match, unfold_path

log = logging.getLogger("azee.expr")

_ELLIPSIS_WORDS = (
    "about",
    "200",
    "people",
    "last",
    "Wednesday",
    "morning,",
    "huge",
    "possibly",
    "caused",
    "by",
)


@dataclass(frozen=True)
class Apply:
    """Application of the rule `header` to `args`"""

    header: str
    args: Tuple["Expression", ...] = ()
    line: int = field(default=0, compare=False, repr=False)
    column: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class EllipsisNode:
    """A free text description standing in for un-modelled content"""

    text: str
    line: int = field(default=0, compare=False, repr=False)
    column: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("empty ellipsis")
        if self.text != self.text.strip():
            raise ValueError(f"ellipsis text has surrounding whitespace: {self.text!r}")
        if "]" in self.text or "\n" in self.text:
            raise ValueError("ellipsis text can not contain ']' or newlines")

    @property
    def args(self):
        return ()


Expression = Union[Apply, EllipsisNode]

_TOKEN_RE = re.compile(
    r"""
    (?P<space>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<ellipsis>\[[^\]\n]*\])
  | (?P<header>[A-Za-z][A-Za-z0-9-]*)
  | (?P<punct>[(),])
    """,
    re.VERBOSE,
)


class _ExpressionParser:
    def __init__(self, text, source):
        self.text = text
        self.source = source
        self.tokens = self._tokenize()
        self.pos = 0

    def location(self, offset):
        line = self.text.count("\n", 0, offset) + 1
        column = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return line, column

    def error(self, message, offset, expected=()):
        line, column = self.location(offset)
        return AzeeSyntaxError(message, self.source, line, column, expected)

    def _tokenize(self):
        tokens = []
        pos = 0
        while pos < len(self.text):
            match = _TOKEN_RE.match(self.text, pos)
            if match is None:
                char = self.text[pos]
                if char == "[":
                    raise self.error("unbalanced '[' (ellipsis is never closed)", pos)
                if char == "]":
                    raise self.error("unbalanced ']'", pos)
                raise self.error(f"unexpected character '{char}'", pos)
            if match.lastgroup not in ("space", "comment"):
                tokens.append((match.lastgroup, match.group(), pos))
            pos = match.end()
        return tokens

    def peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return None

    def describe(self, token):
        return "end of input" if token is None else f"'{token[1]}'"

    def offset_of(self, token):
        return len(self.text) if token is None else token[2]

    def parse(self):
        expr = self.expression(opener=None)
        token = self.peek()
        if token is not None:
            raise self.error(
                f"unexpected {self.describe(token)} after the expression",
                token[2],
                ("end of input",),
            )
        return expr

    def expression(self, opener):
        token = self.peek()
        if token is None or token[0] not in ("header", "ellipsis"):
            message = f"unexpected {self.describe(token)}"
            if opener is not None:
                line, column = self.location(opener)
                message += f" inside '(' opened at {line}:{column}"
            raise self.error(
                message, self.offset_of(token), ("rule header", "'[ellipsis]'")
            )
        self.pos += 1
        kind, value, offset = token
        line, column = self.location(offset)
        if kind == "ellipsis":
            text = value[1:-1].strip()
            if not text:
                raise self.error("empty ellipsis", offset)
            return EllipsisNode(text, line=line, column=column)

        paren = self.peek()
        if paren is None or paren[1] != "(":
            raise self.error(
                f"unexpected {self.describe(paren)}", self.offset_of(paren), ("'('",)
            )
        self.pos += 1
        args = []
        token = self.peek()
        if token is not None and token[1] == ")":
            self.pos += 1
            return Apply(value, (), line=line, column=column)
        while True:
            args.append(self.expression(opener=paren[2]))
            token = self.peek()
            if token is not None and token[1] == ",":
                self.pos += 1
                continue
            if token is not None and token[1] == ")":
                self.pos += 1
                return Apply(value, tuple(args), line=line, column=column)
            open_line, open_column = self.location(paren[2])
            raise self.error(
                f"unbalanced '(' opened at {open_line}:{open_column}: "
                f"unexpected {self.describe(token)}",
                self.offset_of(token),
                ("','", "')'"),
            )


def parse_expression(text, source="<expression>"):
    """Parse an expression.

    The parse does not need a grammar: headers are not looked up.
    Whitespace between tokens and ``#`` comments are ignored.

    Parameters
    ----------
    text : str
        Expression text, e.g. ``side-info(house(), blue())``.
    source : str, optional
        Name used in error messages.

    Returns
    -------
    Apply or EllipsisNode

    Raises
    ------
    AzeeSyntaxError
        On malformed input, unbalanced brackets and empty ellipses.
    """
    return _ExpressionParser(text, source).parse()


def iter_nodes(expr, path=()):
    """Walk an expression in pre-order, yielding ``(path, node)`` pairs"""
    yield path, expr
    for i, arg in enumerate(expr.args):
        yield from iter_nodes(arg, path + (i,))


def node_at(expr, path):
    """The node addressed by `path`"""
    return unfold_path(expr, path)


def replace_at(expr, path, node):
    """Return a copy of `expr` where the subtree at `path` is `node`"""
    if not path:
        return node
    head, rest = path[0], path[1:]
    if not isinstance(expr, Apply) or not 0 <= head < len(expr.args):
        raise IndexError(f"no node at {format_path(path)} in {render_inline(expr)}")
    args = list(expr.args)
    args[head] = replace_at(args[head], rest, node)
    return replace(expr, args=tuple(args))


def check(expr, grammar, conflicts=True):
    """Check an expression against a grammar.

    Every header must name a rule and have as many arguments as the rule
    has parameters; variadic rules (``seq``) need at least two.
    Ellipses always pass.

    With `conflicts`, an overlay covering an argument whose forms use
    the same articulator is reported as well.

    Returns
    -------
    list(Diagnostic)
        In pre-order of the offending nodes, empty iff the expression is
        well-formed.
    """
    diagnostics = []
    tracks = _TrackUse(grammar)
    for path, node in iter_nodes(expr):
        if not isinstance(node, Apply):
            continue
        subject = format_path(path)
        rule = grammar.rules.get(node.header)
        message = None
        if rule is None:
            message = f"unknown rule header '{node.header}'"
            suggestion = nearest_match(node.header, grammar.rules)
            if suggestion is not None:
                message += f", did you mean '{suggestion}'?"
        elif rule.variadic and len(node.args) < 2:
            message = (
                f"{node.header} requires at least 2 arguments, got {len(node.args)}"
            )
        elif not rule.variadic and len(node.args) != len(rule.params):
            message = (
                f"arity mismatch for {node.header}: "
                f"expected {len(rule.params)}, got {len(node.args)}"
            )
        if message is not None:
            diagnostics.append(
                Diagnostic(Diagnostic.ERROR, subject, message, node.line, node.column)
            )
        elif conflicts:
            for message in tracks.conflicts(rule, node, path):
                diagnostics.append(
                    Diagnostic(
                        Diagnostic.ERROR, subject, message, node.line, node.column
                    )
                )
    return diagnostics


def _articulators(form):
    if isinstance(form, Seq):
        used = {overlay.articulator for overlay in form.overlays}
        for item in form.items:
            used |= _articulators(item)
        return used
    if isinstance(form, (Posture, Overlay)):
        return {form.articulator}
    return set()


class _TrackUse:
    """Articulators used by the forms of each subtree"""

    def __init__(self, grammar):
        self.grammar = grammar
        self._used = {}

    def is_applicable(self, rule, node):
        if rule.variadic:
            return len(node.args) >= 2
        return len(node.args) == len(rule.params)

    def arguments(self, rule, node, slot):
        """Indices of the arguments spliced into `slot`"""
        if rule.variadic:
            return range(len(node.args))
        if slot.param not in rule.params:
            return ()
        return (rule.params.index(slot.param),)

    def used(self, node):
        key = id(node)
        if key not in self._used:
            self._used[key] = self._collect(node)
        return self._used[key]

    def _collect(self, node):
        if isinstance(node, EllipsisNode):
            return {META}
        rule = self.grammar.rules.get(node.header)
        if rule is None:
            used, args = set(), node.args
        elif self.is_applicable(rule, node):
            used = _articulators(rule.rhs)
            slotted = {
                i
                for leaf in _slots(rule.rhs)
                for i in self.arguments(rule, node, leaf)
            }
            args = [arg for i, arg in enumerate(node.args) if i in slotted]
        else:
            used, args = _articulators(rule.rhs), node.args
        for arg in args:
            used = used | self.used(arg)
        return used

    def conflicts(self, rule, node, path):
        messages = {}
        for span in overlay_spans(rule):
            overlay = span.overlay
            for leaf in span.covered:
                if not isinstance(leaf, Slot):
                    continue
                for i in self.arguments(rule, node, leaf):
                    if overlay.articulator in self.used(node.args[i]):
                        message = (
                            f"overlay {overlay.articulator} '{overlay.state}' of "
                            f"{node.header} covers {format_path(path + (i,))}, "
                            f"which also uses {overlay.articulator}"
                        )
                        messages.setdefault(message, None)
        return list(messages)


def _slots(form):
    if isinstance(form, Seq):
        for item in form.items:
            yield from _slots(item)
    elif isinstance(form, Slot):
        yield form


def render_inline(expr):
    """Canonical single line form, ``parse_expression`` reads it back"""
    if isinstance(expr, EllipsisNode):
        return f"[{expr.text}]"
    return "{}({})".format(expr.header, ", ".join(render_inline(a) for a in expr.args))


def render_tree(expr):
    """Indented functional tree, one node per line.

    >>> print(render_tree(parse_expression("side-info(house(), blue())")))
    side-info
      house
      blue
    """
    lines = []
    for path, node in iter_nodes(expr):
        label = f"[{node.text}]" if isinstance(node, EllipsisNode) else node.header
        lines.append("  " * len(path) + label)
    return "\n".join(lines)


def random_expression(
    grammar, rng, max_depth=4, headers=None, ellipsis_rate=0.0, max_args=4
):
    """Generate a random arity-correct expression.

    Parameters
    ----------
    grammar : Grammar
        Rules to draw headers from.
    rng : numpy.random.Generator
        Source of randomness, seed it for reproducible trees.
    max_depth : int, optional
        Nodes at this depth are always leaves (0-parameter rules or
        ellipses); the root is at depth 0.
    headers : iterable(str), optional
        Restrict the drawn headers, all rules by default.
    ellipsis_rate : float, optional
        Probability for any node to be an ellipsis.
    max_args : int, optional
        Upper bound of arguments for variadic rules.

    Returns
    -------
    Apply or EllipsisNode
    """
    pool = sorted(grammar.rules if headers is None else headers)
    leaves = [
        h for h in pool if not grammar.rules[h].variadic and not grammar.rules[h].params
    ]
    if not leaves:
        raise ValueError("random expressions need at least one 0-parameter rule")

    def grow(depth):
        if ellipsis_rate and rng.random() < ellipsis_rate:
            n_words = int(rng.integers(1, 4))
            words = rng.choice(_ELLIPSIS_WORDS, size=n_words)
            return EllipsisNode(" ".join(str(w) for w in words).rstrip(","))
        candidates = pool if depth < max_depth else leaves
        rule = grammar.rules[candidates[int(rng.integers(len(candidates)))]]
        if rule.variadic:
            n_args = int(rng.integers(2, max_args + 1))
        else:
            n_args = len(rule.params)
        return Apply(rule.header, tuple(grow(depth + 1) for _ in range(n_args)))

    return grow(0)
