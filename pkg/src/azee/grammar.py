#!/usr/bin/env python3
"""
AZee grammars: parametrised production rules and their form
specifications.

A rule is a ``<header, parameters, rhs>`` triplet. The right-hand side
is a small tree of form specifications:

* ``Seq`` - items articulated one after the other, separated by
  transitions, plus the overlays synchronised on them
* ``Slot`` - the forms of an argument
* ``Posture`` - a state held by one articulator
* ``Overlay`` - an articulator state running between two anchors

Grammar source text (``.azgr``)::

    rule side-info(X, Y):
      seq:
        slot X
        transition factor 1/3
        slot Y
      overlay eyebrows "raise" from end(X) to end(Y)

"""
from __future__ import annotations

from collections import namedtuple
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
import logging
import re
from types import MappingProxyType
from typing import Tuple, Union

from .definitions import articulators, duration_classes, META
from .exceptions import AzeeSyntaxError, GrammarError, UnknownRuleError
from .lexer import Statement, TokenCursor, nest, scan
from .tools import nearest_match, to_fraction

log = logging.getLogger("azee.grammar")

HEADER_RE = re.compile(r"[A-Za-z][A-Za-z0-9-]*")
PARAM_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
EDGES = ("start", "end")


class Diagnostic(
    namedtuple("Diagnostic", ["severity", "subject", "message", "line", "column"])
):
    """A located finding about a grammar or an expression.

    ``subject`` is the rule header (grammars) or the node path
    (expressions) the finding is about.
    """

    ERROR = "error"
    WARNING = "warning"

    @property
    def is_error(self):
        return self.severity == self.ERROR

    def __str__(self):
        return (
            f"{self.line}:{self.column}: {self.severity}: "
            f"[{self.subject}] {self.message}"
        )


@dataclass(frozen=True)
class TransitionSpec:
    """Multiplier of the default transition duration for one gap"""

    factor: Fraction = Fraction(1)
    line: int = field(default=0, compare=False, repr=False)
    column: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "factor", Fraction(self.factor))
        if self.factor <= 0:
            raise ValueError(f"transition factor must be positive, got {self.factor}")


@dataclass(frozen=True)
class Anchor:
    """An edge (start or end) of an item index or of a parameter's slot"""

    ref: Union[int, str]
    edge: str

    def __post_init__(self):
        if self.edge not in EDGES:
            raise ValueError(f"anchor edge must be 'start' or 'end', got {self.edge!r}")

    def __str__(self):
        return f"{self.edge}({self.ref})"


@dataclass(frozen=True)
class Slot:
    param: str
    line: int = field(default=0, compare=False, repr=False)
    column: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Posture:
    articulator: str
    state: str
    duration_class: str = "sign"
    line: int = field(default=0, compare=False, repr=False)
    column: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Overlay:
    articulator: str
    state: str
    start: Anchor
    end: Anchor
    line: int = field(default=0, compare=False, repr=False)
    column: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Seq:
    """Items in chronological order; ``transitions[k]`` is the gap after ``items[k]``"""

    items: Tuple["FormSpec", ...]
    transitions: Tuple[TransitionSpec, ...] = ()
    overlays: Tuple[Overlay, ...] = ()
    line: int = field(default=0, compare=False, repr=False)
    column: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        object.__setattr__(self, "overlays", tuple(self.overlays))


FormSpec = Union[Seq, Slot, Posture, Overlay]


@dataclass(frozen=True)
class Rule:
    header: str
    params: Tuple[str, ...]
    rhs: FormSpec
    variadic: bool = False
    line: int = field(default=0, compare=False, repr=False)
    column: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))

    @property
    def arity(self):
        """Number of parameters, the minimum number of arguments for variadic rules"""
        return 2 if self.variadic else len(self.params)


@dataclass(frozen=True)
class Grammar(Mapping):
    """A set of rules, addressable by header.

    The grammar is a read-only mapping: ``grammar["house"]`` is
    ``lookup_rule(grammar, "house")``.
    """

    rules: Mapping[str, Rule]
    source_name: str = field(default="<string>", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rules", MappingProxyType(dict(self.rules)))

    def __getitem__(self, header):
        return lookup_rule(self, header)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    def __contains__(self, header):
        return header in self.rules

    def __eq__(self, other):
        if not isinstance(other, Grammar):
            return NotImplemented
        return dict(self.rules) == dict(other.rules)

    __hash__ = None

    def __repr__(self):
        return f"<Grammar [{len(self)} rules] source='{self.source_name}'>"


def lookup_rule(grammar, header):
    """Return the rule named `header`.

    Raises
    ------
    UnknownRuleError
        With the closest existing header as suggestion.
    """
    try:
        return grammar.rules[header]
    except KeyError:
        raise UnknownRuleError(header, nearest_match(header, grammar.rules)) from None


def parse_grammar(text, source_name="<string>"):
    """Parse grammar source text.

    Parameters
    ----------
    text : str
        Grammar DSL source.
    source_name : str, optional
        Used in error messages and kept on the grammar.

    Returns
    -------
    Grammar

    Raises
    ------
    AzeeSyntaxError
        When the text does not follow the grammar language.
    GrammarError
        On duplicate headers, unknown articulators, unresolved parameters
        or anchors and every other error-class diagnostic.
    """
    rules = {}
    for statement in nest(scan(text, source_name), source_name):
        rule = _parse_rule(statement, source_name)
        if rule.header in rules:
            first = rules[rule.header]
            raise GrammarError(
                [
                    Diagnostic(
                        Diagnostic.ERROR,
                        rule.header,
                        f"duplicate header (first defined on line {first.line})",
                        rule.line,
                        rule.column,
                    )
                ],
                source_name,
            )
        rules[rule.header] = rule
    grammar = Grammar(rules, source_name)
    log.debug("parsed %d rules from %s", len(rules), source_name)

    diagnostics = validate_grammar(grammar)
    errors = [d for d in diagnostics if d.is_error]
    if errors:
        raise GrammarError(errors, source_name)
    for diagnostic in diagnostics:
        log.warning("%s:%s", source_name, diagnostic)
    return grammar


def parse_grammar_file(path):
    """Read and parse a UTF-8 grammar file"""
    with open(path, encoding="utf-8") as fobj:
        return parse_grammar(fobj.read(), source_name=str(path))


def _parse_rule(statement, source):
    cursor = TokenCursor(statement.line, source)
    keyword = cursor.expect("name", "rule", what="'rule'")
    header = cursor.expect("name", what="rule header")
    cursor.expect("punct", "(", what="'('")
    params = []
    variadic = False
    if not cursor.accept("punct", ")"):
        while True:
            params.append(cursor.expect("name", what="parameter name").value)
            if cursor.accept("ellipsis"):
                variadic = True
                cursor.expect("punct", ")", what="')'")
                break
            if cursor.accept("punct", ")"):
                break
            cursor.expect("punct", ",", what="',' or ')'")
    cursor.expect("punct", ":", what="':'")
    body = statement.body
    if not cursor.at_end():
        # single statement on the rule line: `rule house(): posture ...`
        if body:
            raise AzeeSyntaxError(
                "a rule with an inline body can not have an indented block",
                source,
                body[0].line.number,
                1,
            )
        body = [Statement(cursor.rest(), [])]
    if not body:
        raise AzeeSyntaxError(
            "expected an indented rule body",
            source,
            statement.line.number,
            statement.line.end_column,
        )
    rhs = _sequence(body, source, keyword, explicit=False)
    return Rule(
        header.value,
        tuple(params),
        rhs,
        variadic=variadic,
        line=keyword.line,
        column=header.column,
    )


def _sequence(statements, source, opener, explicit):
    items = []
    transitions = []
    overlays = []
    pending = None
    for statement in statements:
        node = _parse_form(statement, source)
        if isinstance(node, TransitionSpec):
            if not items or pending is not None:
                raise AzeeSyntaxError(
                    "a transition must follow an item",
                    source,
                    node.line,
                    node.column,
                )
            pending = node
        elif isinstance(node, Overlay):
            overlays.append(node)
        else:
            if items:
                transitions.append(pending if pending is not None else TransitionSpec())
                pending = None
            items.append(node)
    if pending is not None:
        raise AzeeSyntaxError(
            "a transition must be followed by an item",
            source,
            pending.line,
            pending.column,
        )
    if not explicit and len(items) == 1 and not overlays:
        return items[0]
    return Seq(
        tuple(items),
        tuple(transitions),
        tuple(overlays),
        line=opener.line,
        column=opener.column,
    )


def _parse_form(statement, source):
    cursor = TokenCursor(statement.line, source)
    keyword = cursor.expect_one_of(
        "name", ("seq", "slot", "posture", "transition", "overlay")
    )
    position = dict(line=keyword.line, column=keyword.column)

    if keyword.value == "seq":
        cursor.expect("punct", ":", what="':'")
        cursor.expect_end()
        if not statement.body:
            raise AzeeSyntaxError(
                "expected an indented block of sequence items",
                source,
                statement.line.number,
                statement.line.end_column,
            )
        return _sequence(statement.body, source, keyword, explicit=True)

    if statement.body:
        first = statement.body[0].line
        raise AzeeSyntaxError(
            f"'{keyword.value}' does not open a block", source, first.number, 1
        )

    if keyword.value == "slot":
        param = cursor.expect("name", what="parameter name")
        cursor.expect_end()
        return Slot(param.value, **position)

    if keyword.value == "posture":
        articulator = cursor.expect("name", what="articulator")
        state = cursor.expect("string", what="quoted state label")
        duration_class = cursor.expect_one_of("name", tuple(duration_classes))
        cursor.expect_end()
        return Posture(articulator.value, state.value, duration_class.value, **position)

    if keyword.value == "transition":
        cursor.expect("name", "factor", what="'factor'")
        numerator = cursor.expect("number", what="number")
        denominator = "1"
        if cursor.accept("punct", "/"):
            denominator = cursor.expect("number", what="denominator").value
        cursor.expect_end()
        try:
            factor = to_fraction(numerator.value, denominator)
        except (ValueError, ZeroDivisionError):
            raise AzeeSyntaxError(
                "transition factor must be a positive rational",
                source,
                numerator.line,
                numerator.column,
            ) from None
        return TransitionSpec(factor, **position)

    # overlay
    articulator = cursor.expect("name", what="articulator")
    state = cursor.expect("string", what="quoted state label")
    cursor.expect("name", "from", what="'from'")
    start = _parse_anchor(cursor)
    cursor.expect("name", "to", what="'to'")
    end = _parse_anchor(cursor)
    cursor.expect_end()
    return Overlay(articulator.value, state.value, start, end, **position)


def _parse_anchor(cursor):
    edge = cursor.expect_one_of("name", EDGES)
    cursor.expect("punct", "(", what="'('")
    number = cursor.accept("number")
    if number is not None:
        ref = int(number.value)
    else:
        ref = cursor.expect("name", what="item index or parameter name").value
    cursor.expect("punct", ")", what="')'")
    return Anchor(ref, edge.value)


def validate_grammar(grammar):
    """Check every rule against the grammar invariants.

    Returns
    -------
    list(Diagnostic)
        Empty iff the grammar is sound. Sorted by rule header, then
        source position.
    """
    diagnostics = []
    for rule in grammar.rules.values():
        diagnostics.extend(_RuleValidator(rule).run())
    return sorted(diagnostics, key=lambda d: (d.subject, d.line, d.column, d.message))


class _RuleValidator:
    def __init__(self, rule):
        self.rule = rule
        self.diagnostics = []
        self.slotted = set()

    def report(self, node, message, severity=Diagnostic.ERROR):
        self.diagnostics.append(
            Diagnostic(severity, self.rule.header, message, node.line, node.column)
        )

    def run(self):
        rule = self.rule
        if not HEADER_RE.fullmatch(rule.header):
            self.report(rule, f"invalid header '{rule.header}'")
        seen = set()
        for param in rule.params:
            if not PARAM_RE.fullmatch(param):
                self.report(rule, f"invalid parameter name '{param}'")
            if param in seen:
                self.report(rule, f"duplicate parameter {param}")
            seen.add(param)
        if rule.variadic and len(rule.params) != 1:
            self.report(rule, "a variadic rule takes exactly one parameter")

        self._collect_slots(rule.rhs)
        if isinstance(rule.rhs, Overlay):
            self.report(rule.rhs, "overlays alone have nothing to anchor to")
        else:
            self._check(rule.rhs)
        if not any(d.is_error for d in self.diagnostics):
            self._check_overlay_spans()

        for param in rule.params:
            if param not in self.slotted:
                self.report(
                    rule, f"parameter {param} is never used", Diagnostic.WARNING
                )
        return self.diagnostics

    def _collect_slots(self, node):
        if isinstance(node, Slot):
            self.slotted.add(node.param)
        elif isinstance(node, Seq):
            for item in node.items:
                self._collect_slots(item)

    def _check(self, node):
        if isinstance(node, Slot):
            if node.param not in self.rule.params:
                self.report(node, f"unresolved parameter {node.param}")
        elif isinstance(node, Posture):
            self._check_articulator(node)
            if node.duration_class not in duration_classes:
                self.report(node, f"unknown duration class '{node.duration_class}'")
            if not node.state:
                self.report(node, "empty state label")
        elif isinstance(node, Seq):
            self._check_seq(node)
        elif isinstance(node, Overlay):
            self.report(node, "overlays can not be sequence items")
        else:
            self.report(self.rule, f"unsupported form node {type(node).__name__}")

    def _check_seq(self, seq):
        if not seq.items:
            if seq.overlays:
                self.report(seq, "overlays alone have nothing to anchor to")
            else:
                self.report(seq, "sequence has no items")
        elif len(seq.transitions) != len(seq.items) - 1:
            self.report(
                seq,
                f"sequence of {len(seq.items)} items needs {len(seq.items) - 1} "
                f"transitions, got {len(seq.transitions)}",
            )
        for item in seq.items:
            self._check(item)
        for overlay in seq.overlays:
            self._check_articulator(overlay)
            if not overlay.state:
                self.report(overlay, "empty state label")
            for anchor in (overlay.start, overlay.end):
                self._check_anchor(overlay, anchor, seq)
            if overlay.start.ref == overlay.end.ref and (
                overlay.start.edge == overlay.end.edge or overlay.start.edge == "end"
            ):
                self.report(
                    overlay, f"overlay from {overlay.start} to {overlay.end} is empty"
                )

    def _check_anchor(self, overlay, anchor, seq):
        if isinstance(anchor.ref, int):
            if not 0 <= anchor.ref < len(seq.items):
                self.report(overlay, f"anchor {anchor} refers to a missing item")
        elif anchor.ref not in self.rule.params:
            self.report(overlay, f"unresolved anchor {anchor}")
        elif anchor.ref not in self.slotted:
            self.report(overlay, f"anchor {anchor} refers to a parameter without slot")

    def _check_articulator(self, node):
        if node.articulator == META:
            self.report(
                node, "articulator 'meta' is reserved for ellipsis placeholders"
            )
        elif node.articulator not in articulators:
            self.report(node, f"unknown articulator '{node.articulator}'")

    def _check_overlay_spans(self):
        spans = overlay_spans(self.rule)
        for k, span in enumerate(spans):
            overlay = span.overlay
            if span.start >= span.end:
                self.report(
                    overlay, f"overlay from {overlay.start} to {overlay.end} is empty"
                )
                continue
            for leaf in span.covered:
                if (
                    isinstance(leaf, Posture)
                    and leaf.articulator == overlay.articulator
                ):
                    self.report(
                        overlay,
                        f"overlay on {overlay.articulator} covers the posture "
                        f"'{leaf.state}' on the same articulator",
                    )
            for other in spans[:k]:
                if (
                    other.overlay.articulator == overlay.articulator
                    and other.start < span.end
                    and span.start < other.end
                ):
                    self.report(
                        overlay,
                        f"overlay on {overlay.articulator} overlaps the overlay "
                        f"'{other.overlay.state}' on the same articulator",
                    )


OverlaySpan = namedtuple("OverlaySpan", ["overlay", "start", "end", "covered"])


def overlay_spans(rule):
    """Locate the overlays of a valid rule on its timeline.

    The timeline is the chronological list of the postures and slots of
    the right-hand side. Leaf ``i`` starts at position ``2 * i`` and
    ends at ``2 * i + 1``, so an overlay either covers a leaf entirely
    or does not meet it at all.

    Returns
    -------
    list(OverlaySpan)
        One ``(overlay, start, end, covered)`` entry per overlay where
        `covered` are the leaves between `start` and `end`. Overlays
        with an unresolvable anchor are left out.
    """
    timeline = _Timeline(rule.rhs)
    spans = []
    for overlay, bounds in timeline.overlays:
        try:
            start = timeline.position(overlay.start, bounds)
            end = timeline.position(overlay.end, bounds)
        except (IndexError, KeyError, TypeError):
            continue
        covered = tuple(
            leaf
            for i, leaf in enumerate(timeline.leaves)
            if start <= 2 * i and 2 * i + 1 <= end
        )
        spans.append(OverlaySpan(overlay, start, end, covered))
    return spans


class _Timeline:
    def __init__(self, rhs):
        self.leaves = []
        self.overlays = []  # (overlay, leaf bounds of the items of its sequence)
        self.slots = {}  # param -> leaf index of its first slot
        self._walk(rhs)

    def _walk(self, node):
        if isinstance(node, Seq):
            bounds = [self._walk(item) for item in node.items]
            self.overlays.extend((overlay, bounds) for overlay in node.overlays)
            if not bounds:
                return None
            return bounds[0][0], bounds[-1][1]
        if isinstance(node, Overlay):
            return None
        index = len(self.leaves)
        self.leaves.append(node)
        if isinstance(node, Slot):
            self.slots.setdefault(node.param, index)
        return index, index

    def position(self, anchor, bounds):
        if isinstance(anchor.ref, int):
            if anchor.ref < 0:
                raise IndexError(anchor.ref)
            first, last = bounds[anchor.ref]
        else:
            first = last = self.slots[anchor.ref]
        return 2 * first if anchor.edge == "start" else 2 * last + 1


def render_grammar(grammar):
    """Print a grammar back to its source language.

    Comments and layout are not preserved, the structure is:
    ``parse_grammar(render_grammar(g)) == g``.
    """
    return "\n".join(_render_rule(rule) for rule in grammar.rules.values())


def _render_rule(rule):
    params = ", ".join(rule.params)
    if rule.variadic:
        params += "..."
    lines = [f"rule {rule.header}({params}):"]
    rhs = rule.rhs
    if isinstance(rhs, Seq) and (len(rhs.items) > 1 or rhs.overlays):
        _render_seq_body(rhs, 1, lines)
    else:
        _render_form(rhs, 1, lines)
    return "\n".join(lines) + "\n"


def _render_seq_body(seq, depth, lines):
    indent = "  " * depth
    for k, item in enumerate(seq.items):
        if k > 0:
            factor = seq.transitions[k - 1].factor
            if factor != 1:
                lines.append(
                    f"{indent}transition factor {factor.numerator}/{factor.denominator}"
                )
        _render_form(item, depth, lines)
    for overlay in seq.overlays:
        _render_form(overlay, depth, lines)


def _render_form(node, depth, lines):
    indent = "  " * depth
    if isinstance(node, Slot):
        lines.append(f"{indent}slot {node.param}")
    elif isinstance(node, Posture):
        lines.append(
            f'{indent}posture {node.articulator} "{node.state}" {node.duration_class}'
        )
    elif isinstance(node, Overlay):
        lines.append(
            f'{indent}overlay {node.articulator} "{node.state}" '
            f"from {node.start} to {node.end}"
        )
    elif isinstance(node, Seq):
        lines.append(f"{indent}seq:")
        _render_seq_body(node, depth + 1, lines)
    else:
        raise TypeError(f"can not render {node!r}")
