#!/usr/bin/env python3
"""
Mapping of AZee expressions onto semantic graphs.

The correspondences between rule headers and graph fragments are
declared in a mapping file (``.azmap``)::

    map cat(C, I) =>
      kind C class
      edge I class-instance C
      yield I

    default =>
      node instance $header

Whatever an expression expresses that the graph can not hold (focus,
chronology, deeply nested relations) is reported in a ``LossReport``
instead of being dropped silently.
"""
from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field
import logging
from types import MappingProxyType
from typing import Mapping, Tuple

import networkx as nx

from .definitions import node_kinds
from .exceptions import AzeeSyntaxError, MappingError
from .expr import EllipsisNode
from .lexer import TokenCursor, nest, scan
from .tools import format_path

log = logging.getLogger("azee.sembridge")

SELF = "self"

GraphNode = namedtuple("GraphNode", ["id", "kind", "label", "provenance"])
GraphEdge = namedtuple("GraphEdge", ["source", "target", "relation", "provenance"])
LossEntry = namedtuple("LossEntry", ["node_path", "feature", "reason"])

NodeTemplate = namedtuple("NodeTemplate", ["kind", "label", "line"])
KindTemplate = namedtuple("KindTemplate", ["binding", "kind", "line"])
YieldTemplate = namedtuple("YieldTemplate", ["binding", "line"])
EdgeTemplate = namedtuple("EdgeTemplate", ["source", "relation", "target", "line"])
LossTemplate = namedtuple("LossTemplate", ["feature", "reason", "line"])


@dataclass(frozen=True)
class SemanticGraph:
    """Nodes and labelled edges, possibly disconnected.

    ``provenance`` of nodes and edges is the path of the expression node
    whose pattern created them.
    """

    nodes: Tuple[GraphNode, ...] = ()
    edges: Tuple[GraphEdge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        ids = [node.id for node in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("graph node ids must be unique")
        for node in self.nodes:
            if node.kind not in node_kinds:
                raise ValueError(f"unknown node kind '{node.kind}'")
        known = set(ids)
        for edge in self.edges:
            if edge.source not in known or edge.target not in known:
                raise ValueError(f"edge {edge.source} -> {edge.target} has no endpoint")

    def node(self, node_id):
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise KeyError(node_id)

    def to_networkx(self):
        """The graph as a ``networkx.MultiDiGraph``

        Nodes carry ``kind`` and ``label``, edges carry ``relation``.
        """
        graph = nx.MultiDiGraph()
        for node in self.nodes:
            graph.add_node(node.id, kind=node.kind, label=node.label)
        for edge in self.edges:
            graph.add_edge(edge.source, edge.target, relation=edge.relation)
        return graph

    def __repr__(self):
        return f"<SemanticGraph [{len(self.nodes)} nodes, {len(self.edges)} edges]>"


@dataclass(frozen=True)
class LossReport:
    """What an expression carries that its semantic graph does not"""

    entries: Tuple[LossEntry, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @property
    def features(self):
        return tuple(entry.feature for entry in self.entries)

    def at(self, path):
        """Entries recorded for the expression node at `path`"""
        path = tuple(path)
        return [entry for entry in self.entries if entry.node_path == path]

    def render(self, prefix="# "):
        """One ``<prefix><path> <feature>: <reason>`` line per entry"""
        return "\n".join(
            f"{prefix}{format_path(e.node_path)} {e.feature}: {e.reason}"
            for e in self.entries
        )


@dataclass(frozen=True)
class Pattern:
    """Graph fragment emitted for every application of `header`"""

    header: str
    bindings: Tuple[str, ...]
    templates: tuple
    variadic: bool = False
    line: int = field(default=0, compare=False)

    @property
    def node(self):
        for template in self.templates:
            if isinstance(template, NodeTemplate):
                return template
        return None

    def accepts(self, n_args):
        if self.variadic:
            return n_args >= 1
        return n_args == len(self.bindings)


DEFAULT_PATTERN = Pattern(None, (), (NodeTemplate("instance", None, 0),))


@dataclass(frozen=True)
class MappingRules:
    """Patterns by header plus the action for headers without pattern"""

    patterns: Mapping[str, Pattern] = field(default_factory=dict)
    default: Pattern = DEFAULT_PATTERN
    source_name: str = field(default="<string>", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "patterns", MappingProxyType(dict(self.patterns)))

    def __eq__(self, other):
        if not isinstance(other, MappingRules):
            return NotImplemented
        return (dict(self.patterns), self.default) == (
            dict(other.patterns),
            other.default,
        )

    __hash__ = None

    def __contains__(self, header):
        return header in self.patterns

    def __repr__(self):
        return (
            f"<MappingRules [{len(self.patterns)} patterns] "
            f"source='{self.source_name}'>"
        )


def parse_mapping(text, source_name="<string>"):
    """Parse a mapping file.

    Parameters
    ----------
    text : str
        Mapping DSL source, an empty text gives the built-in default
        action only.
    source_name : str, optional
        Used in error messages.

    Returns
    -------
    MappingRules

    Raises
    ------
    AzeeSyntaxError
        Malformed statements.
    MappingError
        Duplicate patterns and templates using undeclared bindings.
    """
    patterns = {}
    default = None
    for statement in nest(scan(text, source_name), source_name):
        pattern = _parse_pattern(statement, source_name)
        if pattern.header is None:
            if default is not None:
                raise MappingError(
                    "duplicate default pattern", source_name, pattern.line
                )
            default = pattern
        elif pattern.header in patterns:
            raise MappingError(
                f"duplicate pattern for '{pattern.header}' "
                f"(first defined on line {patterns[pattern.header].line})",
                source_name,
                pattern.line,
            )
        else:
            patterns[pattern.header] = pattern
    log.debug("parsed %d mapping patterns from %s", len(patterns), source_name)
    return MappingRules(patterns, default or DEFAULT_PATTERN, source_name)


def parse_mapping_file(path):
    """Read and parse a UTF-8 mapping file"""
    with open(path, encoding="utf-8") as fobj:
        return parse_mapping(fobj.read(), source_name=str(path))


def _parse_pattern(statement, source):
    cursor = TokenCursor(statement.line, source)
    keyword = cursor.expect_one_of("name", ("map", "default"))
    header = None
    bindings = []
    variadic = False
    if keyword.value == "map":
        header = cursor.expect("name", what="rule header").value
        cursor.expect("punct", "(", what="'('")
        if not cursor.accept("punct", ")"):
            while True:
                bindings.append(cursor.expect("name", what="binding name").value)
                if cursor.accept("ellipsis"):
                    variadic = True
                    cursor.expect("punct", ")", what="')'")
                    break
                if cursor.accept("punct", ")"):
                    break
                cursor.expect("punct", ",", what="',' or ')'")
    cursor.expect("arrow", what="'=>'")
    cursor.expect_end()
    if not statement.body:
        raise AzeeSyntaxError(
            "expected an indented pattern body",
            source,
            statement.line.number,
            statement.line.end_column,
        )
    line = statement.line.number

    def fail(message, at=line):
        return MappingError(message, source, at)

    if SELF in bindings:
        raise fail(f"'{SELF}' can not be used as a binding name")
    if len(set(bindings)) != len(bindings):
        raise fail("duplicate binding name")
    if variadic and len(bindings) != 1:
        raise fail("a variadic pattern takes exactly one binding")

    templates = [_parse_template(s, source) for s in statement.body]
    nodes = [t for t in templates if isinstance(t, NodeTemplate)]
    yields = [t for t in templates if isinstance(t, YieldTemplate)]
    if len(nodes) > 1:
        raise fail("a pattern creates at most one node", nodes[1].line)
    if len(yields) > 1:
        raise fail("a pattern yields at most one binding", yields[1].line)
    if nodes and yields:
        raise fail("a pattern can not both create a node and yield", yields[0].line)

    scope = set(bindings) | ({SELF} if nodes else set())
    for template in templates:
        for name in _binding_references(template):
            if name not in scope:
                reason = (
                    f"'{SELF}' needs a node template"
                    if name == SELF
                    else f"unbound template variable '{name}'"
                )
                raise fail(reason, template.line)
        if isinstance(template, YieldTemplate) and variadic:
            raise fail("can not yield a variadic binding", template.line)
    return Pattern(header, tuple(bindings), tuple(templates), variadic, line)


def _binding_references(template):
    if isinstance(template, KindTemplate):
        return (template.binding,)
    if isinstance(template, YieldTemplate):
        return (template.binding,)
    if isinstance(template, EdgeTemplate):
        return (template.source, template.target)
    return ()


def _parse_template(statement, source):
    cursor = TokenCursor(statement.line, source)
    if statement.body:
        raise AzeeSyntaxError(
            "templates do not open a block", source, statement.body[0].line.number, 1
        )
    keyword = cursor.expect_one_of("name", ("node", "kind", "yield", "edge", "loss"))
    line = keyword.line
    if keyword.value == "node":
        kind = cursor.expect_one_of("name", tuple(node_kinds)).value
        if cursor.accept("variable", "$header"):
            label = None
        else:
            label = cursor.expect("string", what="'$header' or quoted label").value
        template = NodeTemplate(kind, label, line)
    elif keyword.value == "kind":
        binding = cursor.expect("name", what="binding").value
        kind = cursor.expect_one_of("name", tuple(node_kinds)).value
        template = KindTemplate(binding, kind, line)
    elif keyword.value == "yield":
        template = YieldTemplate(cursor.expect("name", what="binding").value, line)
    elif keyword.value == "edge":
        source_binding = cursor.expect("name", what="binding").value
        relation = cursor.expect("name", what="relation label").value
        target = cursor.expect("name", what="binding").value
        template = EdgeTemplate(source_binding, relation, target, line)
    else:
        feature = cursor.expect("name", what="feature name").value
        reason = cursor.expect("string", what="quoted reason").value
        template = LossTemplate(feature, reason, line)
    cursor.expect_end()
    return template


class _GraphBuilder:
    def __init__(self, mapping):
        self.mapping = mapping
        self.nodes = []
        self.edges = []
        self.losses = []

    def add_node(self, kind, label, path):
        node_id = f"n{len(self.nodes)}"
        self.nodes.append(GraphNode(node_id, kind, label, path))
        return node_id

    def set_kind(self, node_id, kind):
        index = int(node_id[1:])
        self.nodes[index] = self.nodes[index]._replace(kind=kind)

    def lose(self, path, feature, reason):
        self.losses.append(LossEntry(path, feature, reason))

    def visit(self, expr, path):
        """Map the subtree at `path`, return its representative node id or None"""
        if isinstance(expr, EllipsisNode):
            return self.add_node("literal", expr.text, path)

        representatives = [
            self.visit(arg, path + (i,)) for i, arg in enumerate(expr.args)
        ]
        n_contributions = len(self.nodes) + len(self.edges)
        n_losses = len(self.losses)

        pattern = self.mapping.patterns.get(expr.header)
        if pattern is None:
            pattern = self.mapping.default
            if expr.args:
                self.lose(
                    path,
                    "structure",
                    f"no pattern for '{expr.header}', "
                    f"its {len(expr.args)} arguments are left unconnected",
                )
        elif not pattern.accepts(len(expr.args)):
            self.lose(
                path,
                "structure",
                f"pattern for '{expr.header}' takes {len(pattern.bindings)} "
                f"arguments, got {len(expr.args)}",
            )
            return None

        representative = self.apply(pattern, expr, path, representatives)
        if (
            len(self.nodes) + len(self.edges) == n_contributions
            and len(self.losses) == n_losses
        ):
            self.lose(path, "unmapped", f"'{expr.header}' adds no node or edge")
        return representative

    def apply(self, pattern, expr, path, representatives):
        if pattern.variadic:
            env = {pattern.bindings[0]: representatives}
        else:
            env = {name: [rep] for name, rep in zip(pattern.bindings, representatives)}

        own = None
        if pattern.node is not None:
            label = expr.header if pattern.node.label is None else pattern.node.label
            own = self.add_node(pattern.node.kind, label, path)
            env[SELF] = [own]

        yielded = None
        for template in pattern.templates:
            if isinstance(template, KindTemplate):
                for rep in env[template.binding]:
                    if rep is None:
                        self.lose(
                            path,
                            "deep-nesting",
                            f"{template.binding} has no graph node to become "
                            f"a {template.kind}",
                        )
                    else:
                        self.set_kind(rep, template.kind)
            elif isinstance(template, EdgeTemplate):
                self.connect(template, env, path)
            elif isinstance(template, YieldTemplate):
                yielded = env[template.binding][0]
            elif isinstance(template, LossTemplate):
                self.lose(path, template.feature, template.reason)
        return own if own is not None else yielded

    def connect(self, template, env, path):
        for source in env[template.source]:
            for target in env[template.target]:
                if source is None or target is None:
                    missing = template.source if source is None else template.target
                    self.lose(
                        path,
                        "deep-nesting",
                        f"{missing} has no graph node, "
                        f"'{template.relation}' edge not emitted",
                    )
                else:
                    self.edges.append(
                        GraphEdge(source, target, template.relation, path)
                    )


def map_to_graph(expr, mapping):
    """Translate an expression into a semantic graph.

    The tree is walked in post-order. Leaves and ellipses become nodes,
    rule applications connect the nodes their arguments stand for.
    Unchecked expressions are accepted.

    Parameters
    ----------
    expr : Apply or EllipsisNode
    mapping : MappingRules

    Returns
    -------
    tuple(SemanticGraph, LossReport)
    """
    builder = _GraphBuilder(mapping)
    builder.visit(expr, ())
    graph = SemanticGraph(builder.nodes, builder.edges)
    log.debug(
        "mapped to %d nodes, %d edges, %d losses",
        len(graph.nodes),
        len(graph.edges),
        len(builder.losses),
    )
    return graph, LossReport(builder.losses)


def _dot_string(text):
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _triple_term(label):
    if any(char.isspace() for char in label) or '"' in label:
        return _dot_string(label)
    return label


def export_graph(graph, fmt="dot"):
    """Render a semantic graph as text.

    Parameters
    ----------
    graph : SemanticGraph
    fmt : str, optional
        ``dot`` (Graphviz, shapes by node kind) or ``triples`` (sorted
        ``subject relation object`` lines).

    Returns
    -------
    str
        Without trailing newline.
    """
    if fmt == "dot":
        lines = ["digraph azee {"]
        for node in graph.nodes:
            lines.append(
                f"  {node.id} [label={_dot_string(node.label)}, "
                f"shape={node_kinds[node.kind]}];"
            )
        for edge in graph.edges:
            lines.append(
                f"  {edge.source} -> {edge.target} "
                f"[label={_dot_string(edge.relation)}];"
            )
        lines.append("}")
        return "\n".join(lines)
    if fmt == "triples":
        labels = {node.id: _triple_term(node.label) for node in graph.nodes}
        return "\n".join(
            sorted(
                f"{labels[e.source]} {e.relation} {labels[e.target]}"
                for e in graph.edges
            )
        )
    raise ValueError(f"unsupported graph format '{fmt}'")
