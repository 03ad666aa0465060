#!/usr/bin/env python3
"""
The shipped standard grammar, mapping and demo expressions.
"""
from __future__ import annotations

from collections import namedtuple
import functools
from importlib.resources import files
import logging

from .expr import parse_expression, render_tree
from .grammar import parse_grammar_file
from .score import evaluate, export_score, resolve
from .sembridge import export_graph, map_to_graph, parse_mapping_file
from .tools import cached_property

log = logging.getLogger("azee.stdlib")

DEMO_NAMES = ("E1", "java-landslide")


def data_path(name):
    """Absolute path of a file shipped in ``azee/data``, e.g. ``"std.azgr"``"""
    return str(files("azee") / "data" / name)


def _read(name):
    with open(data_path(name), encoding="utf-8") as fobj:
        return fobj.read()


@functools.lru_cache(maxsize=None)
def std_grammar():
    """The standard grammar (``std.azgr``)"""
    return parse_grammar_file(data_path("std.azgr"))


@functools.lru_cache(maxsize=None)
def std_mapping():
    """The standard mapping rules (``std.azmap``)"""
    return parse_mapping_file(data_path("std.azmap"))


class DemoCase:
    """A shipped expression and its golden outputs.

    Goldens are the exact bytes written by the pipeline plus a trailing
    newline.
    """

    def __init__(
        self, name, expression_text, expected_tree, expected_score, expected_graph
    ):
        self.name = name
        self.expression_text = expression_text
        self.expected_tree = expected_tree
        self.expected_score = expected_score
        self.expected_graph = expected_graph

    @cached_property
    def expression(self):
        return parse_expression(self.expression_text, source=f"{self.name}.aze")

    def __repr__(self):
        return f"<DemoCase '{self.name}'>"


class DemoResult(
    namedtuple("DemoResult", ["case", "tree", "score", "graph", "losses"])
):
    """Fresh pipeline outputs for a demo case"""

    @property
    def tree_matches(self):
        return self.tree == self.case.expected_tree

    @property
    def score_matches(self):
        return self.score == self.case.expected_score

    @property
    def graph_matches(self):
        return self.graph == self.case.expected_graph

    @property
    def ok(self):
        return self.tree_matches and self.score_matches and self.graph_matches


def demo_cases():
    """The shipped demo cases, ``E1`` first"""
    return [
        DemoCase(
            name,
            _read(f"demos/{name}.aze"),
            _read(f"golden/{name}.tree"),
            _read(f"golden/{name}.score.json"),
            _read(f"golden/{name}.graph.dot"),
        )
        for name in DEMO_NAMES
    ]


def run_demo(case, grammar=None, mapping=None, config=None):
    """Run the whole pipeline on a demo case.

    Parameters
    ----------
    case : DemoCase
    grammar : Grammar, optional
        Standard grammar by default.
    mapping : MappingRules, optional
        Standard mapping by default.
    config : EvalConfig, optional
        Default durations when omitted; goldens are made with these.

    Returns
    -------
    DemoResult
        Outputs in golden form (newline terminated).
    """
    grammar = std_grammar() if grammar is None else grammar
    mapping = std_mapping() if mapping is None else mapping
    expr = case.expression
    score = resolve(evaluate(expr, grammar, config))
    graph, losses = map_to_graph(expr, mapping)
    result = DemoResult(
        case,
        render_tree(expr) + "\n",
        export_score(score, "json") + "\n",
        export_graph(graph, "dot") + "\n",
        losses,
    )
    log.debug("demo %s: golden match %s", case.name, result.ok)
    return result
