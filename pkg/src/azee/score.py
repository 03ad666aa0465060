#!/usr/bin/env python3
"""
Compilation of expressions into articulator scores.

``evaluate`` instantiates the rule right-hand sides bottom-up into a
symbolic score: blocks between sync points plus the constraints tying
the sync points together (``target = source + offset_ms``). ``resolve``
assigns integer milliseconds to every sync point in one forward pass
over the constraint DAG and lays the blocks out on their tracks.
"""
from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field, replace
import json
import logging
from types import MappingProxyType
from typing import Mapping, Tuple

import awkward as ak
import networkx as nx
import numpy as np

from .definitions import articulators, duration_classes, durations, META
from .exceptions import (
    ConstraintCycleError,
    ExpressionError,
    InconsistentConstraintsError,
    ScoreConflictError,
)
from .expr import EllipsisNode, check
from .grammar import Posture, Seq, Slot, lookup_rule
from .tools import cached_property, format_path, round_half_up

log = logging.getLogger("azee.score")


@dataclass(frozen=True)
class EvalConfig:
    """Durations (in ms) binding the symbolic forms to time"""

    default_sign_ms: int = durations.default_sign_ms
    default_transition_ms: int = durations.default_transition_ms
    ellipsis_ms: int = durations.ellipsis_ms
    hold_ms: int = durations.hold_ms

    def __post_init__(self):
        for name, value in list(vars(self).items()):
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ValueError(f"{name} must be an integer, got {value!r}")
            if value <= 0:
                raise ValueError(f"{name} must be strictly positive, got {value}")
            object.__setattr__(self, name, int(value))

    def replace(self, **overrides):
        """A copy with the given durations, ``None`` values are ignored"""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def duration_of(self, duration_class):
        return getattr(self, duration_classes[duration_class])

    def gap(self, factor):
        """Transition duration for a transition factor, at least 1 ms.

        A gap never rounds down to 0, so the edges on both sides of a
        transition are distinct instants.
        """
        return max(1, round_half_up(self.default_transition_ms * factor))


Constraint = namedtuple("Constraint", ["target", "source", "offset_ms"])
SymbolicBlock = namedtuple(
    "SymbolicBlock", ["articulator", "state", "start", "end", "provenance"]
)


@dataclass(frozen=True)
class SymbolicScore:
    """Blocks between sync points and the constraints among them.

    Sync points are integers, ``origin`` is the start of the utterance.
    Equalities are constraints with a zero offset.
    """

    blocks: Tuple[SymbolicBlock, ...]
    constraints: Tuple[Constraint, ...]
    n_points: int
    origin: int = 0

    @cached_property
    def graph(self):
        """The constraint graph, one edge per constraint from source to target"""
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(range(self.n_points))
        for target, source, offset_ms in self.constraints:
            graph.add_edge(source, target, offset_ms=offset_ms)
        return graph


class Block(namedtuple("Block", ["start_ms", "end_ms", "state", "provenance"])):
    """A resolved block, ``[start_ms, end_ms)`` on its track"""

    @property
    def path(self):
        return format_path(self.provenance)

    @property
    def duration_ms(self):
        return self.end_ms - self.start_ms


def _track_order(name):
    return articulators.get(name, len(articulators))


@dataclass(frozen=True)
class Score:
    """Per-articulator tracks of resolved blocks.

    Only non-empty tracks are kept, in registry order.
    """

    tracks: Mapping[str, Tuple[Block, ...]] = field(default_factory=dict)

    def __post_init__(self):
        tracks = {
            name: tuple(sorted(blocks))
            for name, blocks in sorted(
                self.tracks.items(), key=lambda item: _track_order(item[0])
            )
            if blocks
        }
        object.__setattr__(self, "tracks", MappingProxyType(tracks))

    def __eq__(self, other):
        if not isinstance(other, Score):
            return NotImplemented
        return dict(self.tracks) == dict(other.tracks)

    __hash__ = None

    @property
    def track_names(self):
        return tuple(self.tracks)

    def blocks(self):
        """Iterate over ``(track, block)`` in export order"""
        pairs = [
            (name, block) for name, blocks in self.tracks.items() for block in blocks
        ]
        return iter(
            sorted(
                pairs,
                key=lambda p: (
                    p[1].start_ms,
                    _track_order(p[0]),
                    p[1].end_ms,
                    p[1].state,
                    p[1].provenance,
                ),
            )
        )

    def span(self, path):
        """``(start_ms, end_ms)`` covered by the blocks of the subtree at `path`"""
        path = tuple(path)
        selected = [
            block
            for _, block in self.blocks()
            if block.provenance[: len(path)] == path
        ]
        if not selected:
            raise KeyError(f"no block comes from {format_path(path)}")
        return min(b.start_ms for b in selected), max(b.end_ms for b in selected)

    @cached_property
    def arrays(self):
        """Jagged record array, one sub-list per track (see `track_names`)"""
        return ak.Array(
            [
                [
                    {
                        "state": block.state,
                        "start_ms": block.start_ms,
                        "end_ms": block.end_ms,
                        "provenance": block.path,
                    }
                    for block in self.tracks[name]
                ]
                for name in self.track_names
            ]
        )

    def __repr__(self):
        n_blocks = sum(len(blocks) for blocks in self.tracks.values())
        return (
            f"<Score [{n_blocks} blocks on {len(self.tracks)} tracks] "
            f"duration={total_duration(self)}ms>"
        )


class _RuleInstance:
    """Book-keeping for one rule application during evaluation"""

    def __init__(self, rule, expr, path):
        self.rule = rule
        self.expr = expr
        self.path = path
        self.slot_spans = {}  # param -> (start, end) of its first slot
        self.overlays = []  # (overlay, item spans of its sequence)

    def anchor(self, anchor, spans):
        if isinstance(anchor.ref, int):
            start, end = spans[anchor.ref]
        else:
            start, end = self.slot_spans[anchor.ref]
        return start if anchor.edge == "start" else end


class _ScoreBuilder:
    ORIGIN = 0

    def __init__(self, grammar, config):
        self.grammar = grammar
        self.config = config
        self.n_points = 1
        self.blocks = []
        self.constraints = []

    def point(self, source, offset_ms):
        target = self.n_points
        self.n_points += 1
        self.constraints.append(Constraint(target, source, offset_ms))
        return target

    def freeze(self):
        return SymbolicScore(tuple(self.blocks), tuple(self.constraints), self.n_points)

    def expression(self, expr, path, start):
        own = self.point(start, 0)
        if isinstance(expr, EllipsisNode):
            end = self.point(own, self.config.ellipsis_ms)
            self.blocks.append(SymbolicBlock(META, expr.text, own, end, path))
            return end

        instance = _RuleInstance(lookup_rule(self.grammar, expr.header), expr, path)
        end = self.form(instance.rule.rhs, instance, own)
        for overlay, spans in instance.overlays:
            self.blocks.append(
                SymbolicBlock(
                    overlay.articulator,
                    overlay.state,
                    instance.anchor(overlay.start, spans),
                    instance.anchor(overlay.end, spans),
                    path,
                )
            )
        return end

    def form(self, node, instance, start):
        if isinstance(node, Posture):
            end = self.point(start, self.config.duration_of(node.duration_class))
            self.blocks.append(
                SymbolicBlock(node.articulator, node.state, start, end, instance.path)
            )
            return end
        if isinstance(node, Slot):
            end = self.slot(node.param, instance, start)
            instance.slot_spans.setdefault(node.param, (start, end))
            return end
        if isinstance(node, Seq):
            spans = []
            for k, item in enumerate(node.items):
                cursor = start
                if k:
                    gap = self.config.gap(node.transitions[k - 1].factor)
                    cursor = self.point(spans[-1][1], gap)
                spans.append((cursor, self.form(item, instance, cursor)))
            instance.overlays.extend((overlay, spans) for overlay in node.overlays)
            return spans[-1][1]
        raise TypeError(f"{node!r} can not be instantiated")

    def slot(self, param, instance, start):
        if instance.rule.variadic:
            end = None
            for i, arg in enumerate(instance.expr.args):
                cursor = start if i == 0 else self.point(end, self.config.gap(1))
                end = self.expression(arg, instance.path + (i,), cursor)
            return end
        i = instance.rule.params.index(param)
        return self.expression(instance.expr.args[i], instance.path + (i,), start)


def evaluate(expr, grammar, config=None, check_conflicts=True):
    """Compile an expression into a symbolic score.

    Each rule application instantiates its right-hand side, arguments
    are spliced into the slots, ellipses become ``meta`` blocks and
    sequence gaps turn into offset constraints.

    Parameters
    ----------
    expr : Apply or EllipsisNode
    grammar : Grammar
    config : EvalConfig, optional
        Default durations when omitted.
    check_conflicts : bool, optional
        Resolve the score once so that articulator conflicts and cycles
        are reported here already.

    Returns
    -------
    SymbolicScore

    Raises
    ------
    ExpressionError
        When the expression does not fit the grammar. Overlay conflicts
        are left to `resolve`, they raise ``ScoreConflictError``.
    ScoreConflictError, ConstraintCycleError
        If `check_conflicts` is set.
    """
    config = EvalConfig() if config is None else config
    diagnostics = check(expr, grammar, conflicts=False)
    if diagnostics:
        raise ExpressionError(diagnostics)
    builder = _ScoreBuilder(grammar, config)
    builder.expression(expr, (), builder.ORIGIN)
    sym = builder.freeze()
    log.debug(
        "evaluated %d blocks, %d sync points, %d constraints",
        len(sym.blocks),
        sym.n_points,
        len(sym.constraints),
    )
    if check_conflicts:
        resolve(sym)
    return sym


def resolve(sym, config=None):
    """Assign milliseconds to a symbolic score.

    A topological forward pass over the constraint graph. The earliest
    block starts at 0. `config` is accepted for symmetry with `evaluate`
    and ignored: every duration is already an offset of `sym`.

    Raises
    ------
    ConstraintCycleError
        The constraint graph has a cycle.
    InconsistentConstraintsError
        A sync point is not anchored to the origin, receives two
        different values, or a block does not have a positive duration.
    ScoreConflictError
        Two blocks overlap on one track.
    """
    graph = sym.graph
    if not nx.is_directed_acyclic_graph(graph):
        cycle = nx.find_cycle(graph)
        raise ConstraintCycleError([edge[0] for edge in cycle] + [cycle[-1][1]])

    anchored = nx.descendants(graph, sym.origin) | {sym.origin}
    for point in graph.nodes:
        if point not in anchored:
            raise InconsistentConstraintsError(
                f"sync point {point} is not anchored to the origin"
            )

    times = {sym.origin: 0}
    for point in nx.lexicographical_topological_sort(graph):
        for source, _, offset_ms in graph.in_edges(point, data="offset_ms"):
            value = times[source] + offset_ms
            if times.setdefault(point, value) != value:
                raise InconsistentConstraintsError(
                    f"sync point {point} is forced to both "
                    f"{times[point]} and {value} ms"
                )

    placed = []
    for block in sym.blocks:
        start_ms, end_ms = times[block.start], times[block.end]
        if end_ms <= start_ms:
            raise InconsistentConstraintsError(
                f"block '{block.state}' on {block.articulator} from "
                f"{format_path(block.provenance)} spans [{start_ms}, {end_ms})"
            )
        placed.append((block, start_ms, end_ms))
    shift = min((start_ms for _, start_ms, _ in placed), default=0)

    tracks = {}
    for block, start_ms, end_ms in placed:
        tracks.setdefault(block.articulator, []).append(
            Block(
                int(start_ms - shift),
                int(end_ms - shift),
                block.state,
                tuple(block.provenance),
            )
        )
    for name, blocks in tracks.items():
        blocks.sort()
        _check_track(name, blocks)
    log.debug("resolved %d sync points on %d tracks", len(times), len(tracks))
    return Score(tracks)


def _check_track(name, blocks):
    starts = np.array([b.start_ms for b in blocks], dtype=np.int64)
    ends = np.array([b.end_ms for b in blocks], dtype=np.int64)
    overlapping = np.flatnonzero(starts[1:] < ends[:-1])
    if len(overlapping):
        i = int(overlapping[0])
        raise ScoreConflictError(name, blocks[i], blocks[i + 1])


def total_duration(score):
    """End of the last block in ms, 0 for an empty score"""
    return max(
        (blocks[-1].end_ms for blocks in score.tracks.values() if blocks), default=0
    )


def export_score(score, fmt="json"):
    """Render a score as text.

    Parameters
    ----------
    score : Score
    fmt : str, optional
        ``json``: one object per block (track, state, start_ms, end_ms,
        provenance), sorted by start then track; ``table``: aligned
        human-readable columns.

    Returns
    -------
    str
        Without trailing newline.
    """
    rows = [
        (name, block.state, block.start_ms, block.end_ms, block.path)
        for name, block in score.blocks()
    ]
    if fmt == "json":
        if not rows:
            return '{"blocks":[]}'
        objects = [
            json.dumps(
                dict(zip(("track", "state", "start_ms", "end_ms", "provenance"), row)),
                separators=(",", ":"),
                ensure_ascii=False,
            )
            for row in rows
        ]
        return '{"blocks":[\n' + ",\n".join(objects) + "\n]}"
    if fmt == "table":
        return _table(("track", "state", "start_ms", "end_ms", "provenance"), rows)
    raise ValueError(f"unsupported score format '{fmt}'")


def _table(header, rows):
    cells = [tuple(str(c) for c in header)] + [tuple(str(c) for c in r) for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    numeric = [i for i, name in enumerate(header) if name.endswith("_ms")]
    lines = []
    for row in cells:
        parts = [
            cell.rjust(width) if i in numeric else cell.ljust(width)
            for i, (cell, width) in enumerate(zip(row, widths))
        ]
        lines.append("  ".join(parts).rstrip())
    return "\n".join(lines)
