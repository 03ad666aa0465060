#!/usr/bin/env python3
"""
Compile AZee expressions into articulator scores and semantic graphs.

Usage:
    azee check [options] [(-e EXPR | FILE)]
    azee tree [options] (-e EXPR | FILE)
    azee eval [options] (-e EXPR | FILE)
    azee map [options] (-e EXPR | FILE)
    azee demo [options]
    azee (-h | --help)
    azee --version

Options:
    -e EXPR --expression=EXPR  Inline expression text.
    -g FILE --grammar=FILE     Grammar file (the shipped std.azgr by default).
    -m FILE --mapping=FILE     Mapping file (the shipped std.azmap by default).
    -f FMT --format=FMT        eval: json or table (json by default),
                               map: dot or triples (dot by default).
    --sign-ms=MS               Duration of a sign posture.
    --transition-ms=MS         Duration of a default transition.
    --ellipsis-ms=MS           Duration of an ellipsis placeholder.
    --hold-ms=MS               Duration of a held posture.
    -d --debug                 Log the pipeline steps on stderr.
    -h --help                  Show this screen.
    --version                  Show the version.

Exit status: 0 success, 1 usage or I/O error, 2 error diagnostics, 3 timing
conflict or constraint cycle. Warnings alone do not fail `check`: they are
printed and the status stays 0.
"""
from dataclasses import dataclass, field
import logging
import sys
from typing import Mapping, Optional

from docopt import docopt

from . import version
from .definitions import exit_codes, exit_codes_idx
from .exceptions import (
    AzeeSyntaxError,
    ExpressionError,
    GrammarError,
    MappingError,
    ResolveError,
)
from .expr import check, parse_expression, render_tree
from .grammar import parse_grammar_file, validate_grammar
from .score import EvalConfig, evaluate, export_score, resolve
from .sembridge import export_graph, map_to_graph, parse_mapping_file
from .stdlib import demo_cases, run_demo, std_grammar, std_mapping

log = logging.getLogger("azee.cli")

COMMANDS = ("check", "tree", "eval", "map", "demo")
FORMATS = {"eval": ("json", "table"), "map": ("dot", "triples")}
CONFIG_FLAGS = {
    "--sign-ms": "default_sign_ms",
    "--transition-ms": "default_transition_ms",
    "--ellipsis-ms": "ellipsis_ms",
    "--hold-ms": "hold_ms",
}
LOSS_PREFIX = {"dot": "// ", "triples": "# "}


class UsageError(Exception):
    """Invalid flag values, reported with exit status 1"""


@dataclass(frozen=True)
class CliInvocation:
    """One parsed command line"""

    command: str
    expression: Optional[str] = None
    path: Optional[str] = None
    grammar_path: Optional[str] = None
    mapping_path: Optional[str] = None
    overrides: Mapping[str, int] = field(default_factory=dict)
    fmt: Optional[str] = None
    debug: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command '{self.command}'")
        if self.expression is not None and self.path is not None:
            raise UsageError("inline expression and FILE are mutually exclusive")
        if self.fmt is not None and self.fmt not in FORMATS.get(self.command, ()):
            allowed = ", ".join(FORMATS.get(self.command, ())) or "none"
            raise UsageError(
                f"unsupported format '{self.fmt}' for {self.command} "
                f"(allowed: {allowed})"
            )

    @classmethod
    def from_args(cls, args):
        """Build an invocation from the dictionary docopt returns"""
        command = next(c for c in COMMANDS if args[c])
        overrides = {}
        for flag, name in CONFIG_FLAGS.items():
            if args[flag] is None:
                continue
            try:
                overrides[name] = int(args[flag])
            except ValueError:
                raise UsageError(
                    f"{flag} expects an integer, got '{args[flag]}'"
                ) from None
        return cls(
            command,
            expression=args["--expression"],
            path=args["FILE"],
            grammar_path=args["--grammar"],
            mapping_path=args["--mapping"],
            overrides=overrides,
            fmt=args["--format"],
            debug=args["--debug"],
        )

    @property
    def format(self):
        if self.fmt is not None:
            return self.fmt
        return FORMATS[self.command][0]

    @property
    def has_input(self):
        return self.expression is not None or self.path is not None


class _Runner:
    def __init__(self, invocation, stdout, stderr):
        self.invocation = invocation
        self.stdout = stdout
        self.stderr = stderr

    def out(self, text):
        if text:
            self.stdout.write(text + "\n")

    def err(self, text):
        self.stderr.write(f"azee: {text}\n")

    def grammar(self):
        if self.invocation.grammar_path is None:
            return std_grammar()
        return parse_grammar_file(self.invocation.grammar_path)

    def mapping(self):
        if self.invocation.mapping_path is None:
            return std_mapping()
        return parse_mapping_file(self.invocation.mapping_path)

    def config(self):
        try:
            return EvalConfig().replace(**self.invocation.overrides)
        except ValueError as e:
            raise UsageError(str(e)) from None

    def expression(self):
        invocation = self.invocation
        if invocation.expression is not None:
            return parse_expression(invocation.expression)
        with open(invocation.path, encoding="utf-8") as fobj:
            return parse_expression(fobj.read(), source=invocation.path)

    def run(self):
        handler = getattr(self, f"do_{self.invocation.command}")
        try:
            return handler()
        except UsageError as e:
            self.err(str(e))
            return exit_codes.USAGE
        except OSError as e:
            self.err(str(e))
            return exit_codes.USAGE
        except (AzeeSyntaxError, GrammarError, MappingError, ExpressionError) as e:
            self.err(str(e))
            return exit_codes.DIAGNOSTICS
        except ResolveError as e:
            self.err(str(e))
            return exit_codes.CONFLICT

    def do_check(self):
        try:
            grammar = self.grammar()
        except GrammarError as e:
            self.out("\n".join(f"{e.source}:{d}" for d in e.diagnostics))
            return exit_codes.DIAGNOSTICS
        except AzeeSyntaxError as e:
            self.out(str(e))
            return exit_codes.DIAGNOSTICS
        diagnostics = [f"{grammar.source_name}:{d}" for d in validate_grammar(grammar)]
        has_errors = False
        if self.invocation.has_input:
            try:
                expr = self.expression()
            except AzeeSyntaxError as e:
                self.out(str(e))
                return exit_codes.DIAGNOSTICS
            expression_diagnostics = check(expr, grammar)
            has_errors = bool(expression_diagnostics)
            source = self.invocation.path or "<expression>"
            diagnostics.extend(f"{source}:{d}" for d in expression_diagnostics)
        self.out("\n".join(diagnostics))
        return exit_codes.DIAGNOSTICS if has_errors else exit_codes.OK

    def do_tree(self):
        self.out(render_tree(self.expression()))
        return exit_codes.OK

    def do_eval(self):
        config = self.config()
        grammar = self.grammar()
        score = resolve(evaluate(self.expression(), grammar, config))
        self.out(export_score(score, self.invocation.format))
        return exit_codes.OK

    def do_map(self):
        mapping = self.mapping()
        graph, losses = map_to_graph(self.expression(), mapping)
        fmt = self.invocation.format
        self.out(export_graph(graph, fmt))
        self.out(losses.render(LOSS_PREFIX[fmt]))
        return exit_codes.OK

    def do_demo(self):
        config = self.config()
        grammar = self.grammar()
        mapping = self.mapping()
        status = exit_codes.OK
        for case in demo_cases():
            try:
                result = run_demo(case, grammar, mapping, config)
            except (ExpressionError, ResolveError) as e:
                self.out(f"{case.name}: error")
                self.err(f"{case.name}: {e}")
                status = exit_codes.DIAGNOSTICS
                continue
            if result.ok:
                self.out(f"{case.name}: ok")
                continue
            mismatches = [
                name
                for name, matches in (
                    ("tree", result.tree_matches),
                    ("score", result.score_matches),
                    ("graph", result.graph_matches),
                )
                if not matches
            ]
            self.out(f"{case.name}: mismatch ({', '.join(mismatches)})")
            status = exit_codes.DIAGNOSTICS
        return status


def run(invocation, stdout=None, stderr=None):
    """Execute an invocation, data goes to `stdout`, errors to `stderr`.

    Returns
    -------
    int
        The exit status.
    """
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    return _Runner(invocation, stdout, stderr).run()


def main(argv=None):
    args = docopt(__doc__, argv=argv, version=version)
    if args["--debug"]:
        logging.basicConfig(stream=sys.stderr)
        logging.getLogger("azee").setLevel(logging.DEBUG)
    try:
        invocation = CliInvocation.from_args(args)
    except UsageError as e:
        sys.stderr.write(f"azee: {e}\n")
        return exit_codes.USAGE
    log.debug("running %s", invocation)
    status = run(invocation)
    log.debug("exit status %d (%s)", status, exit_codes_idx[status])
    return status


if __name__ == "__main__":
    sys.exit(main())
