#!/usr/bin/env python3

import os
import tempfile
import unittest
from fractions import Fraction

from azee.exceptions import AzeeSyntaxError, GrammarError, UnknownRuleError
from azee.grammar import (
    Anchor,
    Diagnostic,
    Grammar,
    Overlay,
    Posture,
    Rule,
    Seq,
    Slot,
    TransitionSpec,
    lookup_rule,
    parse_grammar,
    parse_grammar_file,
    render_grammar,
    validate_grammar,
)
from azee.stdlib import data_path, std_grammar

SIDE_INFO = """
rule side-info(X, Y):
  seq:
    slot X
    transition factor 1/3
    slot Y
  overlay eyebrows "raise" from end(X) to end(Y)
"""


class TestParseGrammar(unittest.TestCase):
    def test_minimal_rule(self):
        grammar = parse_grammar('rule house(): posture right_hand "house" sign')

        assert 1 == len(grammar)
        rule = grammar["house"]
        assert () == rule.params
        assert Posture("right_hand", "house", "sign") == rule.rhs
        assert 0 == rule.arity

    def test_side_info(self):
        rule = parse_grammar(SIDE_INFO)["side-info"]

        assert ("X", "Y") == rule.params
        assert not rule.variadic
        assert isinstance(rule.rhs, Seq)
        inner = rule.rhs.items[0]
        assert (Slot("X"), Slot("Y")) == inner.items
        assert Fraction(1, 3) == inner.transitions[0].factor
        overlay = rule.rhs.overlays[0]
        assert "eyebrows" == overlay.articulator
        assert "raise" == overlay.state
        assert Anchor("X", "end") == overlay.start
        assert Anchor("Y", "end") == overlay.end

    def test_positions_are_recorded(self):
        rule = parse_grammar(SIDE_INFO)["side-info"]

        assert 2 == rule.line
        assert 4 == rule.rhs.items[0].items[0].line
        assert 7 == rule.rhs.overlays[0].line
        assert 3 == rule.rhs.overlays[0].column

    def test_implicit_sequence_uses_default_transitions(self):
        grammar = parse_grammar(
            "rule pair(A, B):\n"
            "  slot A\n"
            "  slot B\n"
            "  posture head \"nod\" hold\n"
        )
        rhs = grammar["pair"].rhs

        assert 3 == len(rhs.items)
        assert (TransitionSpec(), TransitionSpec()) == rhs.transitions
        assert "hold" == rhs.items[2].duration_class

    def test_overlays_take_no_item_position(self):
        grammar = parse_grammar(
            "rule two-handed():\n"
            '  posture right_hand "x" sign\n'
            '  overlay left_hand "x" from start(0) to end(0)\n'
        )
        rhs = grammar["two-handed"].rhs

        assert 1 == len(rhs.items)
        assert () == rhs.transitions
        assert 1 == len(rhs.overlays)

    def test_variadic_rule(self):
        rule = parse_grammar("rule seq(P...):\n  slot P\n")["seq"]

        assert rule.variadic
        assert ("P",) == rule.params
        assert 2 == rule.arity

    def test_comments_and_blank_lines_are_ignored(self):
        grammar = parse_grammar(
            "# leaves\n\nrule house():  # a building\n"
            '  posture right_hand "house" sign  # dominant hand\n\n'
        )
        assert ["house"] == list(grammar)

    def test_parsing_is_deterministic(self):
        assert parse_grammar(SIDE_INFO) == parse_grammar(SIDE_INFO)

    def test_source_name_is_kept(self):
        grammar = parse_grammar(SIDE_INFO, source_name="side.azgr")
        assert "side.azgr" == grammar.source_name

    def test_parse_grammar_file(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            fname = os.path.join(tmpdir, "leaves.azgr")
            with open(fname, "w", encoding="utf-8") as fobj:
                fobj.write('rule café(): posture right_hand "café" sign\n')
            with self.assertRaises(AzeeSyntaxError):
                parse_grammar_file(fname)

            with open(fname, "w", encoding="utf-8") as fobj:
                fobj.write('rule cafe(): posture right_hand "café" sign\n')
            grammar = parse_grammar_file(fname)
            assert "café" == grammar["cafe"].rhs.state
            assert fname == grammar.source_name


class TestParseGrammarErrors(unittest.TestCase):
    def assertGrammarError(self, text, message):
        with self.assertRaises(GrammarError) as cm:
            parse_grammar(text)
        messages = [d.message for d in cm.exception.diagnostics]
        assert message in messages, messages
        return cm.exception

    def test_unresolved_parameter(self):
        error = self.assertGrammarError("rule bad(X): slot Y", "unresolved parameter Y")
        assert all(d.is_error for d in error.diagnostics)
        assert "bad" == error.diagnostics[0].subject

    def test_duplicate_header(self):
        text = 'rule a(): posture head "x" sign\nrule a(): posture head "y" sign\n'
        error = self.assertGrammarError(
            text, "duplicate header (first defined on line 1)"
        )
        assert 2 == error.diagnostics[0].line

    def test_unknown_articulator(self):
        self.assertGrammarError(
            'rule a(): posture tail "wag" sign', "unknown articulator 'tail'"
        )

    def test_meta_is_reserved(self):
        self.assertGrammarError(
            'rule a(): posture meta "x" sign',
            "articulator 'meta' is reserved for ellipsis placeholders",
        )

    def test_anchor_to_missing_item(self):
        self.assertGrammarError(
            "rule a():\n"
            '  posture right_hand "x" sign\n'
            '  overlay eyebrows "raise" from start(0) to end(3)\n',
            "anchor end(3) refers to a missing item",
        )

    def test_unresolved_anchor(self):
        self.assertGrammarError(
            "rule a(X):\n"
            "  slot X\n"
            '  overlay eyebrows "raise" from start(X) to end(Z)\n',
            "unresolved anchor end(Z)",
        )

    def test_empty_overlay(self):
        self.assertGrammarError(
            "rule a():\n"
            '  posture right_hand "x" sign\n'
            '  overlay eyebrows "raise" from end(0) to start(0)\n',
            "overlay from end(0) to start(0) is empty",
        )

    def test_reversed_overlay(self):
        self.assertGrammarError(
            "rule a(X, Y):\n"
            "  slot X\n"
            "  slot Y\n"
            '  overlay head "tilt" from start(Y) to end(X)\n',
            "overlay from start(Y) to end(X) is empty",
        )

    def test_overlay_over_a_posture_on_its_articulator(self):
        self.assertGrammarError(
            "rule a(X):\n"
            "  seq:\n"
            '    posture head "nod" sign\n'
            "    slot X\n"
            '  overlay head "tilt" from start(0) to end(X)\n',
            "overlay on head covers the posture 'nod' on the same articulator",
        )

    def test_overlapping_overlays_on_one_articulator(self):
        error = self.assertGrammarError(
            "rule a(X, Y):\n"
            "  slot X\n"
            "  slot Y\n"
            '  overlay head "tilt" from start(X) to end(Y)\n'
            '  overlay head "shake" from start(Y) to end(Y)\n',
            "overlay on head overlaps the overlay 'tilt' on the same articulator",
        )
        assert 5 == error.diagnostics[0].line

    def test_successive_overlays_on_one_articulator(self):
        grammar = parse_grammar(
            "rule a(X, Y):\n"
            "  slot X\n"
            "  slot Y\n"
            '  overlay head "tilt" from start(X) to end(X)\n'
            '  overlay head "shake" from start(Y) to end(Y)\n'
        )
        assert 2 == len(grammar["a"].rhs.overlays)

    def test_overlays_alone(self):
        self.assertGrammarError(
            'rule a(): overlay eyebrows "raise" from start(0) to end(0)',
            "overlays alone have nothing to anchor to",
        )

    def test_variadic_rule_takes_a_single_parameter(self):
        self.assertGrammarError(
            "rule a(X, P...): slot P", "a variadic rule takes exactly one parameter"
        )
        with self.assertRaises(AzeeSyntaxError):
            parse_grammar("rule a(P..., X): slot P")

    def test_grammar_error_is_a_value_error(self):
        with self.assertRaises(ValueError):
            parse_grammar("rule bad(X): slot Y")


class TestSyntaxErrors(unittest.TestCase):
    def test_syntax_error_carries_position(self):
        with self.assertRaises(AzeeSyntaxError) as cm:
            parse_grammar("rule a(:\n", source_name="broken.azgr")
        error = cm.exception
        assert "broken.azgr" == error.source
        assert 1 == error.line
        assert 8 == error.column
        assert ("parameter name",) == error.expected
        assert str(error).startswith("broken.azgr:1:8: unexpected ':'")

    def test_unknown_statement(self):
        with self.assertRaises(AzeeSyntaxError) as cm:
            parse_grammar("rule a():\n  wiggle right_hand\n")
        assert 2 == cm.exception.line
        assert "'posture'" in cm.exception.expected

    def test_transition_must_follow_an_item(self):
        with self.assertRaises(AzeeSyntaxError) as cm:
            parse_grammar("rule a(X):\n  transition factor 1/3\n  slot X\n")
        assert "a transition must follow an item" == cm.exception.message

    def test_transition_must_be_followed_by_an_item(self):
        with self.assertRaises(AzeeSyntaxError) as cm:
            parse_grammar("rule a(X):\n  slot X\n  transition factor 2\n")
        assert "a transition must be followed by an item" == cm.exception.message

    def test_transition_factor_must_be_positive(self):
        for factor in ("0", "0/3", "1/0"):
            with self.assertRaises(AzeeSyntaxError):
                parse_grammar(
                    f"rule a(X, Y):\n  slot X\n  transition factor {factor}\n  slot Y\n"
                )

    def test_unterminated_string(self):
        with self.assertRaises(AzeeSyntaxError) as cm:
            parse_grammar('rule a(): posture head "nod sign')
        assert "unterminated string" == cm.exception.message

    def test_tabs_are_rejected(self):
        with self.assertRaises(AzeeSyntaxError):
            parse_grammar('rule a():\n\tposture head "nod" sign\n')

    def test_inconsistent_indentation(self):
        with self.assertRaises(AzeeSyntaxError) as cm:
            parse_grammar(
                "rule a(X, Y):\n"
                "    slot X\n"
                "  slot Y\n"
            )
        assert "inconsistent indentation" == cm.exception.message

    def test_missing_body(self):
        with self.assertRaises(AzeeSyntaxError):
            parse_grammar("rule a():\n")

    def test_empty_seq_block(self):
        with self.assertRaises(AzeeSyntaxError):
            parse_grammar("rule a():\n  seq:\n")


class TestLookupRule(unittest.TestCase):
    def setUp(self):
        self.grammar = std_grammar()

    def test_lookup_rule(self):
        assert 2 == lookup_rule(self.grammar, "side-info").arity
        assert 0 == lookup_rule(self.grammar, "house").arity
        assert 2 == self.grammar["cat"].arity

    def test_unknown_header(self):
        with self.assertRaises(UnknownRuleError) as cm:
            lookup_rule(self.grammar, "nosuch")
        assert "nosuch" == cm.exception.header

    def test_unknown_header_suggests_nearest_match(self):
        with self.assertRaises(KeyError) as cm:
            self.grammar["side-inf"]
        assert "side-info" == cm.exception.suggestion
        assert "did you mean 'side-info'?" in str(cm.exception)

    def test_grammar_is_a_mapping(self):
        assert "house" in self.grammar
        assert "nosuch" not in self.grammar
        assert set(self.grammar.keys()) == set(self.grammar.rules)
        assert len(self.grammar) == len(self.grammar.rules)


class TestValidateGrammar(unittest.TestCase):
    def test_std_grammar_is_sound(self):
        assert [] == validate_grammar(std_grammar())

    def test_unused_parameter_is_a_warning(self):
        grammar = Grammar({"a": Rule("a", ("X",), Posture("head", "nod"))})
        diagnostics = validate_grammar(grammar)

        assert 1 == len(diagnostics)
        assert Diagnostic.WARNING == diagnostics[0].severity
        assert "parameter X is never used" == diagnostics[0].message

    def test_unused_parameter_is_logged_while_parsing(self):
        with self.assertLogs("azee.grammar", level="WARNING") as cm:
            parse_grammar('rule a(X): posture head "nod" sign')
        assert "parameter X is never used" in cm.output[0]

    def test_anchor_to_missing_item_is_one_error(self):
        seq = Seq(
            (Posture("right_hand", "x"),),
            overlays=(
                Overlay("eyebrows", "raise", Anchor(0, "end"), Anchor(2, "end")),
            ),
        )
        diagnostics = validate_grammar(Grammar({"a": Rule("a", (), seq)}))

        assert 1 == len(diagnostics)
        assert diagnostics[0].is_error

    def test_transition_count(self):
        seq = Seq((Slot("X"), Slot("Y")), transitions=())
        diagnostics = validate_grammar(Grammar({"a": Rule("a", ("X", "Y"), seq)}))

        assert [
            "sequence of 2 items needs 1 transitions, got 0"
        ] == [d.message for d in diagnostics]

    def test_invalid_header(self):
        rule = Rule("9lives", (), Posture("head", "nod"))
        diagnostics = validate_grammar(Grammar({"9lives": rule}))
        assert "invalid header '9lives'" == diagnostics[0].message

    def test_diagnostics_are_sorted(self):
        grammar = Grammar(
            {
                "zeta": Rule("zeta", (), Slot("A")),
                "alpha": Rule("alpha", (), Posture("tail", "wag")),
            }
        )
        diagnostics = validate_grammar(grammar)

        assert ["alpha", "zeta"] == [d.subject for d in diagnostics]
        assert "1:1: error: [alpha] unknown articulator 'tail'" == str(
            diagnostics[0]._replace(line=1, column=1)
        )


class TestRenderGrammar(unittest.TestCase):
    def test_std_grammar_round_trip(self):
        grammar = std_grammar()
        assert grammar == parse_grammar(render_grammar(grammar))

    def test_render_side_info(self):
        expected = (
            "rule side-info(X, Y):\n"
            "  seq:\n"
            "    slot X\n"
            "    transition factor 1/3\n"
            "    slot Y\n"
            '  overlay eyebrows "raise" from end(X) to end(Y)\n'
        )
        assert expected == render_grammar(parse_grammar(SIDE_INFO))

    def test_round_trip_of_nested_sequences(self):
        text = (
            "rule a(X, Y, Z):\n"
            "  seq:\n"
            "    seq:\n"
            "      slot X\n"
            "      transition factor 2/5\n"
            "      slot Y\n"
            "  transition factor 3/2\n"
            "  slot Z\n"
            '  overlay head "tilt" from start(1) to end(Z)\n'
            'rule b(): posture head "nod" hold\n'
        )
        grammar = parse_grammar(text)
        assert grammar == parse_grammar(render_grammar(grammar))

    def test_shipped_file_is_the_std_grammar(self):
        assert std_grammar() == parse_grammar_file(data_path("std.azgr"))
