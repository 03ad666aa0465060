#!/usr/bin/env python3

import unittest

import numpy as np

from azee.exceptions import AzeeSyntaxError
from azee.expr import (
    Apply,
    EllipsisNode,
    check,
    iter_nodes,
    node_at,
    parse_expression,
    random_expression,
    render_inline,
    render_tree,
    replace_at,
)
from azee.grammar import parse_grammar
from azee.stdlib import demo_cases, std_grammar

E1 = "side-info(house(), blue())"


class TestParseExpression(unittest.TestCase):
    def test_e1(self):
        expr = parse_expression(E1)
        assert Apply("side-info", (Apply("house"), Apply("blue"))) == expr

    def test_ellipsis(self):
        expr = parse_expression("[about 200 people]")
        assert EllipsisNode("about 200 people") == expr
        assert () == expr.args

    def test_commas_inside_ellipses_are_text(self):
        expr = parse_expression("side-info([Wednesday], [last week, morning])")
        assert "last week, morning" == expr.args[1].text

    def test_whitespace_and_comments_are_ignored(self):
        text = "# E1\nside-info(\n  house() ,  # left\n  blue(\n)\n)\n"
        assert parse_expression(E1) == parse_expression(text)

    def test_ellipsis_text_is_stripped(self):
        assert EllipsisNode("Java") == parse_expression("[  Java ]")

    def test_positions_are_recorded(self):
        expr = parse_expression("ctxt(\n  island(),\n  [Java])")
        assert (1, 1) == (expr.line, expr.column)
        assert (2, 3) == (expr.args[0].line, expr.args[0].column)
        assert (3, 3) == (expr.args[1].line, expr.args[1].column)

    def test_headers_need_not_exist(self):
        assert "nosuch" == parse_expression("nosuch()").header


class TestParseExpressionErrors(unittest.TestCase):
    def test_unbalanced_paren(self):
        with self.assertRaises(AzeeSyntaxError) as cm:
            parse_expression("seq(a(, b())")
        error = cm.exception
        assert (1, 7) == (error.line, error.column)
        assert "unexpected ',' inside '(' opened at 1:6" == error.message

    def test_unclosed_paren(self):
        with self.assertRaises(AzeeSyntaxError) as cm:
            parse_expression("side-info(house(), blue()")
        assert cm.exception.message.startswith("unbalanced '(' opened at 1:10")
        assert ("','", "')'") == cm.exception.expected

    def test_unbalanced_brackets(self):
        with self.assertRaises(AzeeSyntaxError) as cm:
            parse_expression("info-about([about 200 people, dead())")
        assert cm.exception.message.startswith("unbalanced '['")
        with self.assertRaises(AzeeSyntaxError) as cm:
            parse_expression("dead()]")
        assert "unbalanced ']'" == cm.exception.message

    def test_empty_ellipsis(self):
        for text in ("[]", "[   ]", "seq([ ], house())"):
            with self.assertRaises(AzeeSyntaxError) as cm:
                parse_expression(text)
            assert "empty ellipsis" == cm.exception.message

    def test_header_without_parentheses(self):
        with self.assertRaises(AzeeSyntaxError) as cm:
            parse_expression("side-info(house, blue())")
        assert ("'('",) == cm.exception.expected

    def test_trailing_input(self):
        with self.assertRaises(AzeeSyntaxError):
            parse_expression("house() blue()")

    def test_empty_input(self):
        with self.assertRaises(AzeeSyntaxError) as cm:
            parse_expression("  # nothing\n")
        assert "unexpected end of input" == cm.exception.message

    def test_source_name(self):
        with self.assertRaises(AzeeSyntaxError) as cm:
            parse_expression("house(", source="demo.aze")
        assert str(cm.exception).startswith("demo.aze:1:7:")

    def test_ellipsis_node_validates_its_text(self):
        with self.assertRaises(ValueError):
            EllipsisNode("")
        with self.assertRaises(ValueError):
            EllipsisNode(" padded ")
        with self.assertRaises(ValueError):
            EllipsisNode("a]b")


class TestCheck(unittest.TestCase):
    def setUp(self):
        self.grammar = std_grammar()

    def test_e1_is_well_formed(self):
        assert [] == check(parse_expression(E1), self.grammar)

    def test_arity_mismatch(self):
        diagnostics = check(parse_expression("side-info(house())"), self.grammar)

        assert 1 == len(diagnostics)
        assert "/" == diagnostics[0].subject
        message = diagnostics[0].message
        assert "arity mismatch for side-info: expected 2, got 1" == message

    def test_seq_requires_two_arguments(self):
        diagnostics = check(parse_expression("seq(house())"), self.grammar)
        assert ["seq requires at least 2 arguments, got 1"] == [
            d.message for d in diagnostics
        ]
        expr = parse_expression("seq(house(), blue(), dead())")
        assert [] == check(expr, self.grammar)

    def test_unknown_header(self):
        diagnostics = check(parse_expression("cat(iland(), Indonesia())"), self.grammar)

        assert 1 == len(diagnostics)
        assert "/0" == diagnostics[0].subject
        assert (
            "unknown rule header 'iland', did you mean 'island'?"
            == diagnostics[0].message
        )
        assert (1, 5) == (diagnostics[0].line, diagnostics[0].column)

    def test_ellipses_always_pass(self):
        assert [] == check(parse_expression("[anything at all]"), self.grammar)
        assert [] == check(parse_expression("cat([a], [b])"), self.grammar)

    def test_diagnostics_are_in_pre_order(self):
        expr = parse_expression("side-info(cat(house()), seq(blue()))")
        subjects = [d.subject for d in check(expr, self.grammar)]
        assert ["/0", "/1"] == subjects

    def test_overlay_covering_an_argument_on_its_articulator(self):
        expr = parse_expression("side-info(house(), side-info(blue(), dead()))")
        diagnostics = check(expr, self.grammar)

        assert 1 == len(diagnostics)
        assert "/" == diagnostics[0].subject
        assert (1, 1) == (diagnostics[0].line, diagnostics[0].column)
        assert (
            "overlay eyebrows 'raise' of side-info covers /1, which also uses eyebrows"
            == diagnostics[0].message
        )
        assert [] == check(expr, self.grammar, conflicts=False)

    def test_nested_context(self):
        expr = parse_expression("seq(house(), ctxt(ctxt([x], blue()), dead()))")
        assert [
            "overlay gaze 'context-hold' of ctxt covers /1/0, which also uses gaze"
        ] == [d.message for d in check(expr, self.grammar)]
        assert ["/1"] == [d.subject for d in check(expr, self.grammar)]

    def test_uncovered_arguments_may_share_the_articulator(self):
        for text in (
            "side-info(side-info(blue(), dead()), house())",
            "ctxt([x], ctxt([y], house()))",
            "seq(side-info(house(), blue()), side-info(dead(), [x]))",
        ):
            assert [] == check(parse_expression(text), self.grammar)

    def test_overlay_over_a_custom_rule(self):
        grammar = parse_grammar(
            "rule frown():\n"
            '  posture right_hand "frown" sign\n'
            '  overlay eyebrows "lowered" from start(0) to end(0)\n'
            "rule surprise(X):\n"
            "  slot X\n"
            '  overlay eyebrows "raised" from start(X) to end(X)\n'
        )
        diagnostics = check(parse_expression("surprise(frown())"), grammar)
        assert ["/"] == [d.subject for d in diagnostics]
        assert [] == check(parse_expression("surprise([x])"), grammar)

    def test_demo_expressions_check(self):
        for case in demo_cases():
            assert [] == check(case.expression, self.grammar)

    def test_check_is_monotone_under_ellipsis_substitution(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            expr = random_expression(self.grammar, rng, max_depth=4, ellipsis_rate=0.1)
            paths = [path for path, node in iter_nodes(expr) if node.args]
            if paths:
                # break the arity of one node
                path = paths[int(rng.integers(len(paths)))]
                node = node_at(expr, path)
                expr = replace_at(expr, path, Apply(node.header, node.args[:-1]))
            before = set(check(expr, self.grammar))

            paths = [path for path, _ in iter_nodes(expr)]
            site = paths[int(rng.integers(len(paths)))]
            substituted = replace_at(expr, site, EllipsisNode("substituted"))
            after = set(check(substituted, self.grammar))

            assert after <= before


class TestRender(unittest.TestCase):
    def test_render_inline(self):
        assert "house()" == render_inline(Apply("house"))
        assert E1 == render_inline(parse_expression(E1))
        assert "[about 200 people]" == render_inline(EllipsisNode("about 200 people"))

    def test_render_tree(self):
        assert "side-info\n  house\n  blue" == render_tree(parse_expression(E1))
        assert "[x]" == render_tree(EllipsisNode("x"))

    def test_render_tree_line_count_is_node_count(self):
        for case in demo_cases():
            lines = render_tree(case.expression).split("\n")
            assert len(list(iter_nodes(case.expression))) == len(lines)

    def test_java_landslide_tree(self):
        case = {c.name: c for c in demo_cases()}["java-landslide"]
        tree = render_tree(case.expression)
        lines = tree.split("\n")

        assert 22 == len(lines)
        for header in ("cat", "ctxt", "info-about", "seq"):
            assert any(line.strip() == header for line in lines)
        assert any(line.strip().startswith("[") for line in lines)
        assert "        island" in lines

    def test_inline_round_trip(self):
        grammar = std_grammar()
        rng = np.random.default_rng(42)
        for _ in range(1000):
            expr = random_expression(grammar, rng, max_depth=4, ellipsis_rate=0.15)
            assert expr == parse_expression(render_inline(expr))

    def test_tree_rendering_of_demo_matches_golden(self):
        for case in demo_cases():
            assert case.expected_tree == render_tree(case.expression) + "\n"


class TestPaths(unittest.TestCase):
    def setUp(self):
        self.expr = parse_expression(
            "info-about([about 200 people], side-info(dead(), [possibly]))"
        )

    def test_iter_nodes_is_pre_order(self):
        paths = [path for path, _ in iter_nodes(self.expr)]
        assert [(), (0,), (1,), (1, 0), (1, 1)] == paths

    def test_node_at(self):
        assert "dead" == node_at(self.expr, (1, 0)).header
        assert "possibly" == node_at(self.expr, (1, 1)).text
        with self.assertRaises(IndexError):
            node_at(self.expr, (0, 0))

    def test_replace_at(self):
        replaced = replace_at(self.expr, (1, 0), Apply("house"))

        assert "house" == node_at(replaced, (1, 0)).header
        assert "dead" == node_at(self.expr, (1, 0)).header
        assert self.expr.args[0] is replaced.args[0]
        assert Apply("blue") == replace_at(self.expr, (), Apply("blue"))
        with self.assertRaises(IndexError):
            replace_at(self.expr, (5,), Apply("blue"))


class TestRandomExpression(unittest.TestCase):
    def test_random_expressions_check(self):
        grammar = std_grammar()
        rng = np.random.default_rng(1)
        for _ in range(100):
            expr = random_expression(grammar, rng, max_depth=3, ellipsis_rate=0.2)
            assert [] == check(expr, grammar, conflicts=False)

    def test_depth_is_bounded(self):
        grammar = std_grammar()
        rng = np.random.default_rng(2)
        for _ in range(50):
            expr = random_expression(grammar, rng, max_depth=2)
            assert max(len(path) for path, _ in iter_nodes(expr)) <= 2

    def test_seeded_generators_agree(self):
        grammar = std_grammar()
        first = random_expression(grammar, np.random.default_rng(3))
        second = random_expression(grammar, np.random.default_rng(3))
        assert first == second

    def test_headers_restrict_the_draw(self):
        grammar = std_grammar()
        rng = np.random.default_rng(4)
        expr = random_expression(grammar, rng, headers=["seq", "house"])
        assert {"seq", "house"} >= {n.header for _, n in iter_nodes(expr)}

    def test_a_leaf_rule_is_required(self):
        grammar = parse_grammar("rule seq(P...): slot P")
        with self.assertRaises(ValueError):
            random_expression(grammar, np.random.default_rng(5))
