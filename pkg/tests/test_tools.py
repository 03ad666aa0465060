#!/usr/bin/env python3

import unittest
from fractions import Fraction

from azee.expr import parse_expression
from azee.tools import (
    cached_property,
    format_path,
    nearest_match,
    round_half_up,
    to_fraction,
    unfold_path,
)


class TestCachedProperty(unittest.TestCase):
    def test_cached_property(self):
        class Test:
            @cached_property
            def prop(self):
                pass

        self.assertTrue(isinstance(Test.prop, cached_property))

    def test_cached_property_is_evaluated_once(self):
        class Test:
            calls = 0

            @cached_property
            def prop(self):
                Test.calls += 1
                return 42

        obj = Test()
        assert 42 == obj.prop
        assert 42 == obj.prop
        assert 1 == Test.calls


class TestUnfoldPath(unittest.TestCase):
    def test_unfold_path(self):
        expr = parse_expression("a(b(), c(d(), [e]))")

        assert expr is unfold_path(expr, ())
        assert "b" == unfold_path(expr, (0,)).header
        assert "d" == unfold_path(expr, (1, 0)).header
        assert "e" == unfold_path(expr, [1, 1]).text

    def test_unfold_path_raises_index_error(self):
        expr = parse_expression("a(b(), c(d(), [e]))")
        with self.assertRaises(IndexError):
            unfold_path(expr, (1, 99))
        with self.assertRaises(IndexError):
            unfold_path(expr, (1, 1, 0))


class TestFormatPath(unittest.TestCase):
    def test_format_path(self):
        assert "/" == format_path(())
        assert "/0" == format_path((0,))
        assert "/1/1/2" == format_path([1, 1, 2])


class TestToFraction(unittest.TestCase):
    def test_to_fraction(self):
        assert Fraction(1, 3) == to_fraction("1", "3")
        assert Fraction(2) == to_fraction("2")
        assert Fraction(1, 2) == to_fraction(2, 4)

    def test_to_fraction_raises_for_non_positive_values(self):
        with self.assertRaises(ValueError):
            to_fraction("0", "3")
        with self.assertRaises(ZeroDivisionError):
            to_fraction("1", "0")


class TestRoundHalfUp(unittest.TestCase):
    def test_round_half_up(self):
        assert 100 == round_half_up(Fraction(300, 3))
        assert 3 == round_half_up(Fraction(5, 2))
        assert 2 == round_half_up(Fraction(7, 4))
        assert 1 == round_half_up(Fraction(4, 3))
        assert 334 == round_half_up(Fraction(1001, 3))

    def test_round_half_up_differs_from_bankers_rounding(self):
        assert 2 == round(Fraction(5, 2))
        assert 3 == round_half_up(Fraction(5, 2))


class TestNearestMatch(unittest.TestCase):
    def test_nearest_match(self):
        assert "side-info" == nearest_match("side-inf", ["seq", "side-info", "cat"])
        assert nearest_match("zzz", ["seq", "side-info", "cat"]) is None
