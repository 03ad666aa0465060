#!/usr/bin/env python3
import difflib
import math
from fractions import Fraction


class cached_property:
    """A simple cache decorator for properties."""

    def __init__(self, function):
        self.function = function

    def __get__(self, obj, cls):
        if obj is None:
            return self
        prop = obj.__dict__[self.function.__name__] = self.function(obj)
        return prop


def unfold_path(node, path):
    """Follow a chain of child indices and return the node it addresses"""
    original_node = node
    for depth, idx in enumerate(path):
        try:
            node = node.args[idx]
        except (IndexError, AttributeError):
            raise IndexError(
                "IndexError while accessing a child of '{}' at depth {} ({}) "
                "using the node path {}".format(
                    repr(original_node), depth, idx, format_path(path)
                )
            )
    return node


def format_path(path):
    """Render a node path, ``/`` is the root.

    >>> format_path(())
    '/'
    >>> format_path((1, 0))
    '/1/0'
    """
    return "/" + "/".join(str(i) for i in path)


def to_fraction(numerator, denominator="1"):
    """Build a positive rational from its textual parts"""
    value = Fraction(int(numerator), int(denominator))
    if value <= 0:
        raise ValueError(f"expected a positive factor, got {value}")
    return value


def round_half_up(value):
    """Round a rational to the nearest integer, halves going up.

    >>> round_half_up(Fraction(300, 3))
    100
    >>> round_half_up(Fraction(5, 2))
    3
    """
    return math.floor(Fraction(value) + Fraction(1, 2))


def nearest_match(name, candidates):
    """Return the closest candidate to `name` or None"""
    matches = difflib.get_close_matches(name, sorted(candidates), n=1)
    return matches[0] if matches else None
