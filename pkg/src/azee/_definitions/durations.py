# -*- coding: utf-8 -*-
"""
Default durations in milliseconds.

Grammars only state duration classes and transition factors, these
numbers bind them to time when an expression is evaluated.
"""

# durations
data = dict(
    default_sign_ms=600,
    default_transition_ms=300,
    ellipsis_ms=800,
    hold_ms=400,
)
