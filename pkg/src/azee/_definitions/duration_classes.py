# -*- coding: utf-8 -*-
"""
Posture duration classes and the configuration field each one reads.
"""

# duration classes
data = dict(
    sign="default_sign_ms",
    hold="hold_ms",
)
