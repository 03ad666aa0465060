# -*- coding: utf-8 -*-
"""
Articulator registry.

The value is the track order used when exporting scores.
``meta`` carries ellipsis placeholders only and is rejected in grammars.
"""

# articulators
data = dict(
    right_hand=0,
    left_hand=1,
    eyebrows=2,
    chin=3,
    lips=4,
    head=5,
    gaze=6,
    meta=7,
)
