# -*- coding: utf-8 -*-
"""
Semantic graph node kinds and the DOT shape each one is drawn with.
"""

# node kinds
data = {
    "instance": "ellipse",
    "class": "box",
    "literal": "note",
}
