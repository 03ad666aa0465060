# -*- coding: utf-8 -*-
"""
Exit statuses of the ``azee`` command line tool.
"""

# exit codes
data = dict(
    OK=0,
    USAGE=1,
    DIAGNOSTICS=2,
    CONFLICT=3,
)
