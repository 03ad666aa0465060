#!/usr/bin/env python3

from azee._definitions.articulators import data as articulators
from azee._definitions.durations import data as durations
from azee._definitions.duration_classes import data as duration_classes
from azee._definitions.exit_codes import data as exit_codes
from azee._definitions.node_kinds import data as node_kinds


class AttrDict(dict):
    """A dictionary which allows access to its key through attributes."""

    def __init__(self, *args, **kwargs):
        super(AttrDict, self).__init__(*args, **kwargs)
        self.__dict__ = self


articulators = AttrDict(articulators)
durations = AttrDict(durations)
duration_classes = AttrDict(duration_classes)
exit_codes = AttrDict(exit_codes)
node_kinds = AttrDict(node_kinds)

exit_codes_idx = {v: k for k, v in exit_codes.items()}

# the only track ellipsis placeholders may occupy
META = "meta"
