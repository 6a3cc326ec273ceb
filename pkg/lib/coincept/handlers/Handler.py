#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Base class of streaming score handlers.

A handler sees the anomaly scores of one stream in time order, one call per
step, and decides on the spot whether a step is flagged. It must not look
ahead.
"""

from abc import ABC, abstractmethod

import numpy as np


class Handler(ABC):
    """Handler."""

    def reset(self):
        """forget everything seen so far"""
        pass

    @abstractmethod
    def handleScore(self, t, score):
        """take the score of step t, return True if the step is flagged"""

    def update(self):
        """called once after the last score (redraw, flush, ...)"""
        pass

    def feed(self, scores):
        """Run a whole score trace through the handler.

        Non-finite scores (steps without a full context) are not passed on
        and never flagged.
        """
        flags = np.zeros(len(scores), dtype=int)
        for t, s in enumerate(scores):
            if np.isfinite(s):
                flags[t] = self.handleScore(t, float(s))
        self.update()
        return flags

# EOF
