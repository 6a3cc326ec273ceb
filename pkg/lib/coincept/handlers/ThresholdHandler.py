#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Handler to flag scores above a trailing mean + beta * std."""

from collections import deque
from typing import Deque

import numpy as np

from coincept.errors import InvalidArgumentError
from coincept.handlers.Handler import Handler


class ThresholdHandler(Handler):
    """ThresholdHandler."""

    def __init__(self, window=100, beta=4.0):
        if window < 2:
            raise InvalidArgumentError("trailing window must be >= 2, got %d" % window)
        self.window = window
        self.beta = beta
        self.recent = deque(maxlen=window)  # type: Deque[float]
        self.threshold = np.nan

    def reset(self):
        self.recent.clear()
        self.threshold = np.nan

    def handleScore(self, t, score):
        """flag score against the previous ``window`` scores (never before the window is full)"""
        flagged = False
        if len(self.recent) == self.window:
            r = np.fromiter(self.recent, dtype=np.float64, count=self.window)
            self.threshold = float(r.mean() + self.beta * r.std())
            flagged = score > self.threshold
        else:
            self.threshold = np.nan
        self.recent.append(float(score))
        return bool(flagged)

# EOF
