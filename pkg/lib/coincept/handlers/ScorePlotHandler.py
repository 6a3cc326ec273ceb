#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Handler to plot anomaly scores, threshold and flags."""

import logging

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np

from coincept.handlers.ThresholdHandler import ThresholdHandler

logger = logging.getLogger(__name__)


class ScorePlotHandler(ThresholdHandler):
    """ScorePlotHandler."""

    def __init__(self, window=100, beta=4.0):
        super().__init__(window, beta)
        self.fig = None
        self.steps = []
        self.scores = []
        self.thresholds = []
        self.flags = []
        self.truth = None

    def reset(self):
        super().reset()
        self.steps, self.scores, self.thresholds, self.flags = [], [], [], []

    def handleScore(self, t, score):
        ret = ThresholdHandler.handleScore(self, t, score)
        self.steps.append(t)
        self.scores.append(score)
        self.thresholds.append(self.threshold)
        self.flags.append(ret)
        return ret

    def plot(self, path):
        if self.fig is None:
            self.fig, self.ax = plt.subplots(nrows=1, ncols=1, figsize=(10, 4))
        ax = self.ax
        ax.cla()

        t = np.asarray(self.steps)
        ax.plot(t, self.scores, 'b-', linewidth=0.8, label='score')
        ax.plot(t, self.thresholds, 'k--', linewidth=0.8, label='threshold')
        flagged = np.asarray(self.flags, dtype=bool)
        if flagged.any():
            ax.plot(t[flagged], np.asarray(self.scores)[flagged], 'rx', label='flag')
        if self.truth is not None:
            for s in np.flatnonzero(self.truth):
                ax.axvline(s, color='g', alpha=0.3)

        ax.set_xlabel('step')
        ax.set_ylabel('anomaly score')
        ax.grid(True)
        ax.legend(loc='upper right')
        self.fig.savefig(path)
        logger.info("wrote score plot %s", path)

    def close(self):
        if self.fig:
            plt.close(self.fig)
            self.fig = None

# EOF
