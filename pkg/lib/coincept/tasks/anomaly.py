#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for anomaly scoring and the streaming evaluation protocol.

The score of step M compares the representation of M in three views of
the window ending at M: with the last step masked (z1), low-pass
perturbed (z2) and raw (z3):

    alpha_M = (|z1 - z3|_1 + |z2 - z3|_1) / 2
"""

import collections
import logging
from dataclasses import dataclass

import numpy as np
from sklearn.metrics import f1_score, precision_score, recall_score

from coincept.errors import InvalidArgumentError
from coincept.handlers import ThresholdHandler
from coincept.signal.wavelet import PerturbConfig, d4Filters, perturb
from coincept.tasks.features import mapChunks, slidingWindows
from coincept.tasks.preprocess import asSeries, difference, fitZscore, zscore

logger = logging.getLogger(__name__)

StreamResult = collections.namedtuple('StreamResult', ['precision', 'recall', 'f1', 'scores', 'flags',
                                                       'adjusted', 'labels'])


@dataclass
class AnomalySpec:
    diffOrder: int = 0
    trailingWindow: int = 100
    beta: float = 4.0
    delay: int = 7
    window: int = 64
    alpha: float = 0.2      # perturbation threshold of the second view
    cleanContext: bool = True

    def validate(self):
        if self.diffOrder < 0:
            raise InvalidArgumentError("difference order must be >= 0")
        if self.trailingWindow < 2:
            raise InvalidArgumentError("trailing window must be >= 2, got %d" % self.trailingWindow)
        if self.delay < 0:
            raise InvalidArgumentError("delay must be >= 0, got %d" % self.delay)
        if self.window < 1:
            raise InvalidArgumentError("scoring window must be >= 1")
        PerturbConfig(alpha=self.alpha).validate()
        return self


def scoreWindows(ckpt, windows, alpha=0.2, bank=None):
    """Scores of a B x W x N batch of (normalized) windows."""
    windows = np.asarray(windows, dtype=np.float64)
    B, W, _ = windows.shape
    if W < 1:
        raise InvalidArgumentError("empty scoring window")
    bank = bank or d4Filters()
    cfg = PerturbConfig(alpha=alpha)
    mask = np.zeros((B, W), dtype=bool)
    mask[:, -1] = True
    if W >= bank.K:
        pert = np.stack([perturb(w, cfg, bank) for w in windows])
    else:
        pert = windows
    z1 = ckpt.encode(windows, mask=mask, normalize=False)[:, -1, :].astype(np.float64)
    z2 = ckpt.encode(pert, normalize=False)[:, -1, :].astype(np.float64)
    z3 = ckpt.encode(windows, normalize=False)[:, -1, :].astype(np.float64)
    return 0.5 * (np.abs(z1 - z3).sum(axis=1) + np.abs(z2 - z3).sum(axis=1))


def anomalyScore(ckpt, window, alpha=0.2):
    """Score of the last step of one (normalized) T x N window."""
    window = asSeries(window)
    ckpt.checkInput(window)
    return float(scoreWindows(ckpt, window[None], alpha)[0])


def scoreSeries(ckpt, x, spec):
    """Score of every step t >= window-1 of a normalized series, NaN before."""
    wins = slidingWindows(x, spec.window)
    bank = d4Filters()
    scores = np.full(len(x), np.nan)
    if len(wins):
        parts = mapChunks(lambda lo, hi: scoreWindows(ckpt, wins[lo:hi], spec.alpha, bank), len(wins))
        scores[spec.window - 1:] = np.concatenate(parts)
    return scores


def segments(labels):
    """[start, end) of every run of ones."""
    labels = np.asarray(labels, dtype=int)
    edges = np.flatnonzero(np.diff(np.concatenate([[0], labels, [0]])))
    return list(zip(edges[0::2], edges[1::2]))


def delayAdjust(flags, labels, delay):
    """A true segment is fully detected iff a flag falls within ``delay``
    steps of its onset, else fully missed; other flags stay as they are."""
    flags = np.asarray(flags, dtype=int)
    out = flags.copy()
    for start, end in segments(labels):
        hit = flags[start:min(start + delay + 1, end)].any()
        out[start:end] = 1 if hit else 0
    return out


def prf(flags, labels):
    """Precision, recall and F1; empty denominators count as 1."""
    kw = dict(zero_division=1)
    return (float(precision_score(labels, flags, **kw)), float(recall_score(labels, flags, **kw)),
            float(f1_score(labels, flags, **kw)))


def streamFlags(ckpt, x, spec, handler=None):
    """Score and flag a normalized series in time order.

    With ``spec.cleanContext`` a flagged step is replaced by its
    predecessor (0 at the start) before any later step is scored, so a
    detected spike does not stay in the context of the next ``window - 1``
    scores. Returns (scores, flags).
    """
    handler = handler or ThresholdHandler(spec.trailingWindow, spec.beta)
    scores = scoreSeries(ckpt, x, spec)
    if not spec.cleanContext:
        return scores, handler.feed(scores)

    clean = np.array(x, dtype=np.float64)
    bank = d4Filters()
    W = spec.window
    flags = np.zeros(len(x), dtype=int)
    for t in range(W - 1, len(x)):
        if not handler.handleScore(t, float(scores[t])):
            continue
        flags[t] = 1
        clean[t] = clean[t - 1] if t > 0 else 0.0
        hi = min(t + W, len(x))
        if hi > t + 1:
            # windows ending at t+1 .. hi-1
            wins = slidingWindows(clean[t + 2 - W:hi], W)
            scores[t + 1:hi] = scoreWindows(ckpt, np.array(wins), spec.alpha, bank)
    handler.update()
    logger.debug("%u steps flagged and cleaned", flags.sum())
    return scores, flags


def anomalyStreamEval(ckpt, series, labels, spec, handler=None):
    """Difference, normalize, score, flag and evaluate one labeled stream."""
    spec.validate()
    x = asSeries(series)
    labels = np.asarray(labels, dtype=int)
    if len(labels) != len(x):
        raise InvalidArgumentError("%u labels for %u steps" % (len(labels), len(x)))
    ckpt.checkInput(x)
    x = difference(x, spec.diffOrder)
    labels = labels[spec.diffOrder:]
    x = zscore(x, fitZscore(x))

    if hasattr(handler, 'truth'):
        handler.truth = labels
    scores, flags = streamFlags(ckpt, x, spec, handler)
    adjusted = delayAdjust(flags, labels, spec.delay)
    p, r, f1 = prf(adjusted, labels)
    logger.info("%u flags, %u true segments: precision %.4f, recall %.4f, f1 %.4f",
                flags.sum(), len(segments(labels)), p, r, f1)
    return StreamResult(precision=p, recall=r, f1=f1, scores=scores, flags=flags,
                        adjusted=adjusted, labels=labels)

# EOF
