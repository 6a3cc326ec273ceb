#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for per-timestep features from sliding windows."""

import concurrent.futures
import logging
import os

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from coincept.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

THREADS_ENV = 'COINCEPT_THREADS'
CHUNK = 128


def workerCount():
    raw = os.environ.get(THREADS_ENV, '1')
    try:
        n = int(raw)
    except ValueError:
        raise InvalidArgumentError("%s must be an integer, got '%s'" % (THREADS_ENV, raw)) from None
    return max(1, n)


def poolSegment(z):
    """Max over time of B x T x H representations."""
    z = np.asarray(z)
    if z.ndim != 3 or z.shape[1] < 1:
        raise InvalidArgumentError("expected B x T x H with T >= 1, got %s" % (z.shape,))
    return z.max(axis=1)


def slidingWindows(x, window):
    """All length-``window`` windows of an M x N series, (M-window+1) x window x N.

    Window i ends at step i + window - 1.
    """
    if window < 1 or window > len(x):
        raise InvalidArgumentError("window %d does not fit a series of %u steps" % (window, len(x)))
    return np.moveaxis(sliding_window_view(x, window, axis=0), -1, 1)


def mapChunks(fn, n, chunk=CHUNK):
    """Apply ``fn(lo, hi)`` over [0, n) in chunks, results in index order."""
    bounds = [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]
    workers = min(workerCount(), max(len(bounds), 1))
    if workers == 1:
        return [fn(lo, hi) for lo, hi in bounds]
    logger.debug("scoring %u chunks on %u threads", len(bounds), workers)
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: fn(*b), bounds))


def lastStepFeatures(ckpt, x, window):
    """Representation of the last step of every window ending at t >= window-1.

    ``x`` is an already normalized M x N series; rows t < window-1 are NaN.
    """
    wins = slidingWindows(x, window)
    H = ckpt.encoder.outputDim

    def run(lo, hi):
        return ckpt.encode(wins[lo:hi], normalize=False)[:, -1, :]

    out = np.full((len(x), H), np.nan)
    if len(wins):
        out[window - 1:] = np.concatenate(mapChunks(run, len(wins)))
    return out


def windowFeatures(x, window):
    """Flattened raw windows, the same layout as ``lastStepFeatures``."""
    wins = slidingWindows(x, window)
    out = np.full((len(x), window * x.shape[1]), np.nan)
    out[window - 1:] = wins.reshape(len(wins), -1)
    return out

# EOF
