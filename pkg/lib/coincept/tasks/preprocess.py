#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for series normalization and differencing."""

import collections

import numpy as np

from coincept.errors import InvalidArgumentError

ZscoreStats = collections.namedtuple('ZscoreStats', ['mean', 'std'])


def asSeries(x):
    """View a series as M x N float64 (1-d input becomes one feature)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise InvalidArgumentError("series must be M x N, got shape %s" % (x.shape,))
    return x


def fitZscore(series):
    """Per-feature mean and std over one series or a list of them."""
    if isinstance(series, (list, tuple)):
        if not series:
            raise InvalidArgumentError("cannot fit statistics on no data")
        x = np.concatenate([asSeries(s) for s in series], axis=0)
    else:
        x = asSeries(series)
    return ZscoreStats(mean=x.mean(axis=0), std=x.std(axis=0))


def zscore(series, stats):
    """(x - mean) / std; features with std 0 are only centered."""
    x = asSeries(series)
    if len(stats.mean) != x.shape[1]:
        raise InvalidArgumentError("statistics for %u features, series has %u"
                                   % (len(stats.mean), x.shape[1]))
    std = np.asarray(stats.std, dtype=np.float64)
    return (x - stats.mean) / np.where(std > 0, std, 1.0)


def difference(series, d):
    """d-th order difference along time, shortens the series by d."""
    x = asSeries(series)
    if d < 0:
        raise InvalidArgumentError("difference order must be >= 0, got %d" % d)
    if d == 0:
        return x.copy()
    if d >= len(x):
        raise InvalidArgumentError("difference order %d needs more than %u steps" % (d, len(x)))
    return np.diff(x, n=d, axis=0)

# EOF
