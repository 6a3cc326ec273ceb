#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for alignment and uniformity of representations.

Both work on L2-normalized rows:

    alignment  = mean |zp_i - zq_i|^2                   (positive pairs)
    uniformity = log mean_{i<j} exp(-2 |z_i - z_j|^2)
"""

import collections
import logging

import numpy as np
from scipy.spatial import distance
from scipy.special import logsumexp

from coincept.errors import InvalidArgumentError
from coincept.signal.wavelet import PerturbConfig, perturb
from coincept.tasks.features import poolSegment

logger = logging.getLogger(__name__)

Analysis = collections.namedtuple('Analysis', ['alignment', 'uniformity', 'centres', 'counts'])


def l2Normalize(z):
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 2:
        raise InvalidArgumentError("expected n x H representations, got %s" % (z.shape,))
    norm = np.linalg.norm(z, axis=1, keepdims=True)
    if np.any(norm == 0):
        raise InvalidArgumentError("zero-norm representation in row %u" % int(np.argmin(norm[:, 0])))
    return z / norm


def alignment(zp, zq):
    zp, zq = l2Normalize(zp), l2Normalize(zq)
    if zp.shape != zq.shape:
        raise InvalidArgumentError("pair shapes differ: %s vs %s" % (zp.shape, zq.shape))
    return float(np.mean(np.sum((zp - zq) ** 2, axis=1)))


def uniformity(z):
    z = l2Normalize(z)
    if len(z) < 2:
        raise InvalidArgumentError("uniformity needs at least 2 samples")
    d = distance.pdist(z, 'sqeuclidean')
    return float(logsumexp(-2.0 * d) - np.log(len(d)))


def pairwiseDistanceHistogram(zp, zq, bins=20):
    """Histogram of positive-pair distances on [0, 2], returns (bin centres, counts)."""
    zp, zq = l2Normalize(zp), l2Normalize(zq)
    d = np.linalg.norm(zp - zq, axis=1)
    counts, edges = np.histogram(d, bins=bins, range=(0.0, 2.0))
    return 0.5 * (edges[:-1] + edges[1:]), counts


def analyze(ckpt, X, alpha=0.2, bins=20):
    """Pooled representations of raw and low-pass series as positive pairs."""
    X = np.asarray(X, dtype=np.float64)
    cfg = PerturbConfig(alpha=alpha)
    Xt = np.stack([perturb(x, cfg) for x in X])
    zp = poolSegment(ckpt.encode(X))
    zq = poolSegment(ckpt.encode(Xt))
    centres, counts = pairwiseDistanceHistogram(zp, zq, bins)
    res = Analysis(alignment=alignment(zp, zq), uniformity=uniformity(zp), centres=centres, counts=counts)
    logger.info("alignment %.4f, uniformity %.4f over %u series", res.alignment, res.uniformity, len(X))
    return res

# EOF
