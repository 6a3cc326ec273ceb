#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for overlapping crop pairs."""

import collections

import numpy as np

from coincept.errors import InvalidArgumentError


class CropPair(collections.namedtuple('CropPair', ['a1', 'a2', 'b1', 'b2'])):
    """crop1 = [a1, b1), crop2 = [a2, b2), overlap = [a2, b1)."""
    __slots__ = ()

    @property
    def overlap(self):
        return self.b1 - self.a2

    def isValid(self, M, minOverlap=2):
        return 0 <= self.a1 <= self.a2 < self.b1 <= self.b2 <= M and self.overlap >= minOverlap


Views = collections.namedtuple('Views', ['xp', 'xq', 'xpTilde', 'xqTilde', 'offsetP', 'offsetQ', 'length'])


def sampleCropPair(M, minOverlap, rng):
    """Draw a CropPair for a length-M series.

    The overlap [a2, b1) is drawn first, weighted by the number of crop
    pairs around it, then a1 in [0, a2] and b2 in [b1, M] uniformly. The
    result is uniform over all valid pairs.
    """
    if minOverlap < 2:
        raise InvalidArgumentError("min overlap must be >= 2, got %d" % minOverlap)
    if M < minOverlap:
        raise InvalidArgumentError("length %d shorter than min overlap %d" % (M, minOverlap))

    # pairs per a2: (a2 + 1) choices of a1 times sum over b1 of (M - b1 + 1)
    a2s = np.arange(M - minOverlap + 1)
    n = M - minOverlap + 1 - a2s
    w = (a2s + 1) * n * (n + 1) / 2.0
    a2 = int(rng.choice(len(w), p=w / w.sum()))
    b1s = np.arange(a2 + minOverlap, M + 1)
    wb = (M - b1s + 1).astype(float)
    b1 = int(rng.choice(b1s, p=wb / wb.sum()))
    a1 = int(rng.integers(0, a2 + 1))
    b2 = int(rng.integers(b1, M + 1))
    return CropPair(a1, a2, b1, b2)


def sampleBatchCropPairs(M, minOverlap, B, rng):
    """One CropPair per window of a B x M batch.

    The geometry (both crop lengths and the overlap) is drawn once with
    ``sampleCropPair``; each window then gets its own shift, uniform over
    the positions that keep both crops inside [0, M).
    """
    if B < 1:
        raise InvalidArgumentError("batch size must be >= 1, got %d" % B)
    base = sampleCropPair(M, minOverlap, rng)
    shifts = rng.integers(-base.a1, M - base.b2 + 1, size=B)
    return [CropPair(*(int(v + o) for v in base)) for o in shifts]


def fullCropPairs(M, B):
    """Both crops span the whole window (no cropping)."""
    return [CropPair(0, 0, M, M)] * B


def geometryOf(cp):
    return (cp.b1 - cp.a1, cp.b2 - cp.a2, cp.a2 - cp.a1)


def makeViews(x, xTilde, cp):
    """Slice both crops out of the raw and the perturbed series.

    ``x`` is indexed along its first axis (time) unless it is 3-d, then the
    second axis (B x M x N). ``cp`` is one CropPair, or for a batch one per
    window, all of the same geometry. ``offsetP``/``offsetQ`` locate the
    overlap inside crop1 and crop2.
    """
    x = np.asarray(x)
    xTilde = np.asarray(xTilde)
    if x.shape != xTilde.shape:
        raise InvalidArgumentError("raw and perturbed shapes differ: %s vs %s"
                                   % (x.shape, xTilde.shape))
    if not isinstance(cp, CropPair):
        return _batchViews(x, xTilde, list(cp))
    axis = 1 if x.ndim == 3 else 0
    M = x.shape[axis]
    if not cp.isValid(M):
        raise InvalidArgumentError("crop pair %s invalid for length %d" % (tuple(cp), M))

    def cut(a, lo, hi):
        return a[:, lo:hi] if axis == 1 else a[lo:hi]

    return Views(xp=cut(x, cp.a1, cp.b1), xq=cut(x, cp.a2, cp.b2),
                 xpTilde=cut(xTilde, cp.a1, cp.b1), xqTilde=cut(xTilde, cp.a2, cp.b2),
                 offsetP=cp.a2 - cp.a1, offsetQ=0, length=cp.overlap)


def _batchViews(x, xTilde, pairs):
    if x.ndim != 3 or len(pairs) != x.shape[0]:
        raise InvalidArgumentError("need one crop pair per window, got %u for shape %s"
                                   % (len(pairs), x.shape))
    if len({geometryOf(cp) for cp in pairs}) != 1:
        raise InvalidArgumentError("crop pairs of one batch must share their lengths")
    views = [makeViews(x[b], xTilde[b], cp) for b, cp in enumerate(pairs)]
    first = views[0]
    return Views(xp=np.stack([v.xp for v in views]), xq=np.stack([v.xq for v in views]),
                 xpTilde=np.stack([v.xpTilde for v in views]),
                 xqTilde=np.stack([v.xqTilde for v in views]),
                 offsetP=first.offsetP, offsetQ=first.offsetQ, length=first.length)

# EOF
