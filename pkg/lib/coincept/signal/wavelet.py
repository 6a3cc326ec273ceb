#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for the Daubechies D4 filter bank and wavelet shrinkage.

The bank is handed to PyWavelets as a custom ``pywt.Wavelet`` and every
transform runs in ``periodization`` mode: each level keeps ceil(n/2)
coefficients per band and odd-length levels are extended by repeating the
last sample once. Analysis convolves with (g, h), synthesis with the
time-reversed pair.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Union

import numpy as np
import pywt

from coincept.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

MODE = 'periodization'


@dataclass(frozen=True)
class FilterBank:
    g: np.ndarray       # low-pass analysis
    h: np.ndarray       # high-pass analysis
    gRec: np.ndarray
    hRec: np.ndarray

    @property
    def K(self):
        return len(self.g)

    @property
    def wavelet(self):
        """The bank as a PyWavelets wavelet object."""
        w = pywt.Wavelet('coincept-d4', filter_bank=[list(self.g), list(self.h),
                                                     list(self.gRec), list(self.hRec)])
        w.orthogonal = True
        return w


@dataclass
class WaveletPyramid:
    approx: np.ndarray
    details: List[np.ndarray]       # d^1 (finest) .. d^L
    levelLengths: List[int]         # signal length entering level 1..L, then len(approx)
    originalLength: int

    @property
    def levels(self):
        return len(self.details)

    def energy(self):
        return float(np.sum(self.approx ** 2) + sum(np.sum(d ** 2) for d in self.details))


@dataclass
class PerturbConfig:
    alpha: float = 0.2
    levels: Union[int, str] = 'auto'

    def validate(self):
        if not 0.0 <= self.alpha < 1.0:
            raise InvalidArgumentError("alpha must be in [0,1), got %g" % self.alpha)
        if self.levels != 'auto' and (not isinstance(self.levels, int) or self.levels < 1):
            raise InvalidArgumentError("levels must be 'auto' or a positive int, got %r"
                                       % (self.levels,))
        return self


def d4Filters():
    """Daubechies D4 bank from its closed form."""
    s3 = math.sqrt(3.0)
    g = np.array([1.0 + s3, 3.0 + s3, 3.0 - s3, 1.0 - s3]) / (4.0 * math.sqrt(2.0))
    K = len(g)
    # quadrature mirror
    h = np.array([(-1) ** k * g[K - 1 - k] for k in range(K)])
    return FilterBank(g=g, h=h, gRec=g[::-1].copy(), hRec=h[::-1].copy())


def maxLevel(M, K):
    """floor(log2(M/K)), at least 1."""
    if M < K:
        raise InvalidArgumentError("series length %u shorter than filter length %u" % (M, K))
    return max(1, (M // K).bit_length() - 1)


def dwtStep(signal, bank):
    """One analysis level, returns (approx, detail) of length ceil(n/2)."""
    signal = np.asarray(signal, dtype=np.float64)
    if signal.ndim != 1 or len(signal) < 2:
        raise InvalidArgumentError("dwt step needs a 1-d signal of length >= 2")
    a, d = pywt.dwt(signal, bank.wavelet, mode=MODE)
    return a, d


def idwtStep(approx, detail, bank, length=None):
    """One synthesis level, trimmed to ``length`` when given."""
    if len(approx) != len(detail):
        raise InvalidArgumentError("approx/detail length mismatch %u vs %u"
                                   % (len(approx), len(detail)))
    x = pywt.idwt(approx, detail, bank.wavelet, mode=MODE)
    if length is not None:
        if length not in (len(x), len(x) - 1):
            raise InvalidArgumentError("cannot trim %u samples to %u" % (len(x), length))
        x = x[:length]
    return x


def decompose(x, L, bank):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidArgumentError("decompose works on one channel, got shape %s" % (x.shape,))
    if L < 1:
        raise InvalidArgumentError("level count must be >= 1")
    top = maxLevel(len(x), bank.K)
    if L > top:
        raise InvalidArgumentError("level %u exceeds max level %u for length %u" % (L, top, len(x)))

    lengths = [len(x)]
    details = []
    a = x
    for _ in range(L):
        a, d = dwtStep(a, bank)
        details.append(d)
        lengths.append(len(a))
    return WaveletPyramid(approx=a, details=details, levelLengths=lengths, originalLength=len(x))


def softThreshold(detail, gamma):
    """sign(d) * max(|d| - gamma, 0)."""
    if gamma < 0:
        raise InvalidArgumentError("threshold must be >= 0, got %g" % gamma)
    return pywt.threshold(np.asarray(detail, dtype=np.float64), gamma, mode='soft')


def _checkPyramid(p):
    L = p.levels
    if L < 1 or len(p.levelLengths) != L + 1 or p.levelLengths[0] != p.originalLength:
        raise InvalidArgumentError("inconsistent pyramid: %u levels, lengths %s"
                                   % (L, p.levelLengths))
    for j in range(1, L + 1):
        if p.levelLengths[j] != math.ceil(p.levelLengths[j - 1] / 2) \
                or len(p.details[j - 1]) != p.levelLengths[j]:
            raise InvalidArgumentError("inconsistent pyramid at level %u" % j)
    if len(p.approx) != p.levelLengths[L]:
        raise InvalidArgumentError("approximation length %u, expected %u"
                                   % (len(p.approx), p.levelLengths[L]))


def reconstruct(pyramid, bank):
    _checkPyramid(pyramid)
    a = np.asarray(pyramid.approx, dtype=np.float64)
    for j in range(pyramid.levels, 0, -1):
        a = idwtStep(a, pyramid.details[j - 1], bank, pyramid.levelLengths[j - 1])
    return a


def perturbChannel(x, gamma, levels, bank):
    if gamma == 0.0:
        return np.array(x, dtype=np.float64)
    p = decompose(x, levels, bank)
    p.details = [softThreshold(d, gamma) for d in p.details]
    return reconstruct(p, bank)


def perturb(x, cfg, bank=None):
    """Low-pass view of an M x N series (or a 1-d channel).

    Each channel gets gamma = alpha * max|x|, details of all levels are
    soft-thresholded with it and the channel is rebuilt.
    """
    cfg.validate()
    bank = bank or d4Filters()
    # copy, views from sliding_window_view are read-only
    x = np.array(x, dtype=np.float64)
    flat = x.ndim == 1
    xs = x[:, None] if flat else x
    if xs.ndim != 2:
        raise InvalidArgumentError("perturb expects M x N, got shape %s" % (x.shape,))
    M = xs.shape[0]
    top = maxLevel(M, bank.K)
    levels = top if cfg.levels == 'auto' else int(cfg.levels)
    if levels > top:
        raise InvalidArgumentError("level %u exceeds max level %u for length %u" % (levels, top, M))

    out = np.empty_like(xs)
    for c in range(xs.shape[1]):
        gamma = cfg.alpha * float(np.max(np.abs(xs[:, c])))
        out[:, c] = perturbChannel(xs[:, c], gamma, levels, bank)
    return out[:, 0] if flat else out

# EOF
