#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for the Inception-style dilated convolution encoder.

Layout of one inception block i (1-indexed) with base kernels k_1..k_U:

    unit u:  b_u = conv(leaky(conv(h))) [+ leaky(skip(b_u of block i-1))]
    pool:    m   = leaky(pointwise(maxpool_3(h)))
    out:     h   = agg(concat(b_1, .., b_U, m))

Both convolutions of unit u use dilation (2 k_u - 1)^(i-1), so after block i
the unit path sees (2 k_u - 1)^i input steps. All widths are ``hiddenDim``
except the last aggregator, which emits ``outputDim`` channels.

Block type ``dilated`` swaps the inception blocks for a plain stack of
residual blocks, two kernel-3 convolutions with dilation 2^(i-1) each:

    h = conv(leaky(conv(leaky(h)))) + res(h)

``res`` is a pointwise convolution where the width changes (last block,
``outputDim`` != ``hiddenDim``) and the identity elsewhere.
"""

import collections
import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from coincept import seeds
from coincept.errors import InvalidArgumentError, NumericError
from coincept.grad import Tape, ops

logger = logging.getLogger(__name__)

BLOCK_TYPES = ('inception', 'dilated')
DILATED_KERNEL = 3


@dataclass
class EncoderConfig:
    nFeatures: int = 1
    hiddenDim: int = 64
    outputDim: int = 320
    nBlocks: int = 3
    baseKernels: List[int] = field(default_factory=lambda: [2, 5, 8])
    leakySlope: float = 0.01
    blockType: str = 'inception'

    def validate(self):
        if self.nFeatures < 1 or self.hiddenDim < 1 or self.outputDim < 1:
            raise InvalidArgumentError("feature, hidden and output widths must be >= 1")
        if self.nBlocks < 1:
            raise InvalidArgumentError("need at least one block, got %d" % self.nBlocks)
        if not self.baseKernels or any(k < 2 for k in self.baseKernels):
            raise InvalidArgumentError("base kernels must be >= 2, got %s" % (self.baseKernels,))
        if not 0.0 < self.leakySlope < 1.0:
            raise InvalidArgumentError("leaky slope must be in (0,1), got %g" % self.leakySlope)
        if self.blockType not in BLOCK_TYPES:
            raise InvalidArgumentError("block type must be one of %s, got '%s'"
                                       % (", ".join(BLOCK_TYPES), self.blockType))
        return self

    def toDict(self):
        return dataclasses.asdict(self)

    @classmethod
    def fromDict(cls, d):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise InvalidArgumentError("unknown encoder field(s): %s" % ", ".join(unknown))
        d = dict(d)
        if 'baseKernels' in d:
            d['baseKernels'] = [int(k) for k in d['baseKernels']]
        return cls(**d).validate()


Representation = collections.namedtuple('Representation', ['values', 'mask'])


def dilationOf(k, i):
    return (2 * k - 1) ** (i - 1)


def receptiveFieldOf(k, i):
    return (2 * k - 1) ** i


def dilatedReceptiveField(i):
    """Receptive field after i residual blocks of the dilated stack."""
    return 2 ** (i + 2) - 3


def maxReceptiveField(cfg):
    if cfg.blockType == 'dilated':
        return dilatedReceptiveField(cfg.nBlocks)
    return receptiveFieldOf(max(cfg.baseKernels), cfg.nBlocks)


def receptiveFieldTable(cfg):
    """Per (block, unit) dilation and receptive field, plus per-block max."""
    rows = []
    perBlock = []
    if cfg.blockType == 'dilated':
        for i in range(1, cfg.nBlocks + 1):
            rf = dilatedReceptiveField(i)
            rows.append({'block': i, 'unit': 1, 'kernel': DILATED_KERNEL,
                         'dilation': 2 ** (i - 1), 'receptiveField': rf})
            perBlock.append({'block': i, 'maxReceptiveField': rf})
        return rows, perBlock
    for i in range(1, cfg.nBlocks + 1):
        for u, k in enumerate(cfg.baseKernels, start=1):
            rows.append({'block': i, 'unit': u, 'kernel': k,
                         'dilation': dilationOf(k, i), 'receptiveField': receptiveFieldOf(k, i)})
        perBlock.append({'block': i, 'maxReceptiveField': receptiveFieldOf(max(cfg.baseKernels), i)})
    return rows, perBlock


def paramShapes(cfg):
    """Ordered (name, shape) of every parameter array."""
    Kh = cfg.hiddenDim
    U = len(cfg.baseKernels)
    shapes = [('proj.weight', (cfg.nFeatures, Kh)), ('proj.bias', (Kh,))]
    if cfg.blockType == 'dilated':
        return shapes + _dilatedShapes(cfg)
    for i in range(1, cfg.nBlocks + 1):
        for u, k in enumerate(cfg.baseKernels, start=1):
            pre = 'block%u.unit%u' % (i, u)
            for conv in ('conv1', 'conv2'):
                shapes.append(('%s.%s.weight' % (pre, conv), (Kh, Kh, k)))
                shapes.append(('%s.%s.bias' % (pre, conv), (Kh,)))
            if i > 1:
                shapes.append(('%s.skip.weight' % pre, (Kh, Kh, 1)))
                shapes.append(('%s.skip.bias' % pre, (Kh,)))
        shapes.append(('block%u.pool.weight' % i, (Kh, Kh, 1)))
        shapes.append(('block%u.pool.bias' % i, (Kh,)))
        out = cfg.outputDim if i == cfg.nBlocks else Kh
        shapes.append(('block%u.agg.weight' % i, (out, (U + 1) * Kh, 1)))
        shapes.append(('block%u.agg.bias' % i, (out,)))
    return shapes


def _dilatedShapes(cfg):
    Kh = cfg.hiddenDim
    shapes = []
    for i in range(1, cfg.nBlocks + 1):
        out = cfg.outputDim if i == cfg.nBlocks else Kh
        shapes.append(('block%u.conv1.weight' % i, (out, Kh, DILATED_KERNEL)))
        shapes.append(('block%u.conv1.bias' % i, (out,)))
        shapes.append(('block%u.conv2.weight' % i, (out, out, DILATED_KERNEL)))
        shapes.append(('block%u.conv2.bias' % i, (out,)))
        if out != Kh:
            shapes.append(('block%u.res.weight' % i, (out, Kh, 1)))
            shapes.append(('block%u.res.bias' % i, (out,)))
    return shapes


def paramCount(cfg):
    return sum(math.prod(s) for _, s in paramShapes(cfg))


def initParams(cfg, seed, precision='float64'):
    """Uniform in +-sqrt(1/fan_in), drawn in ``paramShapes`` order.

    Values come from the ``init`` stream at 64-bit and are then cast, so
    both precisions start from the same numbers.
    """
    cfg.validate()
    rng = seeds.generator(seed, seeds.INIT)
    params = collections.OrderedDict()
    fanIn = None
    for name, shape in paramShapes(cfg):
        if name.endswith('.weight'):
            # linear weight is F x G, conv weight is O x C x k
            fanIn = shape[0] if len(shape) == 2 else shape[1] * shape[2]
        bound = math.sqrt(1.0 / fanIn)
        params[name] = rng.uniform(-bound, bound, size=shape).astype(precision)
    return params


def forward(tape, p, cfg, x, mask=None):
    """Encode ``x`` (B x T x N) on ``tape``, return a B x T x H tensor.

    ``p`` maps parameter names to tensors on the same tape; ``mask`` is an
    optional B x T boolean array, true steps have their projected
    embedding set to zero.
    """
    if not hasattr(x, 'tape'):
        x = tape.constant(x)
    if x.ndim != 3 or x.shape[2] != cfg.nFeatures:
        raise InvalidArgumentError("encoder input must be B x T x %u, got %s"
                                   % (cfg.nFeatures, x.shape))
    try:
        h = ops.linear(x, p['proj.weight'], p['proj.bias'])
    except NumericError as e:
        raise NumericError("input projection: %s" % e, block=0) from e
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != x.shape[:2]:
            raise InvalidArgumentError("mask shape %s, expected %s" % (mask.shape, x.shape[:2]))
        keep = np.broadcast_to((~mask)[:, :, None], h.shape)
        h = ops.mul(h, keep)
    h = ops.transpose(h, (0, 2, 1))

    block = _dilatedBlock if cfg.blockType == 'dilated' else _inceptionBlock
    prev = None
    for i in range(1, cfg.nBlocks + 1):
        try:
            h, prev = block(p, cfg, i, h, prev)
        except NumericError as e:
            raise NumericError(str(e), block=i) from e

    return ops.transpose(h, (0, 2, 1))


def _inceptionBlock(p, cfg, i, h, prev):
    """One inception block, returns (output, unit outputs for the next skips)."""
    slope = cfg.leakySlope
    units = []
    for u, k in enumerate(cfg.baseKernels, start=1):
        pre = 'block%u.unit%u.' % (i, u)
        d = dilationOf(k, i)
        b = ops.conv1d(h, p[pre + 'conv1.weight'], p[pre + 'conv1.bias'], d)
        b = ops.conv1d(ops.leakyRelu(b, slope), p[pre + 'conv2.weight'], p[pre + 'conv2.bias'], d)
        if prev is not None:
            s = ops.conv1d(prev[u - 1], p[pre + 'skip.weight'], p[pre + 'skip.bias'])
            b = ops.add(b, ops.leakyRelu(s, slope))
        units.append(b)
    m = ops.maxpool1d(h, 3, 1, padding='same')
    m = ops.leakyRelu(ops.conv1d(m, p['block%u.pool.weight' % i], p['block%u.pool.bias' % i]), slope)
    out = ops.conv1d(ops.concat(units + [m], axis=1),
                     p['block%u.agg.weight' % i], p['block%u.agg.bias' % i])
    return out, units


def _dilatedBlock(p, cfg, i, h, prev):
    slope = cfg.leakySlope
    pre = 'block%u.' % i
    d = 2 ** (i - 1)
    res = h
    if pre + 'res.weight' in p:
        res = ops.conv1d(h, p[pre + 'res.weight'], p[pre + 'res.bias'])
    b = ops.conv1d(ops.leakyRelu(h, slope), p[pre + 'conv1.weight'], p[pre + 'conv1.bias'], d)
    b = ops.conv1d(ops.leakyRelu(b, slope), p[pre + 'conv2.weight'], p[pre + 'conv2.bias'], d)
    return ops.add(b, res), None


def checkParams(params, cfg):
    for name, shape in paramShapes(cfg):
        if name not in params:
            raise InvalidArgumentError("missing parameter %s" % name)
        if tuple(params[name].shape) != shape:
            raise InvalidArgumentError("parameter %s has shape %s, expected %s"
                                       % (name, tuple(params[name].shape), shape))


def encode(params, cfg, x, mask=None, precision='float32'):
    """Representation of ``x`` (B x T x N or T x N) without gradients."""
    x = np.asarray(x)
    if x.ndim == 2:
        x = x[None]
    checkParams(params, cfg)
    tape = Tape(precision)
    p = {name: tape.constant(v, name=name) for name, v in params.items()}
    z = forward(tape, p, cfg, x, mask)
    return Representation(values=np.array(z.data), mask=None if mask is None else np.asarray(mask, dtype=bool))

# EOF
