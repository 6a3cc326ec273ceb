#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for the contrastive objectives.

All losses take B x T x H tensors of aligned representations, i.e. z_p[b, t]
and z_q[b, t] belong to the same time step seen through two crops. The
anchor is always the first argument.
"""

import collections
import logging
from dataclasses import dataclass

import numpy as np

from coincept.errors import InvalidArgumentError
from coincept.grad import Tape, Tensor, ops

logger = logging.getLogger(__name__)


@dataclass
class LossConfig:
    epsilon: float = 0.7
    zeta: float = 1.0
    symmetric: bool = False
    triplet: bool = True

    def validate(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise InvalidArgumentError("epsilon must be in [0,1], got %g" % self.epsilon)
        if self.zeta < 0:
            raise InvalidArgumentError("margin must be >= 0, got %g" % self.zeta)
        return self


LossTerms = collections.namedtuple('LossTerms', ['pq', 'ppt', 'qqt', 'pqt', 'ptq'])
HierarchicalLoss = collections.namedtuple('HierarchicalLoss', ['loss', 'depth', 'terms'])


def _tensors(*zs):
    """Put plain arrays on a fresh 64-bit tape, pass tensors through."""
    nTensors = sum(isinstance(z, Tensor) for z in zs)
    if nTensors == len(zs):
        if any(z.tape is not zs[0].tape for z in zs):
            raise InvalidArgumentError("representations live on different tapes")
        return zs
    if nTensors:
        raise InvalidArgumentError("cannot mix tensors and plain arrays")
    tape = Tape('float64')
    return tuple(tape.constant(z) for z in zs)


def _checkPair(zp, zq):
    if zp.shape != zq.shape:
        raise InvalidArgumentError("representation shapes differ: %s vs %s" % (zp.shape, zq.shape))
    if zp.ndim != 3:
        raise InvalidArgumentError("representations must be B x T x H, got %s" % (zp.shape,))


def _dualContrast(a, b):
    """Mean over (g, s) of -log softmax of a[g,s].b[g,s] against the group.

    The group of a[g,s] is {a[g,s].b[g,j]} plus {a[g,s].a[g,j], j != s}.
    """
    G, S, _ = a.shape
    if S == 1:
        return a.tape.constant(0.0)
    ab = ops.matmul(a, ops.transpose(b, (0, 2, 1)))
    aa = ops.matmul(a, ops.transpose(a, (0, 2, 1)))
    logits = ops.concat([ab, aa], axis=2)
    mask = np.ones((G, S, 2 * S), dtype=bool)
    idx = np.arange(S)
    mask[:, idx, S + idx] = False
    lse = ops.maskedLogSumExp(logits, mask, axis=2)
    pos = ops.sumAll(ops.mul(a, b), axis=2)
    return ops.mean(ops.sub(lse, pos))


def temporalLoss(zp, zq):
    zp, zq = _tensors(zp, zq)
    _checkPair(zp, zq)
    return _dualContrast(zp, zq)


def instanceLoss(zp, zq):
    zp, zq = _tensors(zp, zq)
    _checkPair(zp, zq)
    return _dualContrast(ops.transpose(zp, (1, 0, 2)), ops.transpose(zq, (1, 0, 2)))


def contextualLoss(zp, zq):
    zp, zq = _tensors(zp, zq)
    return ops.add(temporalLoss(zp, zq), instanceLoss(zp, zq))


def tripletCombine(terms, cfg):
    """eps * mean of the clean couplets + (1 - eps) * hinge margin term.

    Without the triplet term (``cfg.triplet`` off) only the plain mean of
    the clean couplets is left. Works on floats as well as on scalar
    tensors.
    """
    if not cfg.triplet:
        return (terms.pq + terms.ppt + terms.qqt) * (1.0 / 3.0)
    eps = cfg.epsilon
    clean = (terms.pq + terms.ppt + terms.qqt) * (eps / 3.0)
    margin = ops.hinge(terms.pq * 2.0 - terms.pqt - terms.ptq + 2.0 * cfg.zeta)
    return clean + margin * (1.0 - eps)


def _levelTerms(zp, zq, zpt, zqt):
    return LossTerms(pq=contextualLoss(zp, zq), ppt=contextualLoss(zp, zpt),
                     qqt=contextualLoss(zq, zqt), pqt=contextualLoss(zp, zqt),
                     ptq=contextualLoss(zpt, zq))


def _halve(z):
    return ops.transpose(ops.maxpool1d(ops.transpose(z, (0, 2, 1)), 2, 2, 'halving'), (0, 2, 1))


def _hierarchy(zs, levelLoss):
    total = None
    depth = 0
    levels = []
    while zs[0].shape[1] > 1:
        level, terms = levelLoss(*zs)
        levels.append({k: v.item() for k, v in terms.items()})
        total = level if total is None else total + level
        zs = [_halve(z) for z in zs]
        depth += 1

    if depth == 0:
        logger.warning("hierarchical loss on a single time step, returning 0")
        return HierarchicalLoss(zs[0].tape.constant(0.0), 0, [])
    return HierarchicalLoss(total * (1.0 / depth), depth, levels)


def hierarchicalTriplet(zp, zq, zpt, zqt, cfg):
    """Triplet objective averaged over repeated time halving.

    Runs while T > 1, so a length-T input gives ceil(log2 T) levels.
    Returns (loss tensor, depth, per-level term values).
    """
    cfg.validate()
    zp, zq, zpt, zqt = _tensors(zp, zq, zpt, zqt)
    for z in (zq, zpt, zqt):
        _checkPair(zp, z)

    def level(zp, zq, zpt, zqt):
        terms = _levelTerms(zp, zq, zpt, zqt)
        loss = tripletCombine(terms, cfg)
        if cfg.symmetric:
            swapped = _levelTerms(zq, zp, zqt, zpt)
            loss = (loss + tripletCombine(swapped, cfg)) * 0.5
        return loss, terms._asdict()

    return _hierarchy([zp, zq, zpt, zqt], level)


def hierarchicalContextual(zp, zq, cfg=None):
    """Contextual loss of the two raw crops over repeated time halving.

    The objective of training without the perturbed views; per-level
    terms only hold ``pq``.
    """
    zp, zq = _tensors(zp, zq)
    _checkPair(zp, zq)

    def level(zp, zq):
        loss = contextualLoss(zp, zq)
        if cfg is not None and cfg.symmetric:
            loss = (loss + contextualLoss(zq, zp)) * 0.5
        return loss, {'pq': loss}

    return _hierarchy([zp, zq], level)

# EOF
