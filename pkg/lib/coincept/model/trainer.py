#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for self-supervised training.

One iteration:
  1. pick ``batchSize`` series and cut a random window of common length
     from each (at most ``windowLen``),
  2. build the low-pass view of every window by wavelet shrinkage,
  3. draw one CropPair per window (crop lengths shared by the batch, start
     shifted per window) and slice the four crops,
  4. encode raw and perturbed crops together, keep the overlap,
  5. hierarchical triplet loss, backward, Adam step.

Ablation switches: ``perturbViews`` off trains on the two raw crops with
the hierarchical contextual loss only, ``cropping`` off uses the whole
window for both crops, ``latentMask`` > 0 hides that fraction of the
projected steps of every crop (drawn per step).

Adam: m = b1 m + (1-b1) g, v = b2 v + (1-b2) g^2,
p -= lr * m_hat / (sqrt(v_hat) + eps) with bias-corrected m_hat, v_hat.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from coincept import seeds
from coincept.errors import InvalidArgumentError, NumericError, TrainingAborted
from coincept.grad import Tape, ops, resolveDtype
from coincept.model import encoder as enc
from coincept.model.checkpoint import Checkpoint
from coincept.model.loss import LossConfig, hierarchicalContextual, hierarchicalTriplet
from coincept.model.sampler import fullCropPairs, makeViews, sampleBatchCropPairs
from coincept.signal.wavelet import PerturbConfig, d4Filters, perturb
from coincept.tasks.preprocess import asSeries, fitZscore, zscore

logger = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    lr: float = 1e-3
    batchSize: int = 8
    iters: int = 600
    seed: int = 0
    windowLen: int = 256
    minOverlap: int = 8
    alphaThresh: float = 0.2
    epsilon: float = 0.7
    zeta: float = 1.0
    precision: str = 'float32'
    symmetric: bool = False
    logEvery: int = 50
    triplet: bool = True
    perturbViews: bool = True
    cropping: bool = True
    latentMask: float = 0.0

    def validate(self):
        if not self.lr > 0:
            raise InvalidArgumentError("learning rate must be > 0, got %g" % self.lr)
        if self.iters < 1:
            raise InvalidArgumentError("iters must be >= 1, got %d" % self.iters)
        if self.batchSize < 1:
            raise InvalidArgumentError("batch size must be >= 1, got %d" % self.batchSize)
        if self.minOverlap < 2 or self.windowLen < max(self.minOverlap, 4):
            raise InvalidArgumentError("need 2 <= minOverlap <= windowLen and windowLen >= 4, "
                                       "got %d and %d" % (self.minOverlap, self.windowLen))
        if self.seed < 0:
            raise InvalidArgumentError("seed must be >= 0")
        if not 0.0 <= self.latentMask < 1.0:
            raise InvalidArgumentError("latent mask rate must be in [0,1), got %g" % self.latentMask)
        resolveDtype(self.precision)
        self.lossConfig().validate()
        self.perturbConfig().validate()
        return self

    def lossConfig(self):
        return LossConfig(epsilon=self.epsilon, zeta=self.zeta, symmetric=self.symmetric,
                          triplet=self.triplet)

    def perturbConfig(self):
        return PerturbConfig(alpha=self.alphaThresh)

    def toDict(self):
        return dataclasses.asdict(self)

    @classmethod
    def fromDict(cls, d):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise InvalidArgumentError("unknown train field(s): %s" % ", ".join(unknown))
        return cls(**d)


class Adam:
    """Adaptive moment estimation over a dict of arrays."""

    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {n: np.zeros_like(p) for n, p in params.items()}
        self.v = {n: np.zeros_like(p) for n, p in params.items()}

    def step(self, params, grads):
        """Update ``params`` in place."""
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for n, p in params.items():
            g = grads[n]
            m, v = self.m[n], self.v[n]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            step = self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
            np.subtract(p, step.astype(p.dtype), out=p, where=step != 0)


def _usable(dataset, minLen):
    out = []
    for i, s in enumerate(dataset):
        x = asSeries(s)
        if len(x) < minLen:
            logger.warning("skipping series %u: length %u < %u", i, len(x), minLen)
            continue
        out.append(x)
    if not out:
        raise InvalidArgumentError("no series of length >= %u to train on" % minLen)
    return out


def _batch(series, cfg, pcfg, bank, rng):
    idx = rng.integers(0, len(series), size=cfg.batchSize)
    W = min(cfg.windowLen, min(len(series[i]) for i in idx))
    x = np.empty((cfg.batchSize, W, series[0].shape[1]))
    for b, i in enumerate(idx):
        start = int(rng.integers(0, len(series[i]) - W + 1))
        x[b] = series[i][start:start + W]
    if not cfg.perturbViews:
        return x, None
    xt = np.stack([perturb(w, pcfg, bank) for w in x])
    return x, xt


def _cropPairs(cfg, B, W, rng):
    if not cfg.cropping:
        return fullCropPairs(W, B)
    return sampleBatchCropPairs(W, cfg.minOverlap, B, rng)


def _latentMasks(pairs, nRows, rate, rng):
    if rate <= 0.0:
        return None, None
    cp = pairs[0]
    return (rng.random((nRows, cp.b1 - cp.a1)) < rate,
            rng.random((nRows, cp.b2 - cp.a2)) < rate)


def trainStep(tape, params, encCfg, x, xt, pairs, lossCfg, masks=(None, None)):
    """Loss of one batch on ``tape``; ``params`` maps names to leaves.

    ``pairs`` holds one CropPair per window. Without perturbed windows
    (``xt`` None) only the raw crops are encoded. ``masks`` are the
    latent masks of crop1 and crop2, one row per encoded crop.
    """
    B = x.shape[0]
    v = makeViews(x, x if xt is None else xt, pairs)
    if xt is None:
        zP = enc.forward(tape, params, encCfg, v.xp, masks[0])
        zQ = enc.forward(tape, params, encCfg, v.xq, masks[1])
    else:
        zP = enc.forward(tape, params, encCfg, np.concatenate([v.xp, v.xpTilde]), masks[0])
        zQ = enc.forward(tape, params, encCfg, np.concatenate([v.xq, v.xqTilde]), masks[1])

    def overlap(z, lo, offset):
        return ops.crop(ops.crop(z, 0, lo, lo + B), 1, offset, offset + v.length)

    zp, zq = overlap(zP, 0, v.offsetP), overlap(zQ, 0, v.offsetQ)
    if xt is None:
        return hierarchicalContextual(zp, zq, lossCfg)
    zpt, zqt = overlap(zP, B, v.offsetP), overlap(zQ, B, v.offsetQ)
    return hierarchicalTriplet(zp, zq, zpt, zqt, lossCfg)


def train(dataset, encCfg, cfg, params=None):
    """Train an encoder, return (Checkpoint, loss trace)."""
    cfg.validate()
    encCfg.validate()
    bank = d4Filters()
    series = _usable(dataset, max(cfg.minOverlap, bank.K))
    if series[0].shape[1] != encCfg.nFeatures or any(s.shape[1] != encCfg.nFeatures for s in series):
        raise InvalidArgumentError("encoder expects %u feature(s)" % encCfg.nFeatures)

    stats = fitZscore(series)
    series = [zscore(s, stats) for s in series]
    dtype = resolveDtype(cfg.precision)
    if params is None:
        params = enc.initParams(encCfg, cfg.seed, cfg.precision)
    params = {n: np.array(p, dtype=dtype) for n, p in params.items()}
    opt = Adam(params, cfg.lr)
    lossCfg = cfg.lossConfig()
    pcfg = cfg.perturbConfig()
    rngBatch = seeds.generator(cfg.seed, seeds.BATCH)
    rngCrop = seeds.generator(cfg.seed, seeds.SAMPLER)

    logger.info("training %u parameters on %u series for %u iterations",
                enc.paramCount(encCfg), len(series), cfg.iters)
    trace = []
    for it in range(cfg.iters):
        x, xt = _batch(series, cfg, pcfg, bank, rngBatch)
        pairs = _cropPairs(cfg, x.shape[0], x.shape[1], rngCrop)
        nRows = x.shape[0] * (1 if xt is None else 2)
        masks = _latentMasks(pairs, nRows, cfg.latentMask, rngCrop)
        tape = Tape(cfg.precision)
        leaves = {n: tape.leaf(p, name=n) for n, p in params.items()}
        res = None
        try:
            res = trainStep(tape, leaves, encCfg, x, xt, pairs, lossCfg, masks)
            value = res.loss.item()
            if not math.isfinite(value):
                raise NumericError("loss is %r" % value)
            tape.backward(res.loss)
        except NumericError as e:
            terms = res.terms[-1] if res is not None and res.terms else {}
            raise TrainingAborted(str(e), it, terms) from e
        opt.step(params, tape.gradients())
        trace.append(value)
        if cfg.logEvery and (it + 1) % cfg.logEvery == 0:
            recent = trace[-cfg.logEvery:]
            logger.info("iter %5u  loss %.5f  (mean of last %u: %.5f, depth %u)",
                        it + 1, value, len(recent), float(np.mean(recent)), res.depth)

    ckpt = Checkpoint(encoder=encCfg, params=params, train=cfg.toDict(), iterations=cfg.iters,
                      finalLoss=trace[-1], normMean=stats.mean, normStd=stats.std)
    return ckpt, trace


def writeTrace(trace, path):
    df = pd.DataFrame({'iteration': np.arange(1, len(trace) + 1), 'loss': trace})
    df.to_csv(path, index=False)

# EOF
