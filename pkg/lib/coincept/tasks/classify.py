#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for the classification head.

One-vs-rest kernel ridge on max-pooled representations: with the RBF
kernel K and +-1 targets Y, the dual coefficients are (K + C I)^-1 Y and
the decision values of new points are K(x, X) A. The penalty C is chosen
by stratified cross-validated accuracy.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Union

import numpy as np
from scipy import linalg
from scipy.spatial import distance
from sklearn.model_selection import StratifiedKFold

from coincept import seeds
from coincept.errors import InvalidArgumentError
from coincept.tasks.features import poolSegment

logger = logging.getLogger(__name__)

FALLBACK_PENALTY = 1.0


@dataclass
class ClassifySpec:
    gamma: Union[str, float] = 'median'
    penaltyGrid: List[float] = field(default_factory=lambda: [10.0 ** i for i in range(-4, 5)])
    folds: int = 5

    def validate(self):
        if not self.penaltyGrid or any(not c > 0 for c in self.penaltyGrid):
            raise InvalidArgumentError("penalty grid must be non-empty and positive")
        if self.gamma != 'median' and not float(self.gamma) > 0:
            raise InvalidArgumentError("gamma must be 'median' or > 0, got %s" % self.gamma)
        if self.folds < 2:
            raise InvalidArgumentError("need at least 2 folds")
        return self


def rbfKernel(A, B, gamma):
    return np.exp(-gamma * distance.cdist(A, B, 'sqeuclidean'))


def medianGamma(X):
    """1 / median squared pairwise distance."""
    d = distance.pdist(X, 'sqeuclidean')
    med = float(np.median(d)) if len(d) else 0.0
    if not med > 0:
        logger.warning("all points coincide, using gamma 1")
        return 1.0
    return 1.0 / med


class RbfClassifier:
    """Kernel ridge classifier over fixed training points."""

    def __init__(self, X, y, gamma, penalty, nClasses=None):
        self.X = np.asarray(X, dtype=np.float64)
        self.y = np.asarray(y, dtype=int)
        self.gamma = gamma
        self.penalty = penalty
        self.nClasses = nClasses or int(self.y.max()) + 1
        Y = -np.ones((len(self.y), self.nClasses))
        Y[np.arange(len(self.y)), self.y] = 1.0
        K = rbfKernel(self.X, self.X, gamma)
        K[np.diag_indices_from(K)] += penalty
        self.dual = linalg.cho_solve(linalg.cho_factor(K), Y)

    def decision(self, X):
        return rbfKernel(np.asarray(X, dtype=np.float64), self.X, self.gamma) @ self.dual

    def predict(self, X):
        return np.argmax(self.decision(X), axis=1)

    def accuracy(self, X, y):
        return float(np.mean(self.predict(X) == np.asarray(y)))


def _checkLabels(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2 or len(X) != len(y):
        raise InvalidArgumentError("need n x H features and n labels, got %s and %s" % (X.shape, y.shape))
    if not np.all(np.isfinite(X)):
        raise InvalidArgumentError("non-finite features")
    if len(np.unique(y)) < 2:
        raise InvalidArgumentError("classifier needs at least 2 classes")
    return X, y


def selectPenalty(X, y, gamma, spec, seed=0):
    """Penalty of best mean fold accuracy (smallest on ties)."""
    counts = np.bincount(y)
    smallest = counts[counts > 0].min()
    if smallest < 2:
        logger.warning("a class has a single sample, using penalty %g", FALLBACK_PENALTY)
        return FALLBACK_PENALTY
    rng = seeds.generator(seed, seeds.CLASSIFY)
    folds = StratifiedKFold(n_splits=min(spec.folds, int(smallest)), shuffle=True,
                            random_state=int(rng.integers(2 ** 31)))
    splits = list(folds.split(X, y))
    nClasses = int(y.max()) + 1
    best = None
    for c in sorted(spec.penaltyGrid):
        acc = np.mean([RbfClassifier(X[tr], y[tr], gamma, c, nClasses).accuracy(X[va], y[va])
                       for tr, va in splits])
        logger.debug("penalty %g: fold accuracy %.4f", c, acc)
        if best is None or acc > best[0]:
            best = (acc, c)
    return best[1]


def rbfClassifierFit(X, y, spec, seed=0):
    spec.validate()
    X, y = _checkLabels(X, y)
    gamma = medianGamma(X) if spec.gamma == 'median' else float(spec.gamma)
    penalty = selectPenalty(X, y, gamma, spec, seed)
    logger.info("rbf classifier: %u samples, gamma %.4g, penalty %g", len(X), gamma, penalty)
    return RbfClassifier(X, y, gamma, penalty)


def classifyEval(ckpt, dataset, spec, seed=0):
    """Encode, pool, fit on train and score on test; returns (accuracy, classifier)."""
    Xtr, ytr = dataset.arrays('train')
    Xte, yte = dataset.arrays('test')
    if len(Xte) == 0:
        raise InvalidArgumentError("dataset has no test split")
    ztr = poolSegment(ckpt.encode(Xtr))
    zte = poolSegment(ckpt.encode(Xte))
    clf = rbfClassifierFit(ztr, ytr, spec, seed)
    acc = clf.accuracy(zte, yte)
    logger.info("test accuracy %.4f over %u series", acc, len(yte))
    return acc, clf

# EOF
