#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for the forecasting head.

The representation of the last step of a context window is regressed onto
the next ``horizon`` values with an L2-penalized linear model. The penalty
is picked on the validation split, metrics are taken on the test split of
the normalized series.
"""

import collections
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy import linalg

from coincept.errors import InvalidArgumentError
from coincept.tasks.features import lastStepFeatures, windowFeatures
from coincept.tasks.preprocess import asSeries, fitZscore, zscore

logger = logging.getLogger(__name__)

RIDGE_GRID = [0.1, 0.2, 0.5, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000]

RidgeModel = collections.namedtuple('RidgeModel', ['weights', 'intercept', 'penalty'])
ForecastResult = collections.namedtuple('ForecastResult', ['horizon', 'penalty', 'validMse', 'mse', 'mae'])


@dataclass
class ForecastSpec:
    horizons: List[int] = field(default_factory=lambda: [24])
    ridgeGrid: List[float] = field(default_factory=lambda: list(RIDGE_GRID))
    window: int = 64
    fractions: tuple = (0.6, 0.2, 0.2)
    targets: Optional[List[int]] = None     # default: every feature

    def validate(self):
        if not self.horizons or any(h < 1 for h in self.horizons):
            raise InvalidArgumentError("horizons must be >= 1, got %s" % self.horizons)
        if not self.ridgeGrid or any(not lam > 0 for lam in self.ridgeGrid):
            raise InvalidArgumentError("ridge grid must be non-empty and positive")
        if self.window < 1:
            raise InvalidArgumentError("window must be >= 1")
        return self


def ridgeFit(Z, Y, penalty):
    """Centered ridge regression, solved by Cholesky."""
    Z = np.asarray(Z, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Z.ndim != 2 or len(Z) != len(Y) or len(Z) < 1:
        raise InvalidArgumentError("need n x H features and n x D targets, got %s and %s"
                                   % (Z.shape, Y.shape))
    if not penalty > 0:
        raise InvalidArgumentError("ridge penalty must be > 0, got %g" % penalty)
    if not (np.all(np.isfinite(Z)) and np.all(np.isfinite(Y))):
        raise InvalidArgumentError("non-finite ridge input")
    zMean = Z.mean(axis=0)
    yMean = Y.mean(axis=0)
    Zc = Z - zMean
    A = Zc.T @ Zc
    A[np.diag_indices_from(A)] += penalty
    W = linalg.cho_solve(linalg.cho_factor(A), Zc.T @ (Y - yMean))
    return RidgeModel(weights=W, intercept=yMean - zMean @ W, penalty=penalty)


def ridgePredict(model, Z):
    return np.asarray(Z, dtype=np.float64) @ model.weights + model.intercept


def _pairs(features, targets, lo, hi, horizon, start):
    """(feature at t, next ``horizon`` target rows flattened) for t+horizon < hi."""
    ts = np.arange(max(lo, start), hi - horizon)
    if len(ts) == 0:
        return None, None
    Y = np.stack([targets[t + 1:t + 1 + horizon].reshape(-1) for t in ts])
    return features[ts], Y


def forecastFromFeatures(features, values, spec, start=0):
    """Ridge protocol on any M x F per-step feature matrix.

    ``values`` is the normalized M x N series, rows of ``features`` before
    ``start`` are ignored. Returns one ForecastResult per horizon.
    """
    spec.validate()
    values = asSeries(values)
    targets = values if spec.targets is None else values[:, spec.targets]
    M = len(values)
    trainEnd = int(np.floor(M * spec.fractions[0] + 1e-9))
    validEnd = int(np.floor(M * (spec.fractions[0] + spec.fractions[1]) + 1e-9))
    results = []
    for h in spec.horizons:
        Ztr, Ytr = _pairs(features, targets, 0, trainEnd, h, start)
        Zva, Yva = _pairs(features, targets, trainEnd, validEnd, h, start)
        Zte, Yte = _pairs(features, targets, validEnd, M, h, start)
        if Ztr is None or Zva is None or Zte is None:
            raise InvalidArgumentError("series of %u steps too short for window %u and horizon %u"
                                       % (M, spec.window, h))
        best = None
        for lam in spec.ridgeGrid:
            model = ridgeFit(Ztr, Ytr, lam)
            mse = float(np.mean((ridgePredict(model, Zva) - Yva) ** 2))
            logger.debug("horizon %u, penalty %g: valid mse %.6f", h, lam, mse)
            if best is None or mse < best[0]:
                best = (mse, model)
        validMse, model = best
        err = ridgePredict(model, Zte) - Yte
        res = ForecastResult(horizon=h, penalty=model.penalty, validMse=validMse,
                             mse=float(np.mean(err ** 2)), mae=float(np.mean(np.abs(err))))
        logger.info("horizon %u: penalty %g, test mse %.5f, mae %.5f", h, res.penalty, res.mse, res.mae)
        results.append(res)
    return results


def normalizeForForecast(series, spec):
    """z-score with statistics of the training split."""
    x = asSeries(series)
    trainEnd = int(np.floor(len(x) * spec.fractions[0] + 1e-9))
    if trainEnd < 1:
        raise InvalidArgumentError("empty training split")
    return zscore(x, fitZscore(x[:trainEnd]))


def forecastEval(ckpt, series, spec):
    spec.validate()
    x = normalizeForForecast(series, spec)
    need = spec.window + max(spec.horizons)
    if len(x) < need:
        raise InvalidArgumentError("series of %u steps shorter than window + horizon = %u"
                                   % (len(x), need))
    ckpt.checkInput(x)
    features = lastStepFeatures(ckpt, x, spec.window)
    return forecastFromFeatures(features, x, spec, start=spec.window - 1)


def baselineEval(series, spec):
    """Same protocol on the raw context window."""
    spec.validate()
    x = normalizeForForecast(series, spec)
    return forecastFromFeatures(windowFeatures(x, spec.window), x, spec, start=spec.window - 1)

# EOF
