#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Downstream heads: forecasting, classification, anomaly detection, analysis."""

from coincept.tasks.preprocess import ZscoreStats, asSeries, fitZscore, zscore, difference
from coincept.tasks.features import poolSegment
from coincept.tasks.forecast import ForecastSpec, ridgeFit, forecastFromFeatures, forecastEval
from coincept.tasks.classify import ClassifySpec, RbfClassifier, rbfClassifierFit, classifyEval
from coincept.tasks.anomaly import AnomalySpec, anomalyScore, anomalyStreamEval, delayAdjust
from coincept.tasks.analysis import alignment, uniformity, pairwiseDistanceHistogram, analyze

# EOF
