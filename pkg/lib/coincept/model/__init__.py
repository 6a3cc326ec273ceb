#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Encoder, contrastive objectives, training and checkpoints."""

from coincept.model.encoder import EncoderConfig, Representation, encode, paramCount, initParams
from coincept.model.loss import LossConfig, hierarchicalContextual, hierarchicalTriplet
from coincept.model.sampler import CropPair, sampleBatchCropPairs, sampleCropPair, makeViews
from coincept.model.checkpoint import Checkpoint, load, save
from coincept.model.trainer import TrainConfig, train

# EOF
