#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

import numpy as np
import pytest

from coincept.model import checkpoint as ck
from coincept.model import encoder as enc


def makeCheckpoint(nFeatures=1, seed=0, zeroProjBias=False):
    cfg = enc.EncoderConfig(nFeatures=nFeatures, hiddenDim=4, outputDim=6, nBlocks=2, baseKernels=[2, 3])
    params = enc.initParams(cfg, seed, 'float32')
    if zeroProjBias:
        params['proj.bias'][:] = 0.0
    return ck.Checkpoint(encoder=cfg, params=params)


@pytest.fixture
def tinyCheckpoint():
    return makeCheckpoint()


@pytest.fixture
def zeroBiasCheckpoint():
    return makeCheckpoint(zeroProjBias=True)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

# EOF
