#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Named random streams.

Every component draws from its own stream so that changing, e.g., the batch
sampler does not shift the parameter initialization. A stream is a numpy
``Generator`` over the counter-based Philox-4x64 bit generator (10 rounds),
keyed by ``SeedSequence([seed, crc32(name)])``. Both pieces are part of numpy,
so seeds are portable across platforms and numpy versions that keep Philox.
"""

import zlib

import numpy as np

# stream names in use
INIT = 'init'
BATCH = 'batch'
SAMPLER = 'sampler'
SYNTH = 'synth'
CLASSIFY = 'classify'


def generator(seed, stream):
    """Return the generator for ``stream`` under run seed ``seed``."""
    key = zlib.crc32(stream.encode('utf-8'))
    seq = np.random.SeedSequence([int(seed), key])
    return np.random.Generator(np.random.Philox(seq))

# EOF
