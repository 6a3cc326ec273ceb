#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Self-supervised representation learning for time series.

Subpackages:
  grad      reverse-mode differentiation on numpy arrays
  signal    wavelet decomposition and low-pass perturbation
  model     encoder, losses, trainer, checkpoints
  tasks     forecasting, classification, anomaly detection, analysis
  data      dataset readers, writers and generators
  handlers  streaming score handlers
"""

__version__ = '2024.1'

# EOF
