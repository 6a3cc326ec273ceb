#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Wavelet filter bank and noise perturbation."""

from coincept.signal.wavelet import (FilterBank, WaveletPyramid, PerturbConfig, d4Filters,
                                     maxLevel, dwtStep, idwtStep, decompose, softThreshold,
                                     reconstruct, perturb)

# EOF
