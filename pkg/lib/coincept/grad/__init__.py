#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Dense-array reverse-mode differentiation."""

from coincept.grad.tape import Tape, Tensor, resolveDtype
from coincept.grad import ops
from coincept.grad.check import gradCheck, numericGrad

# EOF
