#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

from coincept.handlers.Handler import Handler
from coincept.handlers.ThresholdHandler import ThresholdHandler
from coincept.handlers.ScorePlotHandler import ScorePlotHandler

# EOF
