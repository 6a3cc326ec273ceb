#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#
