#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Dataset readers, writers and synthetic generators."""

from coincept.data.ucr import LabeledDataset, readUcrTsv, writeUcrTsv
from coincept.data.csvwide import StreamDataset, readCsvWide, writeCsvWide
from coincept.data.synth import (ToyConfig, ClassesConfig, StreamConfig, synthToy,
                                 synthClasses, synthStream)

# EOF
