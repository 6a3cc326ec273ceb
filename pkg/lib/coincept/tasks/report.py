#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for metric output.

Metrics go to a two-column CSV (metric, value) and to one JSON summary

    {"task": ..., "config_hash": ..., "metrics": [{"name": ..., "value": ...}]}
"""

import hashlib
import json
import logging

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)


def configHash(text):
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def summary(task, cfgHash, metrics):
    """``metrics`` is a list of (name, value)."""
    return {
        'task': task,
        'config_hash': cfgHash,
        'metrics': [{'name': n, 'value': float(v)} for n, v in metrics],
    }


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=False)


def writeMetricsCsv(path, metrics):
    df = pd.DataFrame([(n, float(v)) for n, v in metrics], columns=['metric', 'value'])
    df.to_csv(path, index=False)
    logger.info("wrote %s", path)


def writeHistogramCsv(path, centres, counts):
    df = pd.DataFrame({'bin_center': np.asarray(centres), 'count': np.asarray(counts, dtype=int)})
    df.to_csv(path, index=False)
    logger.info("wrote %s", path)

# EOF
