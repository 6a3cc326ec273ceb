#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for wide CSV streams (one row per time step, one column per feature)."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import pandas as pd

from coincept.errors import ParseError, ValidationError

logger = logging.getLogger(__name__)

TIMESTAMP = 'timestamp'
LABEL = 'is_anomaly'


@dataclass
class StreamDataset:
    timestamps: np.ndarray
    values: np.ndarray                  # M x N
    columns: List[str] = field(default_factory=list)
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim == 1:
            self.values = self.values[:, None]
        if not self.columns:
            self.columns = ['x%u' % i for i in range(self.values.shape[1])]
        if len(self.timestamps) != len(self.values):
            raise ValidationError("%u timestamps for %u rows" % (len(self.timestamps), len(self.values)))
        if self.labels is not None and len(self.labels) != len(self.values):
            raise ValidationError("%u labels for %u rows" % (len(self.labels), len(self.values)))
        ts = np.asarray(self.timestamps)
        if len(ts) > 1 and not np.all(ts[1:] > ts[:-1]):
            bad = int(np.argmin(ts[1:] > ts[:-1])) + 1
            raise ValidationError("timestamps not strictly increasing at row %u" % bad)

    def __len__(self):
        return len(self.values)

    def splits(self, fractions=(0.6, 0.2, 0.2)):
        """Row boundaries (trainEnd, validEnd) for train/valid/test fractions."""
        if len(fractions) != 3 or any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
            raise ValidationError("split fractions must be three values summing to 1")
        M = len(self)
        trainEnd = int(np.floor(M * fractions[0] + 1e-9))
        validEnd = int(np.floor(M * (fractions[0] + fractions[1]) + 1e-9))
        return trainEnd, validEnd


def readCsvWide(path, timestampColumn=TIMESTAMP, labelColumn=LABEL):
    try:
        df = pd.read_csv(path, float_precision='round_trip')
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise ParseError("%s: %s" % (path, e)) from e
    if df.empty:
        raise ParseError("%s: no rows" % path)
    if timestampColumn not in df.columns:
        raise ValidationError("%s: no '%s' column" % (path, timestampColumn))

    ts = df.pop(timestampColumn)
    if not pd.api.types.is_numeric_dtype(ts):
        try:
            ts = pd.to_datetime(ts)
        except (ValueError, TypeError) as e:
            raise ParseError("%s: bad timestamps (%s)" % (path, e)) from e
    ts = ts.to_numpy()

    labels = None
    if labelColumn and labelColumn in df.columns:
        lab = df.pop(labelColumn)
        if not lab.isin([0, 1]).all():
            raise ValidationError("%s: '%s' must be 0/1" % (path, labelColumn))
        labels = lab.to_numpy(dtype=int)

    try:
        values = df.apply(pd.to_numeric).to_numpy(dtype=np.float64)
    except ValueError as e:
        raise ParseError("%s: non-numeric value (%s)" % (path, e)) from e
    if not np.all(np.isfinite(values)):
        raise ValidationError("%s: missing or non-finite values" % path)
    if values.shape[1] == 0:
        raise ValidationError("%s: no value columns" % path)
    ds = StreamDataset(timestamps=ts, values=values, columns=list(df.columns), labels=labels)
    logger.info("read %s: %u steps x %u features%s", path, len(ds), values.shape[1],
                ", labeled" if labels is not None else "")
    return ds


def writeCsvWide(path, ds, timestampColumn=TIMESTAMP, labelColumn=LABEL):
    df = pd.DataFrame(ds.values, columns=ds.columns)
    df.insert(0, timestampColumn, ds.timestamps)
    if ds.labels is not None:
        df[labelColumn] = np.asarray(ds.labels, dtype=int)
    df.to_csv(path, index=False)

# EOF
