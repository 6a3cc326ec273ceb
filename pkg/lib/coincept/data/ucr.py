#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for UCR-style TSV archives.

One row per series: an integer-like class label, then the values, all
tab separated. Missing values (NaN or empty cells, also the trailing padding
of variable-length archives) become 0.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from coincept.errors import ParseError, ValidationError

logger = logging.getLogger(__name__)


@dataclass
class LabeledDataset:
    train: List[Tuple[np.ndarray, int]]
    test: List[Tuple[np.ndarray, int]] = field(default_factory=list)
    nClasses: int = 0
    classLabels: list = field(default_factory=list)   # original label of id i

    def __post_init__(self):
        if not self.train:
            raise ValidationError("labeled dataset needs training rows")
        for _, y in self.train + self.test:
            if not 0 <= y < self.nClasses:
                raise ValidationError("label %d outside [0, %d)" % (y, self.nClasses))

    def arrays(self, split='train'):
        """(X as n x M x N, y) of one split; all rows share one length."""
        rows = self.train if split == 'train' else self.test
        if not rows:
            return np.zeros((0, 0, 1)), np.zeros(0, dtype=int)
        X = np.stack([np.asarray(x, dtype=np.float64).reshape(len(x), -1) for x, _ in rows])
        return X, np.array([y for _, y in rows], dtype=int)


def _parseLabel(cell, lineno):
    try:
        v = float(cell)
    except ValueError:
        raise ParseError("label '%s' is not a number" % cell, lineno) from None
    if not math.isfinite(v) or v != int(v):
        raise ParseError("label '%s' is not integer-like" % cell, lineno)
    return int(v)


def _parseFile(path):
    rows = []
    width = None
    with open(path, 'r') as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip('\r\n')
            if not line.strip():
                continue
            cells = line.split('\t')
            if len(cells) < 2:
                raise ParseError("row has no values", lineno)
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise ParseError("ragged row: %u columns, expected %u" % (len(cells), width), lineno)
            label = _parseLabel(cells[0], lineno)
            try:
                values = np.array([float(c) if c.strip() else math.nan for c in cells[1:]])
            except ValueError as e:
                raise ParseError("bad value (%s)" % e, lineno) from None
            rows.append((values, label))
    if not rows:
        raise ParseError("%s: empty file" % path)
    return rows


def readUcrTsv(trainPath, testPath=None):
    train = _parseFile(trainPath)
    test = _parseFile(testPath) if testPath else []
    labels = sorted({y for _, y in train + test})
    ids = {lab: i for i, lab in enumerate(labels)}

    def convert(rows):
        out = []
        for values, y in rows:
            values = np.nan_to_num(values, nan=0.0)[:, None]
            out.append((values, ids[y]))
        return out

    ds = LabeledDataset(train=convert(train), test=convert(test), nClasses=len(labels),
                        classLabels=labels)
    logger.info("read %u train / %u test series, %u classes", len(ds.train), len(ds.test), ds.nClasses)
    return ds


def writeUcrTsv(path, rows):
    """Write (series, label) rows, univariate series only."""
    with open(path, 'w') as f:
        for x, y in rows:
            x = np.asarray(x, dtype=np.float64).reshape(-1)
            f.write('\t'.join([str(int(y))] + [repr(float(v)) for v in x]) + '\n')

# EOF
