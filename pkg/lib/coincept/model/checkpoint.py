#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for the checkpoint container.

File layout (all integers little endian):

    magic     8 bytes   b'COINCEPT'
    header    '<II'     format version, manifest length in bytes
    manifest  UTF-8 JSON
    payload   raw IEEE-754 float32 tensors, little endian

The manifest lists every tensor as {name, shape, offset, nbytes} with
offsets relative to the payload start, in storage order. Normalization
statistics are stored as the tensors ``norm.mean`` and ``norm.std``.
"""

import collections
import dataclasses
import json
import logging
import math
import struct
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from coincept.errors import (ArtifactMismatchError, CorruptFileError, InvalidArgumentError,
                             ManifestFieldError, UnsupportedVersionError)
from coincept.model import encoder as enc

logger = logging.getLogger(__name__)

MAGIC = b'COINCEPT'
HEADER_FORMAT = '<II'
HEADER_LEN = len(MAGIC) + struct.calcsize(HEADER_FORMAT)
FORMAT_VERSION = 1
DTYPE = np.dtype('<f4')

MANIFEST_FIELDS = ('format_version', 'encoder', 'train', 'iterations', 'final_loss', 'tensors')
TENSOR_FIELDS = ('name', 'shape', 'offset', 'nbytes')

TensorRecord = collections.namedtuple('TensorRecord', TENSOR_FIELDS)


@dataclass
class Checkpoint:
    encoder: enc.EncoderConfig
    params: Dict[str, np.ndarray]
    train: dict = field(default_factory=dict)
    iterations: int = 0
    finalLoss: float = 0.0
    normMean: np.ndarray = None
    normStd: np.ndarray = None

    def __post_init__(self):
        # stored at 32-bit, keep the in-memory copy identical to the file
        self.params = collections.OrderedDict((n, np.asarray(v, dtype=np.float32))
                                              for n, v in self.params.items())
        n = self.encoder.nFeatures
        self.normMean = np.zeros(n, np.float32) if self.normMean is None \
            else np.asarray(self.normMean, dtype=np.float32)
        self.normStd = np.ones(n, np.float32) if self.normStd is None \
            else np.asarray(self.normStd, dtype=np.float32)

    def checkInput(self, x):
        x = np.asarray(x)
        if x.shape[-1] != self.encoder.nFeatures:
            raise ArtifactMismatchError("checkpoint expects %u feature(s), data has %u"
                                        % (self.encoder.nFeatures, x.shape[-1]))
        return x

    def normalize(self, x):
        """Apply the training z-score (features with std 0 are centered only)."""
        x = self.checkInput(x).astype(np.float64)
        std = np.where(self.normStd > 0, self.normStd, 1.0).astype(np.float64)
        return (x - self.normMean.astype(np.float64)) / std

    def encode(self, x, mask=None, normalize=True, precision='float32'):
        """Representations of B x T x N (or T x N) input."""
        x = self.normalize(x) if normalize else self.checkInput(x)
        return enc.encode(self.params, self.encoder, x, mask, precision).values

    def tensors(self):
        out = collections.OrderedDict(self.params)
        out['norm.mean'] = self.normMean
        out['norm.std'] = self.normStd
        return out


def toBytes(ckpt):
    records = []
    chunks = []
    offset = 0
    for name, arr in ckpt.tensors().items():
        data = np.ascontiguousarray(arr, dtype=DTYPE).tobytes()
        records.append({'name': name, 'shape': list(arr.shape), 'offset': offset, 'nbytes': len(data)})
        chunks.append(data)
        offset += len(data)
    manifest = {
        'format_version': FORMAT_VERSION,
        'encoder': ckpt.encoder.toDict(),
        'train': ckpt.train,
        'iterations': int(ckpt.iterations),
        'final_loss': float(ckpt.finalLoss),
        'tensors': records,
    }
    mbytes = json.dumps(manifest, separators=(',', ':')).encode('utf-8')
    head = MAGIC + struct.pack(HEADER_FORMAT, FORMAT_VERSION, len(mbytes))
    return head + mbytes + b''.join(chunks)


def save(ckpt, path):
    data = toBytes(ckpt)
    with open(path, 'wb') as f:
        f.write(data)
    logger.info("saved checkpoint %s (%u tensors, %u bytes)", path, len(ckpt.tensors()), len(data))


def _checkFields(d, allowed, prefix=''):
    for key in d:
        if key not in allowed:
            raise ManifestFieldError(prefix + key)
    for key in allowed:
        if key not in d:
            raise CorruptFileError("manifest lacks field '%s%s'" % (prefix, key))


def fromBytes(raw):
    if len(raw) < HEADER_LEN or raw[:len(MAGIC)] != MAGIC:
        raise CorruptFileError("not a coincept checkpoint")
    version, mlen = struct.unpack(HEADER_FORMAT, raw[len(MAGIC):HEADER_LEN])
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError("checkpoint format %u, this build reads %u"
                                      % (version, FORMAT_VERSION))
    if HEADER_LEN + mlen > len(raw):
        raise CorruptFileError("truncated manifest")
    try:
        manifest = json.loads(raw[HEADER_LEN:HEADER_LEN + mlen].decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CorruptFileError("bad manifest: %s" % e) from e
    if not isinstance(manifest, dict):
        raise CorruptFileError("manifest is not an object")
    _checkFields(manifest, MANIFEST_FIELDS)
    if manifest['format_version'] != version:
        raise CorruptFileError("manifest version %s disagrees with header %u"
                               % (manifest['format_version'], version))

    known = {f.name for f in dataclasses.fields(enc.EncoderConfig)}
    for key in manifest['encoder']:
        if key not in known:
            raise ManifestFieldError('encoder.' + key)
    try:
        cfg = enc.EncoderConfig.fromDict(manifest['encoder'])
    except (InvalidArgumentError, TypeError) as e:
        raise CorruptFileError("bad encoder config: %s" % e) from e

    payload = memoryview(raw)[HEADER_LEN + mlen:]
    tensors = collections.OrderedDict()
    end = 0
    for rec in manifest['tensors']:
        _checkFields(rec, TENSOR_FIELDS, 'tensors.')
        r = TensorRecord(**rec)
        count = math.prod(r.shape)
        if r.offset < end or r.nbytes != count * DTYPE.itemsize:
            raise CorruptFileError("tensor %s: bad offset or size" % r.name)
        end = r.offset + r.nbytes
        if end > len(payload):
            raise CorruptFileError("tensor %s: payload truncated" % r.name)
        tensors[r.name] = np.frombuffer(payload, dtype=DTYPE, count=count,
                                        offset=r.offset).reshape(r.shape).astype(np.float32)
    if end != len(payload):
        raise CorruptFileError("%u trailing payload bytes" % (len(payload) - end))

    normMean = tensors.pop('norm.mean', None)
    normStd = tensors.pop('norm.std', None)
    try:
        enc.checkParams(tensors, cfg)
    except InvalidArgumentError as e:
        raise CorruptFileError(str(e)) from e
    return Checkpoint(encoder=cfg, params=tensors, train=manifest['train'],
                      iterations=manifest['iterations'], finalLoss=manifest['final_loss'],
                      normMean=normMean, normStd=normStd)


def load(path):
    with open(path, 'rb') as f:
        raw = f.read()
    ckpt = fromBytes(raw)
    logger.debug("loaded checkpoint %s after %u iterations", path, ckpt.iterations)
    return ckpt

# EOF
