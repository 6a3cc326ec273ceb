#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

import json
import struct

import numpy as np
import pytest

from coincept.errors import CorruptFileError, ManifestFieldError, UnsupportedVersionError
from coincept.model import checkpoint as ck
from coincept.model import encoder as enc


def tinyCheckpoint(seed=3):
    cfg = enc.EncoderConfig(nFeatures=2, hiddenDim=4, outputDim=6, nBlocks=2, baseKernels=[2, 3])
    return ck.Checkpoint(encoder=cfg, params=enc.initParams(cfg, seed, 'float32'),
                         train={'lr': 0.001}, iterations=7, finalLoss=1.25,
                         normMean=[0.5, -1.0], normStd=[2.0, 0.0])


def split(raw):
    version, mlen = struct.unpack(ck.HEADER_FORMAT, raw[len(ck.MAGIC):ck.HEADER_LEN])
    manifest = json.loads(raw[ck.HEADER_LEN:ck.HEADER_LEN + mlen])
    return version, manifest, raw[ck.HEADER_LEN + mlen:]


def join(version, manifest, payload):
    m = json.dumps(manifest).encode('utf-8')
    return ck.MAGIC + struct.pack(ck.HEADER_FORMAT, version, len(m)) + m + payload


def test_round_trip_bit_exact(tmp_path):
    a = tinyCheckpoint()
    path = str(tmp_path / 'a.ckpt')
    ck.save(a, path)
    b = ck.load(path)
    assert b.encoder == a.encoder
    assert b.iterations == 7 and b.finalLoss == 1.25 and b.train == {'lr': 0.001}
    assert list(b.params) == list(a.params)
    for name in a.params:
        assert b.params[name].tobytes() == a.params[name].tobytes()
    np.testing.assert_array_equal(b.normStd, [2.0, 0.0])
    assert ck.toBytes(b) == ck.toBytes(a)


def test_manifest_offsets():
    raw = ck.toBytes(tinyCheckpoint())
    _, manifest, payload = split(raw)
    end = 0
    for rec in manifest['tensors']:
        assert rec['offset'] == end
        assert rec['nbytes'] == 4 * int(np.prod(rec['shape']))
        end = rec['offset'] + rec['nbytes']
    assert end == len(payload)
    assert [r['name'] for r in manifest['tensors']][-2:] == ['norm.mean', 'norm.std']


def test_unknown_field():
    version, manifest, payload = split(ck.toBytes(tinyCheckpoint()))
    manifest['dropout'] = 0.1
    with pytest.raises(ManifestFieldError) as err:
        ck.fromBytes(join(version, manifest, payload))
    assert err.value.field == 'dropout'
    assert 'dropout' in str(err.value)


def test_unknown_encoder_field():
    version, manifest, payload = split(ck.toBytes(tinyCheckpoint()))
    manifest['encoder']['heads'] = 4
    with pytest.raises(ManifestFieldError) as err:
        ck.fromBytes(join(version, manifest, payload))
    assert err.value.field == 'encoder.heads'


def test_missing_field():
    version, manifest, payload = split(ck.toBytes(tinyCheckpoint()))
    del manifest['iterations']
    with pytest.raises(CorruptFileError):
        ck.fromBytes(join(version, manifest, payload))


def test_future_version():
    version, manifest, payload = split(ck.toBytes(tinyCheckpoint()))
    manifest['format_version'] = 2
    with pytest.raises(UnsupportedVersionError):
        ck.fromBytes(join(2, manifest, payload))


def test_truncated():
    raw = ck.toBytes(tinyCheckpoint())
    with pytest.raises(CorruptFileError):
        ck.fromBytes(raw[:-4])
    with pytest.raises(CorruptFileError):
        ck.fromBytes(raw[:10])
    with pytest.raises(CorruptFileError):
        ck.fromBytes(raw + b'\0\0\0\0')
    with pytest.raises(CorruptFileError):
        ck.fromBytes(b'NOTACKPT' + raw[8:])


def test_normalize_and_encode():
    a = tinyCheckpoint()
    x = np.array([[2.5, 3.0], [0.5, -1.0]])
    np.testing.assert_allclose(a.normalize(x), [[1.0, 4.0], [0.0, 0.0]])
    z = a.encode(np.zeros((10, 2)))
    assert z.shape == (1, 10, 6)
    with pytest.raises(ck.ArtifactMismatchError):
        a.encode(np.zeros((10, 3)))

# EOF
