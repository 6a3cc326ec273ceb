#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

import numpy as np
import pytest

from coincept.errors import InvalidArgumentError, NumericError
from coincept.grad import Tape, gradCheck, ops
from coincept.model import encoder as enc


def tiny(**kw):
    d = dict(nFeatures=2, hiddenDim=3, outputDim=4, nBlocks=2, baseKernels=[2, 3])
    d.update(kw)
    return enc.EncoderConfig(**d)


@pytest.mark.parametrize('k,i,d', [(2, 1, 1), (2, 2, 3), (8, 3, 225)])
def test_dilation(k, i, d):
    assert enc.dilationOf(k, i) == d


@pytest.mark.parametrize('k,i,r', [(2, 2, 9), (2, 1, 3), (5, 3, 729), (8, 3, 3375)])
def test_receptive_field(k, i, r):
    assert enc.receptiveFieldOf(k, i) == r
    if i > 1:
        assert r == enc.receptiveFieldOf(k, i - 1) + 2 * enc.dilationOf(k, i) * (k - 1)


def test_param_count_golden():
    cfg = enc.EncoderConfig()
    assert enc.paramCount(cfg) == 522496
    shapes = dict(enc.paramShapes(cfg))
    assert shapes['proj.weight'] == (1, 64) and shapes['proj.bias'] == (64,)
    assert 'block1.unit1.skip.weight' not in shapes
    assert shapes['block3.agg.weight'] == (320, 256, 1)


def test_param_count_scaling():
    c3 = enc.EncoderConfig(nBlocks=3)
    c6 = enc.EncoderConfig(nBlocks=6)
    assert enc.paramCount(c6) == 991552
    assert enc.paramCount(c6) < 2.2 * enc.paramCount(c3)
    assert enc.maxReceptiveField(c6) == enc.maxReceptiveField(c3) ** 2


def test_receptive_field_table():
    rows, perBlock = enc.receptiveFieldTable(enc.EncoderConfig())
    assert len(rows) == 9
    last = [r for r in rows if r['block'] == 3 and r['kernel'] == 8][0]
    assert last['receptiveField'] == 3375 and last['dilation'] == 225
    assert [b['maxReceptiveField'] for b in perBlock] == [15, 225, 3375]


def test_config_checks():
    with pytest.raises(InvalidArgumentError):
        enc.EncoderConfig(baseKernels=[1, 2]).validate()
    with pytest.raises(InvalidArgumentError):
        enc.EncoderConfig(nBlocks=0).validate()
    with pytest.raises(InvalidArgumentError, match='bogus'):
        enc.EncoderConfig.fromDict({'hiddenDim': 4, 'bogus': 1})
    cfg = tiny()
    assert enc.EncoderConfig.fromDict(cfg.toDict()) == cfg


def test_init_is_deterministic():
    a = enc.initParams(tiny(), 11)
    b = enc.initParams(tiny(), 11)
    c = enc.initParams(tiny(), 12)
    for name in a:
        np.testing.assert_array_equal(a[name], b[name])
    assert any(not np.array_equal(a[n], c[n]) for n in a)
    assert a['proj.weight'].dtype == np.float64
    f32 = enc.initParams(tiny(), 11, 'float32')
    np.testing.assert_array_equal(f32['proj.weight'], a['proj.weight'].astype(np.float32))
    bound = np.sqrt(1.0 / (3 * 3))
    assert np.all(np.abs(a['block1.unit2.conv1.weight']) <= bound)


@pytest.mark.parametrize('B,T', [(1, 1), (2, 2), (3, 5), (1, 37)])
def test_output_shape(B, T):
    cfg = tiny()
    x = np.random.default_rng(T).standard_normal((B, T, 2))
    z = enc.encode(enc.initParams(cfg, 0), cfg, x)
    assert z.values.shape == (B, T, 4)


def test_batch_independence():
    cfg = tiny()
    params = enc.initParams(cfg, 1, 'float32')
    x = np.random.default_rng(2).standard_normal((3, 20, 2))
    whole = enc.encode(params, cfg, x).values
    for b in range(3):
        np.testing.assert_allclose(enc.encode(params, cfg, x[b]).values[0], whole[b],
                                   rtol=1e-5, atol=1e-6)


def test_deterministic_forward():
    cfg = tiny()
    params = enc.initParams(cfg, 3, 'float32')
    x = np.random.default_rng(4).standard_normal((2, 16, 2))
    np.testing.assert_array_equal(enc.encode(params, cfg, x).values, enc.encode(params, cfg, x).values)


def test_mask_hides_step_completely():
    cfg = tiny()
    params = enc.initParams(cfg, 5, 'float64')
    x = np.random.default_rng(6).standard_normal((1, 12, 2))
    mask = np.zeros((1, 12), dtype=bool)
    mask[0, 7] = True
    y = x.copy()
    y[0, 7] = [100.0, -50.0]
    np.testing.assert_array_equal(enc.encode(params, cfg, x, mask, 'float64').values,
                                  enc.encode(params, cfg, y, mask, 'float64').values)


def test_zero_weights_give_constant_output():
    cfg = enc.EncoderConfig(nFeatures=1, hiddenDim=3, outputDim=2, nBlocks=1, baseKernels=[2])
    params = {n: np.zeros(v.shape) for n, v in enc.initParams(cfg, 0).items()}
    params['block1.agg.weight'][:, :2, 0] = np.eye(2)
    params['block1.agg.bias'][:] = [0.5, -1.5]
    params['block1.unit1.conv2.bias'][:] = [1.0, 2.0, 3.0]
    z = enc.encode(params, cfg, np.random.default_rng(0).standard_normal((2, 9, 1)),
                   precision='float64').values
    np.testing.assert_allclose(z, np.broadcast_to([1.5, 0.5], z.shape))


def test_gradients_match_finite_differences():
    cfg = tiny()
    params = enc.initParams(cfg, 7)
    names = list(params)
    x = np.random.default_rng(8).standard_normal((2, 10, 2))
    r = np.random.default_rng(9).standard_normal((2, 10, 4))

    def build(tape, leaves):
        z = enc.forward(tape, dict(zip(names, leaves)), cfg, x)
        return ops.sumAll(ops.mul(z, r))

    assert gradCheck(build, [params[n] for n in names]) < 1e-4


@pytest.mark.parametrize('k', [2, 5, 8])
@pytest.mark.parametrize('i', [1, 2, 3])
def test_unit_path_receptive_field(k, i):
    r = enc.receptiveFieldOf(k, i)
    cfg = enc.EncoderConfig(nFeatures=1, hiddenDim=2, outputDim=2, nBlocks=i, baseKernels=[k])
    params = enc.initParams(cfg, 13)
    for b in range(1, i + 1):
        params['block%u.pool.weight' % b][:] = 0.0
    T = r + 40
    t0 = T // 2
    tape = Tape('float64')
    p = {n: tape.constant(v) for n, v in params.items()}
    x = tape.leaf(np.random.default_rng(k * 10 + i).standard_normal((1, T, 1)), name='x')
    z = enc.forward(tape, p, cfg, x)
    tape.backward(ops.sumAll(ops.crop(z, 1, t0, t0 + 1)))
    support = np.flatnonzero(x.grad[0, :, 0])
    assert support[-1] - support[0] + 1 == r


def test_numeric_failure_names_block():
    cfg = tiny()
    params = enc.initParams(cfg, 0)
    params['block2.unit1.conv1.weight'][:] = 1e200
    params['block2.unit1.conv2.weight'][:] = 1e200
    with pytest.raises(NumericError) as err:
        enc.encode(params, cfg, np.ones((1, 6, 2)), precision='float64')
    assert err.value.block == 2


def test_projection_failure_names_block():
    cfg = tiny()
    params = enc.initParams(cfg, 0)
    params['proj.weight'][:] = 1e308
    with pytest.raises(NumericError) as err:
        enc.encode(params, cfg, np.full((1, 6, 2), 10.0), precision='float64')
    assert err.value.block == 0
    assert 'projection' in str(err.value)


def test_dilated_stack_shapes():
    cfg = tiny(blockType='dilated')
    shapes = dict(enc.paramShapes(cfg))
    assert shapes['block1.conv1.weight'] == (3, 3, 3)
    assert shapes['block2.conv2.weight'] == (4, 4, 3)
    assert shapes['block2.res.weight'] == (4, 3, 1)
    assert 'block1.res.weight' not in shapes
    assert enc.paramCount(cfg) == 177
    z = enc.encode(enc.initParams(cfg, 0), cfg, np.random.default_rng(1).standard_normal((2, 9, 2)))
    assert z.values.shape == (2, 9, 4)
    with pytest.raises(InvalidArgumentError):
        tiny(blockType='lstm').validate()


def test_dilated_receptive_field_table():
    cfg = enc.EncoderConfig(blockType='dilated', nBlocks=4)
    rows, perBlock = enc.receptiveFieldTable(cfg)
    assert [r['dilation'] for r in rows] == [1, 2, 4, 8]
    assert [b['maxReceptiveField'] for b in perBlock] == [5, 13, 29, 61]
    assert enc.maxReceptiveField(cfg) == 61


@pytest.mark.parametrize('i', [1, 2, 3])
def test_dilated_path_receptive_field(i):
    r = enc.dilatedReceptiveField(i)
    cfg = enc.EncoderConfig(nFeatures=1, hiddenDim=2, outputDim=2, nBlocks=i, blockType='dilated')
    params = enc.initParams(cfg, 17)
    T = r + 20
    t0 = T // 2
    tape = Tape('float64')
    p = {n: tape.constant(v) for n, v in params.items()}
    x = tape.leaf(np.random.default_rng(i).standard_normal((1, T, 1)), name='x')
    z = enc.forward(tape, p, cfg, x)
    tape.backward(ops.sumAll(ops.crop(z, 1, t0, t0 + 1)))
    support = np.flatnonzero(x.grad[0, :, 0])
    assert support[-1] - support[0] + 1 == r


def test_dilated_gradients():
    cfg = tiny(blockType='dilated')
    params = enc.initParams(cfg, 7)
    names = list(params)
    x = np.random.default_rng(8).standard_normal((2, 10, 2))
    r = np.random.default_rng(9).standard_normal((2, 10, 4))

    def build(tape, leaves):
        return ops.sumAll(ops.mul(enc.forward(tape, dict(zip(names, leaves)), cfg, x), r))

    assert gradCheck(build, [params[n] for n in names]) < 1e-4


def test_input_checks():
    cfg = tiny()
    params = enc.initParams(cfg, 0)
    with pytest.raises(InvalidArgumentError):
        enc.encode(params, cfg, np.ones((1, 6, 3)))
    del params['proj.bias']
    with pytest.raises(InvalidArgumentError):
        enc.encode(params, cfg, np.ones((1, 6, 2)))

# EOF
