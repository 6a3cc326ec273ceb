#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

import json
import logging
import os

import jsonschema
import numpy as np
import pandas as pd
import pytest

from coincli import coincli
from coincept.model import encoder as enc

SCHEMA_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'schema', 'metrics.schema.json')

TINY = ['--set', 'encoder.hiddenDim=4', '--set', 'encoder.outputDim=8', '--set', 'encoder.nBlocks=2',
        '--set', 'encoder.baseKernels=2, 3', '--set', 'train.batchSize=2', '--set', 'train.windowLen=32',
        '--set', 'sampler.minOverlap=4', '--set', 'train.logEvery=0']


@pytest.fixture(autouse=True)
def dropLogHandler():
    level = logging.getLogger().level
    yield
    if coincli._handler is not None:
        logging.getLogger().removeHandler(coincli._handler)
        coincli._handler = None
    logging.getLogger().setLevel(level)


@pytest.fixture(scope='module')
def schema():
    with open(SCHEMA_PATH) as f:
        return json.load(f)


def run(capsys, *argv):
    code = coincli.main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def metric(doc, name):
    return {m['name']: m['value'] for m in doc['metrics']}[name]


@pytest.fixture
def toyCsv(tmp_path, capsys):
    path = tmp_path / 'toy.csv'
    assert run(capsys, 'synth', '--kind', 'toy', '--seed', 1, '--out', path)[0] == 0
    return path


@pytest.fixture
def toyCkpt(tmp_path, capsys, toyCsv):
    path = tmp_path / 'toy.ckpt'
    code, _ = run(capsys, 'train', '--data', toyCsv, '--out', path, '--iters', 2, *TINY)
    assert code == 0
    return path


def test_synth_toy_deterministic(tmp_path, capsys, schema):
    a, b = tmp_path / 'a.csv', tmp_path / 'b.csv'
    code, doc = run(capsys, 'synth', '--kind', 'toy', '--seed', 1, '--out', a)
    assert code == 0
    jsonschema.validate(doc, schema)
    assert [r['name'] for r in doc['regions']] == ['noise1', 'shift', 'noise2']
    run(capsys, 'synth', '--kind', 'toy', '--seed', 1, '--out', b)
    assert a.read_bytes() == b.read_bytes()


def test_synth_classes(tmp_path, capsys):
    path = tmp_path / 'c_TRAIN.tsv'
    code, doc = run(capsys, 'synth', '--kind', 'classes', '--per-class', 20, '--out', path)
    assert code == 0
    assert len(path.read_text().splitlines()) == 60
    assert (tmp_path / 'c_TEST.tsv').exists()
    assert metric(doc, 'rows') == 60


def test_synth_bad_kind(tmp_path):
    with pytest.raises(SystemExit) as err:
        coincli.main(['synth', '--kind', 'waves', '--out', str(tmp_path / 'x.csv')])
    assert err.value.code == 2


def test_perturb_zero_alpha(tmp_path, capsys, toyCsv):
    out = tmp_path / 'p.csv'
    assert run(capsys, 'perturb', '--in', toyCsv, '--alpha', 0, '--out', out)[0] == 0
    a, b = pd.read_csv(toyCsv), pd.read_csv(out)
    assert a.shape == b.shape
    np.testing.assert_allclose(b['value'], a['value'], atol=1e-8)


def test_perturb_reduces_high_band(tmp_path, capsys, toyCsv):
    out = tmp_path / 'p.csv'
    code, doc = run(capsys, 'perturb', '--in', toyCsv, '--alpha', 0.2, '--out', out)
    assert code == 0
    x = pd.read_csv(toyCsv)['value'].to_numpy()
    y = pd.read_csv(out)['value'].to_numpy()
    freqs = np.fft.rfftfreq(len(x))
    high = freqs > 0.25
    assert np.sum(np.abs(np.fft.rfft(y))[high] ** 2) < np.sum(np.abs(np.fft.rfft(x))[high] ** 2)
    assert metric(doc, 'energy_removed') > 0


def test_train_reproducible(tmp_path, capsys, toyCsv, schema):
    a, b = tmp_path / 'a.ckpt', tmp_path / 'b.ckpt'
    trace = tmp_path / 'trace.csv'
    code, doc = run(capsys, 'train', '--data', toyCsv, '--out', a, '--trace', trace, '--iters', 3, *TINY)
    assert code == 0
    jsonschema.validate(doc, schema)
    assert metric(doc, 'iterations') == 3
    assert len(pd.read_csv(trace)) == 3
    run(capsys, 'train', '--data', toyCsv, '--out', b, '--iters', 3, *TINY)
    assert a.read_bytes() == b.read_bytes()


def test_train_missing_data(tmp_path, capsys):
    code, _ = run(capsys, 'train', '--data', tmp_path / 'nope.csv', '--out', tmp_path / 'x.ckpt')
    assert code == 2


def test_train_numeric_failure(tmp_path, capsys, toyCsv):
    code, _ = run(capsys, 'train', '--data', toyCsv, '--out', tmp_path / 'x.ckpt', '--iters', 5,
                  '--set', 'train.lr=1e30', *TINY)
    assert code == 3
    assert not (tmp_path / 'x.ckpt').exists()


def test_unknown_config_key(tmp_path, capsys):
    assert run(capsys, 'inspect', '--set', 'encoder.heads=4')[0] == 2
    bad = tmp_path / 'bad.ini'
    bad.write_text("[encoder]\nhiddenDim = -1\n")
    assert run(capsys, 'inspect', '--config', bad)[0] == 2


def test_encode(tmp_path, capsys, toyCsv, toyCkpt):
    out = tmp_path / 'z.npy'
    assert run(capsys, 'encode', '--ckpt', toyCkpt, '--data', toyCsv, '--out', out)[0] == 0
    assert np.load(out).shape == (1, 900, 8)
    assert run(capsys, 'encode', '--ckpt', toyCkpt, '--data', toyCsv, '--out', out, '--pool')[0] == 0
    assert np.load(out).shape == (1, 8)


def test_checkpoint_mismatch(tmp_path, capsys, toyCkpt):
    wide = tmp_path / 'wide.csv'
    wide.write_text("timestamp,a,b\n" + "".join("%u,%u,%u\n" % (i, i, 2 * i) for i in range(40)))
    code, _ = run(capsys, 'encode', '--ckpt', toyCkpt, '--data', wide, '--out', tmp_path / 'z.npy')
    assert code == 4
    garbage = tmp_path / 'garbage.ckpt'
    garbage.write_bytes(b'not a checkpoint at all')
    code, _ = run(capsys, 'encode', '--ckpt', garbage, '--data', wide, '--out', tmp_path / 'z.npy')
    assert code == 4


def test_eval_forecast(tmp_path, capsys, toyCsv, toyCkpt, schema):
    code, doc = run(capsys, 'eval-forecast', '--ckpt', toyCkpt, '--data', toyCsv, '--out-dir', tmp_path,
                    '--baseline', '--set', 'forecast.horizons=4, 8', '--set', 'forecast.window=16')
    assert code == 0
    jsonschema.validate(doc, schema)
    assert doc['task'] == 'forecast'
    for name in ('mse_h4', 'mae_h8', 'baseline_mse_h4'):
        assert np.isfinite(metric(doc, name))
    assert (tmp_path / 'forecast_metrics.csv').exists()


def test_eval_classify(tmp_path, capsys, schema):
    data = tmp_path / 'c_TRAIN.tsv'
    run(capsys, 'synth', '--kind', 'classes', '--per-class', 6, '--length', 32, '--set', 'synth.testPerClass=4',
        '--set', 'synth.classPeriod=8', '--out', data)
    ckpt = tmp_path / 'c.ckpt'
    assert run(capsys, 'train', '--data', data, '--out', ckpt, '--iters', 2, *TINY)[0] == 0
    code, doc = run(capsys, 'eval-classify', '--ckpt', ckpt, '--data', data, '--out-dir', tmp_path,
                    '--set', 'classify.folds=3')
    assert code == 0
    jsonschema.validate(doc, schema)
    assert 0.0 <= metric(doc, 'accuracy') <= 1.0
    assert metric(doc, 'n_test') == 12


def test_eval_anomaly(tmp_path, capsys, toyCkpt, schema):
    stream = tmp_path / 's.csv'
    run(capsys, 'synth', '--kind', 'stream', '--length', 400, '--set', 'synth.nSpikes=2',
        '--set', 'synth.warmup=150', '--out', stream)
    plot = tmp_path / 'scores.png'
    code, doc = run(capsys, 'eval-anomaly', '--ckpt', toyCkpt, '--data', stream, '--out-dir', tmp_path,
                    '--plot', plot, '--set', 'anomaly.window=16', '--set', 'anomaly.trailingWindow=50')
    assert code == 0
    jsonschema.validate(doc, schema)
    for name in ('precision', 'recall', 'f1'):
        assert 0.0 <= metric(doc, name) <= 1.0
    assert plot.exists()
    scores = pd.read_csv(tmp_path / 'anomaly_scores.csv')
    assert len(scores) == 400 and scores['label'].sum() == 2


def test_eval_anomaly_needs_labels(tmp_path, capsys, toyCsv, toyCkpt):
    assert run(capsys, 'eval-anomaly', '--ckpt', toyCkpt, '--data', toyCsv)[0] == 2


def test_analyze(tmp_path, capsys, toyCsv, toyCkpt, schema):
    code, doc = run(capsys, 'analyze', '--ckpt', toyCkpt, '--data', toyCsv, '--out-dir', tmp_path,
                    '--segment', 100, '--bins', 10)
    assert code == 0
    jsonschema.validate(doc, schema)
    assert metric(doc, 'alignment') >= 0.0
    hist = pd.read_csv(tmp_path / 'distance_histogram.csv')
    assert list(hist.columns) == ['bin_center', 'count']
    assert hist['count'].sum() == 9


def test_inspect(capsys, schema):
    code, doc = run(capsys, 'inspect')
    assert code == 0
    jsonschema.validate(doc, schema)
    unit = [u for u in doc['units'] if u['block'] == 3 and u['kernel'] == 8][0]
    assert unit['receptiveField'] == 3375
    assert metric(doc, 'parameters') == enc.paramCount(enc.EncoderConfig()) == 522496

    code, deep = run(capsys, 'inspect', '--set', 'encoder.nBlocks=6')
    assert metric(deep, 'max_receptive_field') == metric(doc, 'max_receptive_field') ** 2
    assert metric(deep, 'parameters') < 2.2 * metric(doc, 'parameters')

# EOF
