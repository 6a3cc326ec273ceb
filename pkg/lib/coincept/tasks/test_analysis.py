#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

import json

import numpy as np
import pandas as pd
import pytest
from scipy.special import i0

from coincept.errors import InvalidArgumentError
from coincept.tasks import analysis as al
from coincept.tasks import report


def test_identical_pairs_align():
    z = np.random.default_rng(0).standard_normal((5, 3))
    assert al.alignment(z, z * 2.0) == pytest.approx(0.0, abs=1e-15)


def test_antipodal_uniformity():
    assert al.uniformity(np.array([[1.0, 0.0], [-3.0, 0.0]])) == pytest.approx(-8.0)


def test_uniformity_on_circle():
    rng = np.random.default_rng(1)
    theta = rng.uniform(0.0, 2.0 * np.pi, 1000)
    z = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    d = np.sum((z[:, None, :] - z[None, :, :]) ** 2, axis=2)
    iu = np.triu_indices(1000, k=1)
    direct = np.log(np.mean(np.exp(-2.0 * d[iu])))
    assert al.uniformity(z) == pytest.approx(direct, abs=1e-9)
    # E exp(-2|u-v|^2) over the circle is exp(-4) I0(4)
    assert al.uniformity(z) == pytest.approx(np.log(np.exp(-4.0) * i0(4.0)), abs=0.05)


def test_errors():
    with pytest.raises(InvalidArgumentError):
        al.alignment(np.zeros((2, 3)), np.ones((2, 3)))
    with pytest.raises(InvalidArgumentError):
        al.uniformity(np.ones((1, 3)))
    with pytest.raises(InvalidArgumentError):
        al.alignment(np.ones((2, 3)), np.ones((3, 3)))


def test_histogram():
    zp = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    zq = np.array([[1.0, 0.0], [-1.0, 0.0], [1.0, 0.0]])
    centres, counts = al.pairwiseDistanceHistogram(zp, zq, bins=4)
    np.testing.assert_allclose(centres, [0.25, 0.75, 1.25, 1.75])
    np.testing.assert_array_equal(counts, [1, 0, 1, 1])


def test_analyze(tinyCheckpoint):
    t = np.arange(32.0)
    X = np.stack([np.sin(t / p)[:, None] for p in (2.0, 3.0, 5.0, 7.0)])
    res = al.analyze(tinyCheckpoint, X, bins=5)
    assert res.alignment >= 0.0
    assert res.uniformity <= 0.0
    assert res.counts.sum() == 4


def test_report(tmp_path):
    metrics = [('accuracy', 0.75), ('n_test', 12)]
    doc = report.summary('classify', report.configHash('[train]\n'), metrics)
    assert doc['config_hash'] == report.configHash('[train]\n')
    assert len(doc['config_hash']) == 64
    assert json.loads(report.dumps(doc))['metrics'][0] == {'name': 'accuracy', 'value': 0.75}
    path = str(tmp_path / 'm.csv')
    report.writeMetricsCsv(path, metrics)
    df = pd.read_csv(path)
    assert df['metric'].tolist() == ['accuracy', 'n_test']
    hpath = str(tmp_path / 'h.csv')
    report.writeHistogramCsv(hpath, [0.5, 1.5], [3, 4])
    assert list(pd.read_csv(hpath).columns) == ['bin_center', 'count']

# EOF
