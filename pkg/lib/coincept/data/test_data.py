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

from coincept import seeds
from coincept.data import csvwide, synth, ucr
from coincept.errors import ParseError, ValidationError


def write(path, text):
    path.write_text(text)
    return str(path)


def test_ucr_labels_and_nan(tmp_path):
    p = write(tmp_path / 'a_TRAIN.tsv', "1\t0.5\t1.0\t2.0\n2\t2.0\tNaN\t-1\n")
    ds = ucr.readUcrTsv(p)
    assert ds.nClasses == 2
    assert sorted(y for _, y in ds.train) == [0, 1]
    assert ds.classLabels == [1, 2]
    X, y = ds.arrays('train')
    assert X.shape == (2, 3, 1)
    np.testing.assert_array_equal(X[1, :, 0], [2.0, 0.0, -1.0])


def test_ucr_train_and_test(tmp_path):
    tr = write(tmp_path / 'tr.tsv', "-1\t1\t2\n1\t3\t4\n")
    te = write(tmp_path / 'te.tsv', "1\t5\t6\n-1\t7\t8\n")
    ds = ucr.readUcrTsv(tr, te)
    assert [y for _, y in ds.test] == [1, 0]
    X, y = ds.arrays('test')
    np.testing.assert_array_equal(X[:, :, 0], [[5, 6], [7, 8]])


def test_ucr_trailing_empty_cells(tmp_path):
    p = write(tmp_path / 'pad.tsv', "1\t0.5\t1.0\t2.0\n2\t3.0\t\t\n")
    ds = ucr.readUcrTsv(p)
    X, _ = ds.arrays('train')
    assert X.shape == (2, 3, 1)
    np.testing.assert_array_equal(X[1, :, 0], [3.0, 0.0, 0.0])


def test_ucr_ragged(tmp_path):
    p = write(tmp_path / 'bad.tsv', "1\t0.5\t1.0\n2\t2.0\n")
    with pytest.raises(ParseError) as err:
        ucr.readUcrTsv(p)
    assert err.value.line == 2
    assert 'line 2' in str(err.value)


def test_ucr_bad_label(tmp_path):
    p = write(tmp_path / 'bad.tsv', "1.5\t0.5\t1.0\n")
    with pytest.raises(ParseError):
        ucr.readUcrTsv(p)


def test_ucr_empty(tmp_path):
    with pytest.raises(ParseError):
        ucr.readUcrTsv(write(tmp_path / 'empty.tsv', ""))


def test_ucr_writer(tmp_path):
    ds = synth.synthClasses(synth.ClassesConfig(perClass=2, testPerClass=1, length=16))
    p = str(tmp_path / 'c.tsv')
    ucr.writeUcrTsv(p, ds.train)
    back = ucr.readUcrTsv(p)
    np.testing.assert_array_equal(back.arrays('train')[0], ds.arrays('train')[0])
    np.testing.assert_array_equal(back.arrays('train')[1], ds.arrays('train')[1])


def test_csv_round_trip(tmp_path):
    ds = csvwide.StreamDataset(timestamps=np.array([10, 11, 15]),
                               values=np.array([[0.1, 1e-17], [2.0 / 3.0, -5.0], [np.pi, 1e300]]),
                               columns=['a', 'b'], labels=np.array([0, 1, 0]))
    p = str(tmp_path / 's.csv')
    csvwide.writeCsvWide(p, ds)
    back = csvwide.readCsvWide(p)
    np.testing.assert_array_equal(back.values, ds.values)
    np.testing.assert_array_equal(back.timestamps, ds.timestamps)
    np.testing.assert_array_equal(back.labels, [0, 1, 0])
    assert back.columns == ['a', 'b']


def test_csv_shuffled_timestamps(tmp_path):
    p = write(tmp_path / 's.csv', "timestamp,x\n3,1.0\n1,2.0\n2,3.0\n")
    with pytest.raises(ValidationError):
        csvwide.readCsvWide(p)


def test_csv_datetime_and_no_labels(tmp_path):
    p = write(tmp_path / 's.csv', "timestamp,x,y\n2024-01-01 00:00,1,2\n2024-01-01 01:00,3,4\n")
    ds = csvwide.readCsvWide(p)
    assert ds.labels is None
    assert ds.values.shape == (2, 2)


def test_csv_errors(tmp_path):
    with pytest.raises(ValidationError):
        csvwide.readCsvWide(write(tmp_path / 'a.csv', "time,x\n1,2\n"))
    with pytest.raises(ValidationError):
        csvwide.readCsvWide(write(tmp_path / 'b.csv', "timestamp,x,is_anomaly\n1,2,3\n"))
    with pytest.raises(ParseError):
        csvwide.readCsvWide(write(tmp_path / 'c.csv', "timestamp,x\n1,abc\n"))
    with pytest.raises(ParseError):
        csvwide.readCsvWide(write(tmp_path / 'd.csv', ""))


def test_splits():
    ds = csvwide.StreamDataset(timestamps=np.arange(100), values=np.zeros(100))
    assert ds.splits() == (60, 80)
    with pytest.raises(ValidationError):
        ds.splits((0.5, 0.5, 0.5))


def test_toy_pure_sine():
    cfg = synth.ToyConfig(noiseAmp=0.0, rampAmp=0.0, seed=3)
    toy = synth.synthToy(cfg)
    phase = seeds.generator(3, seeds.SYNTH).uniform(0.0, 2.0 * np.pi, size=3)[0]
    t = np.arange(900)
    np.testing.assert_allclose(toy.values[:, 0], np.sin(2 * np.pi * t / 60.0 + phase), atol=1e-12)


def test_toy_regions_partition():
    toy = synth.synthToy(synth.ToyConfig(length=901))
    starts = [r[0] for r in toy.regions]
    ends = [r[1] for r in toy.regions]
    assert starts[0] == 0 and ends[-1] == 901
    assert starts[1:] == ends[:-1]


def test_toy_noise_frequencies():
    cfg = synth.ToyConfig(seed=5)
    toy = synth.synthToy(cfg)
    for (lo, hi), f in [(toy.regions[0], cfg.noiseFreq1), (toy.regions[2], cfg.noiseFreq2)]:
        seg = toy.values[lo:hi, 0]
        freqs = np.fft.rfftfreq(len(seg))
        mag = np.abs(np.fft.rfft(seg))
        high = freqs > 0.1
        assert abs(freqs[high][np.argmax(mag[high])] - f) <= 1.0 / len(seg)


def test_classes_balanced_and_deterministic():
    cfg = synth.ClassesConfig(perClass=5, testPerClass=3, seed=9)
    a = synth.synthClasses(cfg)
    b = synth.synthClasses(cfg)
    assert np.bincount([y for _, y in a.train]).tolist() == [5, 5, 5]
    assert np.bincount([y for _, y in a.test]).tolist() == [3, 3, 3]
    np.testing.assert_array_equal(a.arrays('train')[0], b.arrays('train')[0])


def test_classes_template_oracle():
    cfg = synth.ClassesConfig(perClass=10, testPerClass=0, sigma=0.0, seed=2)
    ds = synth.synthClasses(cfg)
    t = np.arange(cfg.length, dtype=float)
    phases = np.linspace(0.0, 2.0 * np.pi, 1024, endpoint=False)
    templates = {}
    for label in range(3):
        T = np.stack([synth.classWaveform(label, t, cfg.period, ph) for ph in phases])
        T -= T.mean(axis=1, keepdims=True)
        templates[label] = T / np.linalg.norm(T, axis=1, keepdims=True)
    correct = 0
    for x, y in ds.train:
        v = x[:, 0] - x[:, 0].mean()
        v /= np.linalg.norm(v)
        scores = [np.max(templates[label] @ v) for label in range(3)]
        correct += int(np.argmax(scores) == y)
    assert correct == len(ds.train)


def test_stream_spikes():
    cfg = synth.StreamConfig(length=1300, nSpikes=5, warmup=300, seed=4)
    ds = synth.synthStream(cfg)
    assert ds.labels.sum() == 5
    assert np.all(np.flatnonzero(ds.labels) >= 300)
    spikes = np.flatnonzero(ds.labels)
    assert np.all(np.diff(spikes) > 50)

# EOF
