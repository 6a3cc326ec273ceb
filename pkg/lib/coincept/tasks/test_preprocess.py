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

from coincept.errors import InvalidArgumentError
from coincept.tasks import preprocess as pp


def test_zscore():
    x = np.array([[1.0, 5.0], [3.0, 5.0], [5.0, 5.0]])
    stats = pp.fitZscore(x)
    np.testing.assert_allclose(stats.mean, [3.0, 5.0])
    z = pp.zscore(x, stats)
    np.testing.assert_allclose(z[:, 0], [-1.224744871391589, 0.0, 1.224744871391589])
    # constant feature is only centered
    np.testing.assert_array_equal(z[:, 1], [0.0, 0.0, 0.0])


def test_fit_over_list():
    stats = pp.fitZscore([np.array([0.0, 2.0]), np.array([4.0])])
    assert stats.mean[0] == pytest.approx(2.0)
    assert stats.std[0] == pytest.approx(np.std([0.0, 2.0, 4.0]))
    with pytest.raises(InvalidArgumentError):
        pp.fitZscore([])


def test_zscore_feature_mismatch():
    stats = pp.fitZscore(np.zeros((4, 2)))
    with pytest.raises(InvalidArgumentError):
        pp.zscore(np.zeros((4, 3)), stats)


def test_difference():
    x = np.array([1.0, 4.0, 9.0, 16.0])
    np.testing.assert_array_equal(pp.difference(x, 1)[:, 0], [3.0, 5.0, 7.0])
    np.testing.assert_array_equal(pp.difference(x, 2)[:, 0], [2.0, 2.0])
    np.testing.assert_array_equal(pp.difference(x, 0)[:, 0], x)
    with pytest.raises(InvalidArgumentError):
        pp.difference(x, 4)
    with pytest.raises(InvalidArgumentError):
        pp.difference(x, -1)


def test_as_series():
    assert pp.asSeries([1, 2, 3]).shape == (3, 1)
    with pytest.raises(InvalidArgumentError):
        pp.asSeries(np.zeros((2, 2, 2)))

# EOF
