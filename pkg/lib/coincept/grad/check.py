#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Finite-difference checks of tape gradients."""

import numpy as np

from coincept.grad.tape import Tape


def numericGrad(fn, arrays, index, h=1e-5):
    """Central differences of scalar ``fn(arrays)`` w.r.t. ``arrays[index]``."""
    base = [np.array(a, dtype=np.float64) for a in arrays]
    target = base[index]
    grad = np.zeros_like(target)
    it = np.nditer(target, flags=['multi_index'])
    for _ in it:
        pos = it.multi_index
        orig = target[pos]
        target[pos] = orig + h
        fp = fn(base)
        target[pos] = orig - h
        fm = fn(base)
        target[pos] = orig
        grad[pos] = (fp - fm) / (2.0 * h)
    return grad


def gradCheck(build, arrays, h=1e-5):
    """Largest relative error between tape and numeric gradients.

    ``build(tape, leaves)`` must return a scalar tensor. The error of one
    array is |a - n| / max(|a|, |n|, 1e-12) in Frobenius norm; the max over
    all arrays is returned. Runs at 64-bit.
    """
    arrays = [np.asarray(a, dtype=np.float64) for a in arrays]

    tape = Tape('float64')
    leaves = [tape.leaf(a, name='arg%u' % i) for i, a in enumerate(arrays)]
    tape.backward(build(tape, leaves))
    analytic = [leaf.grad for leaf in leaves]

    def evaluate(values):
        t = Tape('float64')
        return float(build(t, [t.leaf(v) for v in values]).data)

    worst = 0.0
    for i, a in enumerate(analytic):
        n = numericGrad(evaluate, arrays, i, h)
        scale = max(np.linalg.norm(a), np.linalg.norm(n), 1e-12)
        worst = max(worst, float(np.linalg.norm(a - n) / scale))
    return worst

# EOF
