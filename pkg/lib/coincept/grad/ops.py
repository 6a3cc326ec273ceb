#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for the differentiable primitives of the encoder and the losses.

Every op takes ``Tensor`` arguments living on one tape, computes its value
with numpy and records a vector-Jacobian product closure. There is no
general broadcasting: binary ops accept a tensor of the same shape, a
Python scalar, or a constant array of the same shape.
"""

import math
import numbers

import numpy as np

from coincept.errors import InvalidArgumentError
from coincept.grad.tape import Tensor


def samePadding(kernel, dilation=1):
    """(left, right) zero padding keeping the time length, left-biased."""
    span = dilation * (kernel - 1)
    return (span + 1) // 2, span // 2


def _checkTensor(x, name='input'):
    if not isinstance(x, Tensor):
        raise InvalidArgumentError("%s must be a Tensor, got %s" % (name, type(x).__name__))


def _operand(a, other):
    """Normalize the second operand of a binary op.

    Returns (tensor or None, constant array or None).
    """
    if isinstance(other, Tensor):
        if other.tape is not a.tape:
            raise InvalidArgumentError("operands live on different tapes")
        if other.shape != a.shape:
            raise InvalidArgumentError("shape mismatch %s vs %s" % (a.shape, other.shape))
        return other, None
    if isinstance(other, numbers.Number):
        return None, np.asarray(other, dtype=a.tape.dtype)
    other = np.asarray(other, dtype=a.tape.dtype)
    if other.shape != a.shape:
        raise InvalidArgumentError("shape mismatch %s vs %s" % (a.shape, other.shape))
    return None, other


##
## linear algebra
##

def conv1d(x, w, b=None, dilation=1, padding='same'):
    """Dilated 1D convolution, x is B x C x T, w is O x C x k."""
    _checkTensor(x)
    _checkTensor(w, 'weight')
    if x.ndim != 3 or w.ndim != 3:
        raise InvalidArgumentError("conv1d expects 3-d input and weight, got %s and %s"
                                   % (x.shape, w.shape))
    nB, nC, nT = x.shape
    nO, nCw, k = w.shape
    if nC != nCw:
        raise InvalidArgumentError("conv1d channel mismatch: input %u, weight %u" % (nC, nCw))
    if b is not None and b.shape != (nO,):
        raise InvalidArgumentError("conv1d bias shape %s, expected (%u,)" % (b.shape, nO))
    if dilation < 1 or k < 1:
        raise InvalidArgumentError("conv1d needs kernel >= 1 and dilation >= 1")
    if padding == 'same':
        left, right = samePadding(k, dilation)
    else:
        left, right = padding
    span = dilation * (k - 1) + 1
    if span > nT + left + right:
        raise InvalidArgumentError("conv1d span %u exceeds padded length %u"
                                   % (span, nT + left + right))
    tOut = nT + left + right - span + 1

    xp = np.pad(x.data, ((0, 0), (0, 0), (left, right)))
    cols = np.stack([xp[:, :, j * dilation:j * dilation + tOut] for j in range(k)], axis=2)
    y = np.einsum('bckt,ock->bot', cols, w.data, optimize=True)
    if b is not None:
        y = y + b.data[None, :, None]

    def vjp(g):
        gw = np.einsum('bot,bckt->ock', g, cols, optimize=True)
        gcols = np.einsum('bot,ock->bckt', g, w.data, optimize=True)
        gxp = np.zeros_like(xp)
        for j in range(k):
            gxp[:, :, j * dilation:j * dilation + tOut] += gcols[:, :, j, :]
        grads = [gxp[:, :, left:left + nT], gw]
        if b is not None:
            grads.append(g.sum(axis=(0, 2)))
        return grads

    parents = (x, w) if b is None else (x, w, b)
    return x.tape.record(y, parents, vjp)


def linear(x, w, b=None):
    """Affine map over the last axis, x is ... x F, w is F x G."""
    _checkTensor(x)
    _checkTensor(w, 'weight')
    if w.ndim != 2 or x.shape[-1] != w.shape[0]:
        raise InvalidArgumentError("linear shape mismatch: input %s, weight %s" % (x.shape, w.shape))
    nF, nG = w.shape
    if b is not None and b.shape != (nG,):
        raise InvalidArgumentError("linear bias shape %s, expected (%u,)" % (b.shape, nG))

    y = x.data @ w.data
    if b is not None:
        y = y + b.data

    def vjp(g):
        g2 = g.reshape(-1, nG)
        grads = [g @ w.data.T, x.data.reshape(-1, nF).T @ g2]
        if b is not None:
            grads.append(g2.sum(axis=0))
        return grads

    parents = (x, w) if b is None else (x, w, b)
    return x.tape.record(y, parents, vjp)


def matmul(a, b):
    """Batched product of G x n x m and G x m x p tensors."""
    _checkTensor(a)
    _checkTensor(b)
    if a.ndim != 3 or b.ndim != 3 or a.shape[0] != b.shape[0] or a.shape[2] != b.shape[1]:
        raise InvalidArgumentError("matmul shape mismatch %s @ %s" % (a.shape, b.shape))

    y = a.data @ b.data

    def vjp(g):
        return [g @ b.data.swapaxes(1, 2), a.data.swapaxes(1, 2) @ g]

    return a.tape.record(y, (a, b), vjp)


##
## nonlinearities and pooling
##

def leakyRelu(x, slope=0.01):
    _checkTensor(x)
    if not 0.0 < slope < 1.0:
        raise InvalidArgumentError("leaky slope must be in (0,1), got %g" % slope)
    pos = x.data >= 0
    y = np.where(pos, x.data, slope * x.data)

    def vjp(g):
        return [np.where(pos, g, slope * g)]

    return x.tape.record(y, (x,), vjp)


def maxpool1d(x, kernel=2, stride=2, padding='halving'):
    """Max pooling over the last axis of a B x C x T tensor.

    ``halving`` gives ceil(T/stride) outputs, a trailing short window passes
    its elements through. ``same`` needs stride 1 and keeps T. The gradient
    goes to the first maximum of each window.
    """
    _checkTensor(x)
    if x.ndim != 3:
        raise InvalidArgumentError("maxpool1d expects B x C x T, got %s" % (x.shape,))
    if kernel < 1 or stride < 1:
        raise InvalidArgumentError("maxpool1d needs kernel >= 1 and stride >= 1")
    nT = x.shape[2]
    if nT == 0:
        raise InvalidArgumentError("maxpool1d on an empty time axis")
    if padding == 'halving':
        tOut = math.ceil(nT / stride)
        left = 0
        right = max(0, (tOut - 1) * stride + kernel - nT)
    elif padding == 'same':
        if stride != 1:
            raise InvalidArgumentError("same pooling needs stride 1")
        tOut = nT
        left, right = samePadding(kernel)
    else:
        raise InvalidArgumentError("unknown pooling padding '%s'" % padding)

    xp = np.pad(x.data, ((0, 0), (0, 0), (left, right)), constant_values=-np.inf)
    stop = (tOut - 1) * stride + 1
    win = np.stack([xp[:, :, j:j + stop:stride] for j in range(kernel)], axis=2)
    am = np.argmax(win, axis=2)
    y = np.take_along_axis(win, am[:, :, None, :], axis=2)[:, :, 0, :]

    def vjp(g):
        gxp = np.zeros(xp.shape, dtype=g.dtype)
        for j in range(kernel):
            gxp[:, :, j:j + stop:stride] += np.where(am == j, g, 0.0)
        return [gxp[:, :, left:left + nT]]

    return x.tape.record(y, (x,), vjp)


def hinge(x):
    """max(0, x), on tensors or plain floats."""
    if not isinstance(x, Tensor):
        return max(0.0, float(x))
    pos = x.data > 0
    y = np.where(pos, x.data, 0.0)

    def vjp(g):
        return [np.where(pos, g, 0.0)]

    return x.tape.record(y, (x,), vjp)


def maskedLogSumExp(x, mask, axis=-1):
    """log(sum(exp(x))) over the entries where ``mask`` is true.

    Shifted by the maximum of the kept entries. Every reduced row must keep
    at least one entry.
    """
    _checkTensor(x)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != x.shape:
        raise InvalidArgumentError("mask shape %s, expected %s" % (mask.shape, x.shape))
    if not np.all(mask.any(axis=axis)):
        raise InvalidArgumentError("log-sum-exp over an empty set")

    m = np.max(np.where(mask, x.data, -np.inf), axis=axis, keepdims=True)
    e = np.where(mask, np.exp(np.where(mask, x.data, m) - m), 0.0)
    s = e.sum(axis=axis, keepdims=True)
    y = np.squeeze(np.log(s) + m, axis=axis)
    p = e / s

    def vjp(g):
        return [np.expand_dims(g, axis) * p]

    return x.tape.record(y, (x,), vjp)


##
## shape manipulation
##

def transpose(x, axes):
    _checkTensor(x)
    axes = tuple(axes)
    inv = tuple(np.argsort(axes))
    y = np.transpose(x.data, axes)

    def vjp(g):
        return [np.transpose(g, inv)]

    return x.tape.record(y, (x,), vjp)


def concat(xs, axis=0):
    if not xs:
        raise InvalidArgumentError("concat of nothing")
    for x in xs:
        _checkTensor(x)
    sizes = [x.shape[axis] for x in xs]
    y = np.concatenate([x.data for x in xs], axis=axis)
    cuts = np.cumsum(sizes)[:-1]

    def vjp(g):
        return np.split(g, cuts, axis=axis)

    return xs[0].tape.record(y, tuple(xs), vjp)


def crop(x, axis, start, stop):
    """x[..., start:stop, ...] along ``axis``."""
    _checkTensor(x)
    n = x.shape[axis]
    if not 0 <= start < stop <= n:
        raise InvalidArgumentError("crop [%d,%d) outside axis of length %u" % (start, stop, n))
    sl = [slice(None)] * x.ndim
    sl[axis] = slice(start, stop)
    sl = tuple(sl)
    y = x.data[sl]

    def vjp(g):
        gx = np.zeros(x.shape, dtype=g.dtype)
        gx[sl] = g
        return [gx]

    return x.tape.record(y, (x,), vjp)


##
## elementwise arithmetic and reductions
##

def add(a, b):
    if not isinstance(a, Tensor):
        a, b = b, a
    _checkTensor(a)
    t, c = _operand(a, b)
    if t is None:
        return a.tape.record(a.data + c, (a,), lambda g: [g])
    return a.tape.record(a.data + t.data, (a, t), lambda g: [g, g])


def sub(a, b):
    _checkTensor(a)
    t, c = _operand(a, b)
    if t is None:
        return a.tape.record(a.data - c, (a,), lambda g: [g])
    return a.tape.record(a.data - t.data, (a, t), lambda g: [g, -g])


def mul(a, b):
    if not isinstance(a, Tensor):
        a, b = b, a
    _checkTensor(a)
    t, c = _operand(a, b)
    if t is None:
        return a.tape.record(a.data * c, (a,), lambda g: [g * c])
    ad, bd = a.data, t.data
    return a.tape.record(ad * bd, (a, t), lambda g: [g * bd, g * ad])


def sumAll(x, axis=None):
    """Sum over ``axis`` (an int) or over everything."""
    _checkTensor(x)
    y = np.sum(x.data, axis=axis)
    shape = x.shape

    def vjp(g):
        if axis is not None:
            g = np.expand_dims(g, axis)
        return [np.broadcast_to(g, shape).copy()]

    return x.tape.record(y, (x,), vjp)


def mean(x, axis=None):
    _checkTensor(x)
    n = x.data.size if axis is None else x.shape[axis]
    return mul(sumAll(x, axis), 1.0 / n)

# EOF
