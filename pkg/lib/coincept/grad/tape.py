#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Reverse-mode tape over dense numpy arrays.

A ``Tape`` records every primitive applied to tracked values in call order.
``backward`` walks the records in exact reverse order and sums the gradient
contributions of all consumers of a node. Values are read-only arrays, so a
node can be shared freely; only the tape itself is single-threaded.
"""

import logging

import numpy as np

from coincept.errors import InvalidArgumentError, NumericError

logger = logging.getLogger(__name__)

PRECISIONS = {
    'float32': np.float32,
    'float64': np.float64,
}


def resolveDtype(precision):
    """Map a precision name (or dtype) to a numpy float dtype."""
    if isinstance(precision, str):
        if precision not in PRECISIONS:
            raise InvalidArgumentError("unknown precision '%s' (expected one of %s)"
                                       % (precision, ", ".join(PRECISIONS)))
        return np.dtype(PRECISIONS[precision])
    dt = np.dtype(precision)
    if dt not in (np.dtype(np.float32), np.dtype(np.float64)):
        raise InvalidArgumentError("unsupported dtype %s" % dt)
    return dt


class Tensor:
    """Array value living on a tape."""

    __slots__ = ('tape', 'data', 'index', 'name', 'requiresGrad', 'tracked', 'grad')

    def __init__(self, tape, data, index, name=None, requiresGrad=False, tracked=False):
        self.tape = tape
        self.data = data
        self.index = index
        self.name = name
        self.requiresGrad = requiresGrad
        self.tracked = tracked
        self.grad = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    def item(self):
        return float(self.data)

    def numpy(self):
        return self.data

    def __repr__(self):
        return "Tensor(shape=%s, name=%s)" % (self.shape, self.name)

    # arithmetic sugar, scalar operands only besides same-shape tensors
    def __add__(self, other):
        from coincept.grad import ops
        return ops.add(self, other)

    def __radd__(self, other):
        from coincept.grad import ops
        return ops.add(self, other)

    def __sub__(self, other):
        from coincept.grad import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from coincept.grad import ops
        return ops.add(ops.mul(self, -1.0), other)

    def __mul__(self, other):
        from coincept.grad import ops
        return ops.mul(self, other)

    def __rmul__(self, other):
        from coincept.grad import ops
        return ops.mul(self, other)

    def __truediv__(self, other):
        from coincept.grad import ops
        if isinstance(other, Tensor):
            raise InvalidArgumentError("division by a tensor is not supported")
        return ops.mul(self, 1.0 / other)

    def __neg__(self):
        from coincept.grad import ops
        return ops.mul(self, -1.0)


class Tape:
    """Recording of primitive ops for one forward/backward pass."""

    def __init__(self, precision='float64'):
        self.dtype = resolveDtype(precision)
        self.nodes = []     # every tensor, creation order
        self.records = []   # (out index, parent indices, vjp)

    def __len__(self):
        return len(self.records)

    def _push(self, data, name=None, requiresGrad=False, tracked=False, owned=False):
        # caller arrays are copied so freezing them stays local
        data = np.asarray(data, dtype=self.dtype) if owned else \
            np.array(data, dtype=self.dtype, copy=True)
        if not np.all(np.isfinite(data)):
            raise NumericError("non-finite value in %s" % (name or "array"))
        data.flags.writeable = False
        t = Tensor(self, data, len(self.nodes), name, requiresGrad, tracked)
        self.nodes.append(t)
        return t

    def leaf(self, value, name=None):
        """Register a differentiable input (parameter or probed input)."""
        return self._push(value, name=name, requiresGrad=True, tracked=True)

    def constant(self, value, name=None):
        """Register a value that never receives a gradient."""
        return self._push(value, name=name)

    def record(self, data, parents, vjp, name=None):
        """Push the output of a primitive.

        ``vjp`` maps the output gradient to one gradient (or None) per parent.
        Outputs of ops on constants only are constants and are not recorded.
        """
        tracked = any(p.tracked for p in parents)
        out = self._push(data, name=name, tracked=tracked, owned=True)
        if tracked:
            self.records.append((out.index, tuple(p.index for p in parents), vjp))
        return out

    def backward(self, root):
        """Fill ``grad`` of every leaf with d(root)/d(leaf)."""
        if root.tape is not self:
            raise InvalidArgumentError("root tensor belongs to another tape")
        if root.data.ndim != 0:
            raise InvalidArgumentError("backward needs a scalar root, got shape %s"
                                       % (root.shape,))

        grads = [None] * len(self.nodes)
        grads[root.index] = np.ones((), dtype=self.dtype)
        for outIdx, parentIdx, vjp in reversed(self.records):
            g = grads[outIdx]
            if g is None:
                continue
            for p, gp in zip(parentIdx, vjp(g)):
                if gp is None or not self.nodes[p].tracked:
                    continue
                gp = np.asarray(gp, dtype=self.dtype)
                grads[p] = gp if grads[p] is None else grads[p] + gp

        for node in self.nodes:
            if node.requiresGrad:
                g = grads[node.index]
                node.grad = np.zeros_like(node.data) if g is None else g
        logger.debug("backward over %u records", len(self.records))

    def gradients(self):
        """Leaf gradients by name (after ``backward``)."""
        return {n.name: n.grad for n in self.nodes if n.requiresGrad and n.name is not None}

# EOF
