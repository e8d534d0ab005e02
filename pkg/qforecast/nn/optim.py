"""
Parameter bundles, initializers and the Adam optimizer.

A :class:`ParameterBundle` is an ordered list of named parameter arrays, each with a
gradient slot of the same shape.  Layers hand out bundles that share their arrays,
so an optimizer step updates the layers in place.  The bundle order is also the
block order of a checkpoint.

:author:  qforecast developers
:version: October 17, 2026
"""
import math

import numpy as np

from ..errors import UsageError, InternalError


def glorot_uniform(rng, fan_out, fan_in):
    """
    Returns a (fan_out, fan_in) matrix drawn uniformly from [-a, a].

    The bound is a = sqrt(6/(fan_in+fan_out)).

    :param rng: The random generator to draw from
    :type rng:  ``numpy.random.Generator``

    :param fan_out: The number of rows
    :type fan_out:  ``int``

    :param fan_in: The number of columns
    :type fan_in:  ``int``

    :return: The initialized matrix
    :rtype:  ``numpy.ndarray``
    """
    bound = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_out, fan_in))


class ParameterBundle(object):
    """
    An instance is an ordered collection of named parameters and their gradients.

    Entries are (name, parameter, gradient) triples.  The arrays are shared, not
    copied: updating a parameter here updates the layer that owns it.
    """

    def __init__(self, entries=()):
        """
        Creates a bundle from (name, parameter, gradient) triples.

        :param entries: The initial entries
        :type entries:  iterable of ``tuple``
        """
        self._entries = []
        for name, param, grad in entries:
            self.add(name, param, grad)

    def add(self, name, param, grad):
        """
        Appends a named parameter block.

        :param name: The block name (unique within the bundle)
        :type name:  ``str``

        :param param: The parameter array
        :type param:  ``numpy.ndarray``

        :param grad: The gradient slot, same shape as ``param``
        :type grad:  ``numpy.ndarray``
        """
        if param.shape != grad.shape:
            raise InternalError('gradient slot %s has shape %s, not %s' % (name, grad.shape, param.shape))
        if name in self.names():
            raise UsageError('%s is already a parameter of this bundle' % repr(name))
        self._entries.append((name, param, grad))

    def extend(self, prefix, other):
        """
        Appends all the entries of ``other``, prefixing their names.

        :param prefix: The prefix, joined to each name with a dot
        :type prefix:  ``str``

        :param other: The bundle to append
        :type other:  :class:`ParameterBundle`
        """
        for name, param, grad in other:
            self.add(prefix + '.' + name, param, grad)

    def __iter__(self):
        """
        :return: An iterator over (name, parameter, gradient) triples
        """
        return iter(self._entries)

    def __len__(self):
        """
        :return: The number of parameter blocks
        :rtype:  ``int``
        """
        return len(self._entries)

    def names(self):
        """
        :return: The block names in order
        :rtype:  ``list`` of ``str``
        """
        return [entry[0] for entry in self._entries]

    def get(self, name):
        """
        Returns the parameter array named ``name``.

        :param name: The block name
        :type name:  ``str``

        :return: The parameter array
        :rtype:  ``numpy.ndarray``
        """
        for entry in self._entries:
            if entry[0] == name:
                return entry[1]
        raise UsageError('%s is not a parameter of this bundle' % repr(name))

    def grad(self, name):
        """
        Returns the gradient slot named ``name``.

        :param name: The block name
        :type name:  ``str``

        :return: The gradient array
        :rtype:  ``numpy.ndarray``
        """
        for entry in self._entries:
            if entry[0] == name:
                return entry[2]
        raise UsageError('%s is not a parameter of this bundle' % repr(name))

    def size(self):
        """
        :return: The total number of scalar parameters
        :rtype:  ``int``
        """
        return sum(entry[1].size for entry in self._entries)

    def zero_grad(self):
        """
        Resets every gradient slot to zero.
        """
        for entry in self._entries:
            entry[2][...] = 0.0

    def global_norm(self):
        """
        :return: The L2 norm of all gradients taken together
        :rtype:  ``float``
        """
        total = 0.0
        for entry in self._entries:
            total += float(np.sum(entry[2] * entry[2]))
        return math.sqrt(total)

    def flat_params(self):
        """
        :return: A copy of all parameters as one flat vector
        :rtype:  ``numpy.ndarray``
        """
        if not self._entries:
            return np.zeros(0)
        return np.concatenate([entry[1].ravel() for entry in self._entries])

    def flat_grads(self):
        """
        :return: A copy of all gradients as one flat vector
        :rtype:  ``numpy.ndarray``
        """
        if not self._entries:
            return np.zeros(0)
        return np.concatenate([entry[2].ravel() for entry in self._entries])

    def set_flat_params(self, values):
        """
        Writes a flat vector back into the parameter arrays, in place.

        :param values: The new parameters, of length :meth:`size`
        :type values:  ``numpy.ndarray``
        """
        values = np.asarray(values, dtype=float)
        if values.shape != (self.size(),):
            raise UsageError('%s values for a bundle of %d parameters' % (repr(values.shape), self.size()))
        pos = 0
        for entry in self._entries:
            count = entry[1].size
            entry[1][...] = values[pos:pos + count].reshape(entry[1].shape)
            pos += count


def clip_global_norm(bundle, max_norm=5.0):
    """
    Scales all gradients of ``bundle`` so their joint norm is at most ``max_norm``.

    :param bundle: The gradients to clip (modified in place)
    :type bundle:  :class:`ParameterBundle`

    :param max_norm: The largest norm allowed (None disables clipping)
    :type max_norm:  ``float`` or ``None``

    :return: The norm before clipping
    :rtype:  ``float``
    """
    norm = bundle.global_norm()
    if max_norm is not None and norm > max_norm:
        factor = max_norm / norm
        for name, param, grad in bundle:
            grad *= factor
    return norm


class AdamState(object):
    """
    An instance is the running state of an Adam optimizer.

    The moments are created on the first update, one pair per bundle entry.

    :ivar learning_rate: The step size
    :vartype learning_rate: ``float``

    :ivar beta1: The decay rate of the first moment
    :vartype beta1: ``float``

    :ivar beta2: The decay rate of the second moment
    :vartype beta2: ``float``

    :ivar epsilon: The denominator guard
    :vartype epsilon: ``float``

    :ivar t: The number of updates made so far
    :vartype t: ``int``
    """

    def __init__(self, learning_rate=0.0005, beta1=0.9, beta2=0.999, epsilon=1e-8):
        """
        Creates a fresh optimizer state.

        :param learning_rate: The step size
        :type learning_rate:  ``float`` > 0
        """
        if not learning_rate > 0:
            raise UsageError('%s is not a positive learning rate' % repr(learning_rate))
        self.learning_rate = float(learning_rate)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.epsilon = float(epsilon)
        self.t = 0
        self.m = None
        self.v = None


def adam_update(state, params):
    """
    Applies one Adam step to every parameter of ``params``.

    Parameters are updated in place with bias-corrected moments.  The step counter
    increases by one on every call, even if all gradients are zero.

    :param state: The optimizer state (modified in place)
    :type state:  :class:`AdamState`

    :param params: The parameters with populated gradients
    :type params:  :class:`ParameterBundle`

    :return: The bundle and the state
    :rtype:  ``tuple``
    """
    if state.m is None:
        state.m = [np.zeros_like(param) for name, param, grad in params]
        state.v = [np.zeros_like(param) for name, param, grad in params]
    elif len(state.m) != len(params):
        raise InternalError('optimizer state holds %d blocks, bundle has %d' % (len(state.m), len(params)))

    state.t += 1
    correct1 = 1.0 - state.beta1 ** state.t
    correct2 = 1.0 - state.beta2 ** state.t
    for pos, (name, param, grad) in enumerate(params):
        m = state.m[pos]
        v = state.v[pos]
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * (grad * grad)
        param -= state.learning_rate * (m / correct1) / (np.sqrt(v / correct2) + state.epsilon)
    return params, state
