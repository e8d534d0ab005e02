"""
Fully connected layers.

A layer computes activation(W x + b).  Inputs are either one vector or a batch with
one sample per row.  Every forward pass made with ``cache=True`` pushes its inputs on
a stack, and every backward pass pops the most recent entry.  So a layer applied at
several timesteps is differentiated by calling backward in reverse time order.

:author:  qforecast developers
:version: October 17, 2026
"""
import numpy as np

from .activations import get_activation
from .optim import ParameterBundle, glorot_uniform
from ..errors import UsageError, InternalError


class DenseLayer(object):
    """
    An instance is an affine map followed by an elementwise activation.

    :ivar weights: The (out_dim, in_dim) weight matrix
    :vartype weights: ``numpy.ndarray``

    :ivar biases: The out_dim bias vector
    :vartype biases: ``numpy.ndarray``

    :ivar grad_weights: The gradient slot for ``weights``
    :vartype grad_weights: ``numpy.ndarray``

    :ivar grad_biases: The gradient slot for ``biases``
    :vartype grad_biases: ``numpy.ndarray``
    """

    @property
    def in_dim(self):
        """
        The input width.

        **Invariant**: Value is an ``int`` >= 1.
        """
        return self.weights.shape[1]

    @property
    def out_dim(self):
        """
        The output width.

        **Invariant**: Value is an ``int`` >= 1.
        """
        return self.weights.shape[0]

    @property
    def activation(self):
        """
        The activation name.

        **Invariant**: Value is one of 'linear', 'tanh', 'sigmoid' or 'relu'.
        """
        return self._activation

    def __init__(self, weights, biases, activation='linear'):
        """
        Creates a layer from existing arrays (which are not copied).

        :param weights: The (out_dim, in_dim) weight matrix
        :type weights:  ``numpy.ndarray``

        :param biases: The out_dim bias vector
        :type biases:  ``numpy.ndarray``

        :param activation: The activation name
        :type activation:  ``str``
        """
        weights = np.asarray(weights, dtype=float)
        biases = np.asarray(biases, dtype=float)
        if weights.ndim != 2 or biases.shape != (weights.shape[0],):
            raise UsageError('weights %s and biases %s do not form a layer' % (repr(weights.shape), repr(biases.shape)))
        self._func, self._deriv = get_activation(activation)
        self._activation = activation
        self.weights = weights
        self.biases = biases
        self.grad_weights = np.zeros_like(weights)
        self.grad_biases = np.zeros_like(biases)
        self._stack = []

    @classmethod
    def create(cls, in_dim, out_dim, activation='linear', rng=None):
        """
        Creates a layer with Glorot-uniform weights and zero biases.

        If ``rng`` is None, the weights are zero too.

        :param in_dim: The input width
        :type in_dim:  ``int``

        :param out_dim: The output width
        :type out_dim:  ``int``

        :param activation: The activation name
        :type activation:  ``str``

        :param rng: The random generator to draw from
        :type rng:  ``numpy.random.Generator`` or ``None``

        :return: A new layer
        :rtype:  :class:`DenseLayer`
        """
        if rng is None:
            weights = np.zeros((out_dim, in_dim))
        else:
            weights = glorot_uniform(rng, out_dim, in_dim)
        return cls(weights, np.zeros(out_dim), activation)

    def __repr__(self):
        """
        :return: An unambiguous string representation of this layer.
        :rtype:  ``str``
        """
        return 'DenseLayer(%d -> %d, %s)' % (self.in_dim, self.out_dim, self._activation)

    def parameters(self):
        """
        :return: The weights and biases with their gradient slots
        :rtype:  :class:`ParameterBundle`
        """
        return ParameterBundle([('weights', self.weights, self.grad_weights),
                                ('biases', self.biases, self.grad_biases)])

    def clear_cache(self):
        """
        Discards every stored forward pass.
        """
        self._stack = []

    def forward(self, x, cache=True):
        """
        Returns activation(W x + b) for a vector or a batch of rows.

        :param x: The input, shape (in_dim,) or (batch, in_dim)
        :type x:  ``numpy.ndarray``

        :param cache: Whether to keep the activations for :meth:`backward`
        :type cache:  ``bool``

        :return: The output, shape (out_dim,) or (batch, out_dim)
        :rtype:  ``numpy.ndarray``
        """
        x = np.asarray(x, dtype=float)
        if x.ndim not in (1, 2) or x.shape[-1] != self.in_dim:
            raise UsageError('input of shape %s does not match in_dim %d' % (repr(x.shape), self.in_dim))
        z = x @ self.weights.T + self.biases
        a = self._func(z)
        if cache:
            self._stack.append((x, z, a))
        return a

    def backward(self, upstream):
        """
        Returns the gradient with respect to the input of the latest cached pass.

        The parameter gradients are added to the gradient slots.

        :param upstream: The loss gradient with respect to the output
        :type upstream:  ``numpy.ndarray``

        :return: The loss gradient with respect to the input
        :rtype:  ``numpy.ndarray``
        """
        if not self._stack:
            raise InternalError('%s has no forward pass to differentiate' % repr(self))
        x, z, a = self._stack.pop()
        upstream = np.asarray(upstream, dtype=float)
        if upstream.shape != a.shape:
            raise InternalError('upstream gradient %s does not match output %s' % (upstream.shape, a.shape))
        dz = upstream * self._deriv(z, a)
        if x.ndim == 1:
            self.grad_weights += np.outer(dz, x)
            self.grad_biases += dz
        else:
            self.grad_weights += dz.T @ x
            self.grad_biases += dz.sum(axis=0)
        return dz @ self.weights


def dense_forward(layer, x):
    """
    Returns the output of ``layer`` on ``x``, keeping the cache for backward.

    :param layer: The layer
    :type layer:  :class:`DenseLayer`

    :param x: The input vector (or batch of rows)
    :type x:  ``numpy.ndarray``

    :return: activation(W x + b)
    :rtype:  ``numpy.ndarray``
    """
    return layer.forward(x)


def dense_backward(layer, upstream):
    """
    Backpropagates through the latest cached pass of ``layer``.

    :param layer: The layer
    :type layer:  :class:`DenseLayer`

    :param upstream: The loss gradient with respect to the output
    :type upstream:  ``numpy.ndarray``

    :return: The loss gradient with respect to the input
    :rtype:  ``numpy.ndarray``
    """
    return layer.backward(upstream)
