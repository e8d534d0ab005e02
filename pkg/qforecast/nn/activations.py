"""
Activation functions for the dense layers.

Each activation is stored with its derivative.  The derivative is written in terms
of both the pre-activation ``z`` and the output ``a``, so that the layers can use
whichever is cheaper.

:author:  qforecast developers
:version: October 17, 2026
"""
import numpy as np
from scipy.special import expit

from ..errors import UsageError


def sigmoid(z):
    """
    Returns the logistic function of ``z``.

    :param z: The input
    :type z:  ``numpy.ndarray``

    :return: 1/(1+exp(-z)), computed without overflow
    :rtype:  ``numpy.ndarray``
    """
    return expit(z)


# name -> (function, derivative(z, a))
ACTIVATIONS = {
    'linear':  (lambda z: z, lambda z, a: np.ones_like(z)),
    'tanh':    (np.tanh, lambda z, a: 1.0 - a * a),
    'sigmoid': (sigmoid, lambda z, a: a * (1.0 - a)),
    'relu':    (lambda z: np.maximum(z, 0.0), lambda z, a: (z > 0).astype(float)),
}


def get_activation(name):
    """
    Returns the (function, derivative) pair for the activation ``name``.

    :param name: One of 'linear', 'tanh', 'sigmoid' or 'relu'
    :type name:  ``str``

    :return: The activation and its derivative
    :rtype:  ``tuple``
    """
    try:
        return ACTIVATIONS[name]
    except KeyError:
        raise UsageError('%s is not an activation; expected one of %s' % (repr(name), ', '.join(ACTIVATIONS)))
