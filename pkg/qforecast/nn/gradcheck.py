"""
Finite difference checks for analytic gradients.

These functions compare the gradients produced by a backward pass with central
differences of the loss.  They are slow (two loss evaluations per parameter) and are
meant for small networks in tests.

:author:  qforecast developers
:version: October 17, 2026
"""
import numpy as np


def numerical_gradient(loss_fn, bundle, step=1e-6):
    """
    Returns the central-difference gradient of ``loss_fn`` for every parameter.

    The function ``loss_fn`` takes no arguments and reads the parameters from the
    arrays in ``bundle``.  Every parameter is restored after it is perturbed.

    :param loss_fn: The loss as a function of the current parameters
    :type loss_fn:  callable

    :param bundle: The parameters to perturb
    :type bundle:  :class:`~qforecast.nn.optim.ParameterBundle`

    :param step: The finite difference step
    :type step:  ``float``

    :return: The gradient, flattened in bundle order
    :rtype:  ``numpy.ndarray``
    """
    result = []
    for name, param, grad in bundle:
        flat = param.reshape(-1)
        for pos in range(flat.size):
            original = flat[pos]
            flat[pos] = original + step
            plus = loss_fn()
            flat[pos] = original - step
            minus = loss_fn()
            flat[pos] = original
            result.append((plus - minus) / (2 * step))
    return np.array(result)


def relative_error(analytic, numeric, floor=1e-8):
    """
    Returns the largest elementwise relative error between two gradients.

    The error of each element is |a-n| / max(|a|, |n|, floor), so entries where both
    gradients are tiny are compared absolutely.

    :param analytic: The gradient from backpropagation
    :type analytic:  ``numpy.ndarray``

    :param numeric: The gradient from finite differences
    :type numeric:  ``numpy.ndarray``

    :param floor: The smallest denominator
    :type floor:  ``float``

    :return: The worst relative error
    :rtype:  ``float``
    """
    analytic = np.asarray(analytic, dtype=float).ravel()
    numeric = np.asarray(numeric, dtype=float).ravel()
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / scale)) if analytic.size else 0.0


def gradient_check(loss_fn, bundle, step=1e-6, floor=1e-6):
    """
    Returns the relative error between the gradient slots of ``bundle`` and central
    differences of ``loss_fn``.

    The gradient slots must already hold the analytic gradient of ``loss_fn`` at the
    current parameters.

    :param loss_fn: The loss as a function of the current parameters
    :type loss_fn:  callable

    :param bundle: The parameters with populated gradients
    :type bundle:  :class:`~qforecast.nn.optim.ParameterBundle`

    :param step: The finite difference step
    :type step:  ``float``

    :param floor: The smallest denominator of the relative error
    :type floor:  ``float``

    :return: The worst relative error
    :rtype:  ``float``
    """
    analytic = bundle.flat_grads()
    return relative_error(analytic, numerical_gradient(loss_fn, bundle, step), floor)
