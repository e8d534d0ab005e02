"""
The mean squared error loss.

:author:  qforecast developers
:version: October 17, 2026
"""
import numpy as np

from ..errors import UsageError


def _pair(pred, target):
    """
    Returns the predictions and targets as float arrays of equal shape. [INTERNAL]
    """
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    if pred.shape != target.shape:
        raise UsageError('predictions %s and targets %s differ in shape' % (repr(pred.shape), repr(target.shape)))
    if pred.size == 0:
        raise UsageError('the loss of an empty batch is undefined')
    return pred, target


def mse_loss(pred, target):
    """
    Returns the mean of the squared residuals.

    :param pred: The predictions
    :type pred:  ``numpy.ndarray``

    :param target: The targets, same shape as ``pred``
    :type target:  ``numpy.ndarray``

    :return: mean((pred-target)^2)
    :rtype:  ``float``
    """
    pred, target = _pair(pred, target)
    return float(np.mean((pred - target) ** 2))


def mse_loss_and_grad(pred, target):
    """
    Returns the mean squared error and its gradient with respect to ``pred``.

    The gradient is 2(pred-target)/n where n counts every element, so batch
    gradients are averages, not sums.

    :param pred: The predictions
    :type pred:  ``numpy.ndarray``

    :param target: The targets, same shape as ``pred``
    :type target:  ``numpy.ndarray``

    :return: The loss and the gradient
    :rtype:  ``tuple``
    """
    pred, target = _pair(pred, target)
    residual = pred - target
    return float(np.mean(residual ** 2)), 2.0 * residual / residual.size
