"""
A small classical learning core written directly in numpy.

This package has dense layers, an LSTM cell with backpropagation through time, the
mean squared error loss and the Adam optimizer.  Everything runs in double precision.

:author:  qforecast developers
:version: October 17, 2026
"""
from .activations import sigmoid, get_activation
from .dense import DenseLayer, dense_forward, dense_backward
from .lstm import LstmCell, lstm_step, lstm_forward, lstm_backward_through_time
from .loss import mse_loss, mse_loss_and_grad
from .optim import ParameterBundle, AdamState, adam_update, clip_global_norm, glorot_uniform
from .gradcheck import numerical_gradient, relative_error, gradient_check
