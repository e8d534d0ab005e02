"""
Hybrid quantum-classical traffic flow forecasting

This package compares classical and hybrid quantum-classical regressors on the
one-step-ahead forecasting of a traffic flow series.  A pre-trained LSTM autoencoder
compresses every window of the series into N_q features; a classical layer or a
simulated N_q qubit variational circuit then maps those features to the next value.
Everything, including the quantum simulator and the gradients, is computed directly
in numpy.

Key features include, but are not limited to

* A statevector simulator with data re-uploading circuits and parameter-shift gradients
* Dense layers, an LSTM cell and the Adam optimizer written from scratch
* Gap k-fold cross-validation for time series
* A command line tool with reproducible reports

:author:  qforecast developers
:version: October 17, 2026
"""
name = 'qforecast'
__version__ = '1.0.1'

from .errors import *
