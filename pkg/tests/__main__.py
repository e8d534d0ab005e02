"""
Unit tests for the qforecast package

Run them with ``python -m tests`` from the project folder.  The slow acceptance
experiment in test_cli only runs when QFORECAST_ACCEPTANCE=1.

:author:  qforecast developers
:version: October 17, 2026
"""
import importlib
import unittest


def suite():
    """
    Creates the test suite for all modules, from the simulator up to the command line
    """
    modules  = ( 'test_qsim', 'test_nn', 'test_filetools', 'test_checkpoint', 'test_data',
                 'test_autoencoder', 'test_models', 'test_evaluation', 'test_config',
                 'test_plotting', 'test_cli' )
    alltests = unittest.TestSuite()
    for module in modules:
        alltests.addTest(unittest.findTestCases(importlib.import_module('tests.' + module)))
    return alltests


if __name__ == '__main__':
    unittest.main(defaultTest='suite')
