"""
Unit test for the figures

The drawing tests are skipped when matplotlib is not installed.

:author:  qforecast developers
:version: October 17, 2026
"""
import os.path
import shutil
import tempfile
import unittest

from qforecast import filetools, plotting
from qforecast.evaluation import ConvergenceHistory, Metrics, MetricsReport, consistency_check


def make_report(label, scale):
    """
    Returns a three fold report with scores proportional to ``scale``.
    """
    folds = [Metrics(scale * value, scale * value, 1 - scale * value) for value in (0.01, 0.02, 0.03)]
    return MetricsReport(label, folds, folds)


class PlottingTest(unittest.TestCase):
    """
    Unit test for the plotting module
    """

    def setUp(self):
        """
        Creates a scratch folder
        """
        self.folder = tempfile.mkdtemp()

    def tearDown(self):
        """
        Removes the scratch folder
        """
        shutil.rmtree(self.folder, ignore_errors=True)

    @unittest.skipUnless(plotting.available(), 'matplotlib is not installed')
    def test01_figures(self):
        """
        Tests that each figure is written as SVG.
        """
        history = ConvergenceHistory([[0.5, 0.2, 0.1], [0.6, 0.3, 0.1]], [[0.6, 0.3, 0.2], [0.7, 0.3, 0.2]])
        filename = plotting.plot_loss_curves(history, 'A-hybrid-Q4', os.path.join(self.folder, 'loss.svg'))
        self.assertTrue(filetools.read_txt(filename).lstrip().startswith('<?xml'))

        reports = [make_report('A-classic-Q4', 1.0), make_report('A-hybrid-Q4', 2.0)]
        filename = plotting.plot_boxplot(reports, os.path.join(self.folder, 'figures', 'box.svg'))
        self.assertTrue(os.path.isfile(filename))

        table = {report.label: consistency_check(report) for report in reports}
        filename = plotting.plot_consistency(table, os.path.join(self.folder, 'consistency.svg'))
        first = filetools.file_checksum(filename)
        plotting.plot_consistency(table, filename)
        self.assertEqual(filetools.file_checksum(filename), first)

    @unittest.skipIf(plotting.available(), 'matplotlib is installed')
    def test02_missing(self):
        """
        Tests that figures are skipped without matplotlib.
        """
        history = ConvergenceHistory([[0.5, 0.2]])
        self.assertIsNone(plotting.plot_loss_curves(history, 'A-classic-Q2', os.path.join(self.folder, 'x.svg')))
        self.assertFalse(os.path.exists(os.path.join(self.folder, 'x.svg')))


if __name__ == '__main__':
    unittest.main()
