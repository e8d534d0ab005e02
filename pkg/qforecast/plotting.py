"""
SVG figures of training curves and fold scores.

The figures need matplotlib, which is an optional dependency.  Without it every
function logs a warning and returns None, so reports are still written.  The SVG
output carries no date and a fixed hash salt, so the same data give the same bytes.

:author:  qforecast developers
:version: October 17, 2026
"""
import logging

import numpy as np

from .filetools import _prepare

logger = logging.getLogger(__name__)

_WARNED = []


def _pyplot():
    """
    Returns matplotlib.pyplot on the Agg backend, or None if it is missing. [INTERNAL]
    """
    try:
        import matplotlib
        matplotlib.use('Agg')
        import matplotlib.pyplot as plt
    except ImportError:
        if not _WARNED:
            logger.warning('matplotlib is not installed; skipping plots')
            _WARNED.append(True)
        return None
    matplotlib.rcParams['svg.hashsalt'] = 'qforecast'
    matplotlib.rcParams['svg.fonttype'] = 'none'
    return plt


def available():
    """
    :return: True if figures can be drawn
    :rtype:  ``bool``
    """
    return _pyplot() is not None


def _save(plt, figure, filename):
    """
    Writes ``figure`` as SVG and closes it. [INTERNAL]
    """
    _prepare(filename)
    figure.savefig(filename, format='svg', metadata={'Date': None})
    plt.close(figure)
    return filename


def plot_loss_curves(history, label, filename):
    """
    Draws the cross-fold mean loss with its 1-sigma band.

    :param history: The training curves of one model
    :type history:  :class:`~qforecast.evaluation.ConvergenceHistory`

    :param label: The model label shown in the title
    :type label:  ``str``

    :param filename: The SVG file to write
    :type filename:  ``str``

    :return: The name of the file written, or None without matplotlib
    :rtype:  ``str`` or ``None``
    """
    plt = _pyplot()
    if plt is None:
        return None
    epochs = np.arange(1, history.epochs + 1)
    figure, axes = plt.subplots(figsize=(6, 4))
    for validation, name in ((False, 'train'), (True, 'validation')):
        mean = history.mean(validation)
        if mean is None:
            continue
        std = history.std(validation)
        axes.plot(epochs, mean, label=name)
        axes.fill_between(epochs, mean - std, mean + std, alpha=0.25)
    axes.set_xlabel('epoch')
    axes.set_ylabel('MSE (normalized)')
    axes.set_title(str(label))
    axes.legend()
    return _save(plt, figure, filename)


def plot_boxplot(reports, filename, metric='mse'):
    """
    Draws one box per model of a normalized metric across folds.

    :param reports: The scores of each model, in display order
    :type reports:  ``list`` of :class:`~qforecast.evaluation.MetricsReport`

    :param filename: The SVG file to write
    :type filename:  ``str``

    :param metric: The metric to draw
    :type metric:  ``str``

    :return: The name of the file written, or None without matplotlib
    :rtype:  ``str`` or ``None``
    """
    plt = _pyplot()
    if plt is None:
        return None
    data = [[value for value in report.values(metric) if value is not None] for report in reports]
    figure, axes = plt.subplots(figsize=(max(6, len(reports)), 4))
    axes.boxplot(data, whis=1.5)
    axes.set_xticks(range(1, len(reports) + 1))
    axes.set_xticklabels([report.label for report in reports], rotation=45, ha='right')
    axes.set_ylabel(metric.upper())
    figure.tight_layout()
    return _save(plt, figure, filename)


def plot_consistency(table, filename):
    """
    Draws each model's normalized fold scores against fold index.

    :param table: Consistency results keyed by model label
    :type table:  ``dict``

    :param filename: The SVG file to write
    :type filename:  ``str``

    :return: The name of the file written, or None without matplotlib
    :rtype:  ``str`` or ``None``
    """
    plt = _pyplot()
    if plt is None:
        return None
    figure, axes = plt.subplots(figsize=(6, 4))
    for label in sorted(table):
        entry = table[label].get('mse')
        if entry:
            axes.plot(range(len(entry['normalized'])), entry['normalized'], marker='o', label=label)
    axes.axhline(1.0, color='grey', linewidth=0.5)
    axes.set_xlabel('fold')
    axes.set_ylabel('MSE / mean MSE')
    if table:
        axes.legend(fontsize='small')
    return _save(plt, figure, filename)
