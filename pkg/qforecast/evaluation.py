"""
Gap k-fold cross-validation, regression metrics and the fold consistency check.

The series is cut into k contiguous test folds.  Around each test fold a gap of
discarded samples is dropped on every side that does not touch the edge of the
series.  The validation slice sits immediately before the leading gap, wrapping to
the end of the series when the test fold is at the start.  Everything else is
training data, before or after the test fold.

Scores are computed on normalized values and also, for interpretability, on the
original vehicles-per-hour scale.

:author:  qforecast developers
:version: October 17, 2026
"""
import logging
import math
import time
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import stats

from .autoencoder import AutoencoderCache, encode_many, train_autoencoder
from .data import contiguous_runs, fit_normalizer, windows_from_indices
from .errors import ConfigurationError, UsageError
from .models import ModelLabel, build_model, convergence_epoch, train_regressor

logger = logging.getLogger(__name__)

METRICS = ('mse', 'mae', 'r2')


def _runs(indices):
    """
    Returns sorted indices as a list of inclusive [first, last] ranges. [INTERNAL]
    """
    return [[int(run[0]), int(run[-1])] for run in contiguous_runs(np.sort(indices))]


def _expand(ranges):
    """
    Returns the indices covered by inclusive [first, last] ranges. [INTERNAL]
    """
    if not ranges:
        return np.zeros(0, dtype=int)
    return np.concatenate([np.arange(first, last + 1) for first, last in ranges])


@dataclass
class Fold:
    """
    The index sets of one fold.

    ``test`` is a contiguous range.  ``validation`` is listed in time order, which
    may wrap past the end of the series.  ``train`` is sorted.
    """
    index: int
    test: np.ndarray
    validation: np.ndarray
    train: np.ndarray
    gap_before: np.ndarray
    gap_after: np.ndarray

    def to_dict(self):
        """
        :return: The fold with every index set written as inclusive ranges
        :rtype:  ``dict``
        """
        return {'fold': self.index, 'test': _runs(self.test), 'validation': _runs(self.validation),
                'train': _runs(self.train), 'gap_before': _runs(self.gap_before),
                'gap_after': _runs(self.gap_after)}

    @classmethod
    def from_dict(cls, data):
        """
        :return: The fold written by :meth:`to_dict`
        :rtype:  :class:`Fold`
        """
        validation = _expand(data['validation'])
        if len(data['validation']) == 2 and data['validation'][0][0] == 0:
            # A wrapped slice: the tail of the series comes first
            first, second = data['validation']
            validation = np.concatenate([np.arange(second[0], second[1] + 1), np.arange(first[0], first[1] + 1)])
        return cls(data['fold'], _expand(data['test']), validation, _expand(data['train']),
                   _expand(data['gap_before']), _expand(data['gap_after']))


@dataclass
class FoldPlan:
    """
    A complete gap k-fold plan for a series of ``n`` samples.
    """
    n: int
    k: int
    gap_size: int
    val_fraction: float
    folds: list

    def to_dict(self):
        """
        :return: The plan as a JSON-ready dictionary
        :rtype:  ``dict``
        """
        return {'n': self.n, 'k': self.k, 'gap_size': self.gap_size, 'val_fraction': self.val_fraction,
                'folds': [fold.to_dict() for fold in self.folds]}

    @classmethod
    def from_dict(cls, data):
        """
        :return: The plan written by :meth:`to_dict`
        :rtype:  :class:`FoldPlan`
        """
        return cls(data['n'], data['k'], data['gap_size'], data['val_fraction'],
                   [Fold.from_dict(item) for item in data['folds']])


def gap_kfold_split(n, k=5, gap_size=960, val_fraction=0.1):
    """
    Returns the gap k-fold plan for a series of ``n`` samples.

    Test fold f is the f-th of k near-equal contiguous chunks (the first n mod k
    chunks are one longer).  A gap of ``gap_size`` samples is discarded on each side of
    the test fold that does not touch the series edge.  The validation slice holds
    ceil(val_fraction*n) samples ending just before the leading gap; for the first
    fold it wraps to the end of the series.  The remaining samples are training data.

    :param n: The series length
    :type n:  ``int``

    :param k: The number of folds
    :type k:  ``int`` >= 2

    :param gap_size: The samples discarded on each interior side
    :type gap_size:  ``int`` >= 0

    :param val_fraction: The validation share of the series
    :type val_fraction:  ``float`` in (0, 0.5)

    :return: The plan
    :rtype:  :class:`FoldPlan`
    """
    for name, value in (('series length', n), ('fold count', k), ('gap size', gap_size)):
        if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
            raise ConfigurationError('%s is not a valid %s' % (repr(value), name))
    if k < 2:
        raise ConfigurationError('%s is not a valid fold count' % repr(k))
    if gap_size < 0:
        raise ConfigurationError('%s is not a valid gap size' % repr(gap_size))
    if not 0 < val_fraction < 0.5:
        raise ConfigurationError('validation fraction %s is not in (0, 0.5)' % repr(val_fraction))
    if n < k:
        raise ConfigurationError('%d samples cannot make %d folds' % (n, k))

    n_val = int(math.ceil(val_fraction * n))
    folds = []
    for index, chunk in enumerate(np.array_split(np.arange(n), k)):
        start, stop = int(chunk[0]), int(chunk[-1]) + 1
        gap_before = np.arange(start - gap_size, start) if start > 0 else np.zeros(0, dtype=int)
        gap_after = np.arange(stop, stop + gap_size) if stop < n else np.zeros(0, dtype=int)
        if gap_before.size and gap_before[0] < 0 or gap_after.size and gap_after[-1] >= n:
            raise ConfigurationError('a gap of %d does not fit around fold %d of a %d sample series'
                                     % (gap_size, index, n))
        lead = start - gap_before.size
        validation = np.arange(lead - n_val, lead) % n

        used = np.zeros(n, dtype=int)
        for part in (chunk, gap_before, gap_after, validation):
            used[part] += 1
        if used.max() > 1:
            raise ConfigurationError('fold %d overlaps itself: %d samples are too few for gap %d and %d validation samples'
                                     % (index, n, gap_size, n_val))
        train = np.nonzero(used == 0)[0]
        if train.size == 0:
            raise ConfigurationError('fold %d has no training samples' % index)
        folds.append(Fold(index, chunk, validation, train, gap_before, gap_after))
    return FoldPlan(n, k, gap_size, float(val_fraction), folds)


def leakage_check(plan, w=20):
    """
    Returns the places where a series index feeds windows of two splits.

    Each split of each fold is windowed on its own, as the cross-validation does, and
    the source indices (inputs and targets) of the splits are intersected.

    :param plan: The fold plan
    :type plan:  :class:`FoldPlan`

    :param w: The window length
    :type w:  ``int``

    :return: (fold, first split, second split, shared count) for every violation
    :rtype:  ``list`` of ``tuple``
    """
    values = np.zeros(plan.n)
    result = []
    for fold in plan.folds:
        used = {name: windows_from_indices(values, getattr(fold, name), w).source_indices()
                for name in ('train', 'validation', 'test')}
        for first, second in (('train', 'validation'), ('train', 'test'), ('validation', 'test')):
            shared = np.intersect1d(used[first], used[second]).size
            if shared:
                result.append((fold.index, first, second, shared))
    return result


pass
# #mark -
# #mark Metrics

class Metrics(NamedTuple):
    """
    The regression scores of one prediction set.  ``r2`` is None for constant targets.
    """
    mse: float
    mae: float
    r2: Optional[float]


def compute_metrics(predictions, targets):
    """
    Returns the MSE, MAE and R^2 of ``predictions``.

    R^2 is 1 - SS_res/SS_tot with SS_tot taken about the mean of the targets.  If the
    targets are constant, R^2 is undefined and reported as None.

    :param predictions: The predicted values
    :type predictions:  ``numpy.ndarray``

    :param targets: The true values
    :type targets:  ``numpy.ndarray``

    :return: The scores
    :rtype:  :class:`Metrics`
    """
    predictions = np.asarray(predictions, dtype=float).ravel()
    targets = np.asarray(targets, dtype=float).ravel()
    if predictions.size != targets.size:
        raise UsageError('%d predictions for %d targets' % (predictions.size, targets.size))
    if targets.size == 0:
        raise UsageError('cannot score an empty prediction set')
    residual = predictions - targets
    ss_res = float(np.sum(residual ** 2))
    ss_tot = float(np.sum((targets - targets.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else None
    return Metrics(float(np.mean(residual ** 2)), float(np.mean(np.abs(residual))), r2)


def box_stats(values):
    """
    Returns the box-plot statistics of ``values``.

    Whiskers reach the most extreme values within 1.5 IQR of the quartiles; values
    beyond them are outliers.

    :param values: The sample
    :type values:  ``list`` of ``float``

    :return: The median, quartiles, whiskers and outliers
    :rtype:  ``dict``
    """
    values = np.asarray([value for value in values if value is not None], dtype=float)
    if values.size == 0:
        raise UsageError('cannot summarize an empty sample')
    q1, median, q3 = (float(value) for value in np.percentile(values, [25, 50, 75]))
    iqr = q3 - q1
    inside = values[(values >= q1 - 1.5 * iqr) & (values <= q3 + 1.5 * iqr)]
    outliers = values[(values < q1 - 1.5 * iqr) | (values > q3 + 1.5 * iqr)]
    return {'median': median, 'q1': q1, 'q3': q3, 'iqr': iqr,
            'whisker_low': float(inside.min()), 'whisker_high': float(inside.max()),
            'outliers': sorted(float(value) for value in outliers)}


def _summary(values):
    """
    Returns the mean and population deviation of the defined values. [INTERNAL]
    """
    values = [value for value in values if value is not None]
    if not values:
        return {'mean': None, 'std': None}
    return {'mean': float(np.mean(values)), 'std': float(np.std(values))}


class MetricsReport(object):
    """
    An instance holds the per-fold test scores of one model.

    :ivar label: The model label token
    :vartype label: ``str``

    :ivar folds: The scores on normalized values, one per fold
    :vartype folds: ``list`` of :class:`Metrics`

    :ivar raw_folds: The scores in vehicles per hour, one per fold
    :vartype raw_folds: ``list`` of :class:`Metrics`

    :ivar config: The configuration echo
    :vartype config: ``dict``
    """

    def __init__(self, label, folds, raw_folds, config=None):
        """
        Creates a report.
        """
        if len(folds) != len(raw_folds):
            raise UsageError('%d normalized and %d raw fold scores' % (len(folds), len(raw_folds)))
        self.label = str(label)
        self.folds = [Metrics(*item) for item in folds]
        self.raw_folds = [Metrics(*item) for item in raw_folds]
        self.config = dict(config or {})

    def __len__(self):
        """
        :return: The number of folds
        :rtype:  ``int``
        """
        return len(self.folds)

    def values(self, metric, raw=False):
        """
        :return: One metric across the folds (None where undefined)
        :rtype:  ``list``
        """
        if metric not in METRICS:
            raise UsageError('%s is not a metric; choose one of %s' % (repr(metric), ', '.join(METRICS)))
        source = self.raw_folds if raw else self.folds
        return [getattr(item, metric) for item in source]

    def summary(self, raw=False):
        """
        :return: The mean and standard deviation of each metric across folds
        :rtype:  ``dict``
        """
        return {metric: _summary(self.values(metric, raw)) for metric in METRICS}

    def box(self, metric='mse'):
        """
        :return: The box-plot statistics of one normalized metric
        :rtype:  ``dict``
        """
        return box_stats(self.values(metric))

    def to_dict(self):
        """
        :return: The report as a JSON-ready dictionary
        :rtype:  ``dict``
        """
        defined = {metric: [value for value in self.values(metric) if value is not None] for metric in METRICS}
        return {'label': self.label,
                'folds': [dict(item._asdict(), fold=pos) for pos, item in enumerate(self.folds)],
                'raw_folds': [dict(item._asdict(), fold=pos) for pos, item in enumerate(self.raw_folds)],
                'summary': self.summary(), 'raw_summary': self.summary(True),
                'box': {metric: box_stats(defined[metric]) for metric in METRICS if defined[metric]},
                'config': self.config}

    @classmethod
    def from_dict(cls, data):
        """
        :return: The report written by :meth:`to_dict`
        :rtype:  :class:`MetricsReport`
        """
        def unpack(items):
            return [Metrics(item['mse'], item['mae'], item['r2']) for item in items]
        return cls(data['label'], unpack(data['folds']), unpack(data['raw_folds']), data.get('config'))


class ConvergenceHistory(object):
    """
    An instance holds the per-epoch losses of every fold and their aggregates.

    :ivar losses: The (folds, epochs) training losses
    :vartype losses: ``numpy.ndarray``

    :ivar val_losses: The (folds, epochs) validation losses, or None
    :vartype val_losses: ``numpy.ndarray`` or ``None``
    """

    @property
    def epochs(self):
        """
        The epoch budget.

        **Invariant**: Value is an ``int`` >= 1.
        """
        return self.losses.shape[1]

    def __init__(self, losses, val_losses=None):
        """
        Creates a history from per-fold loss lists of equal length.
        """
        losses = np.asarray(losses, dtype=float)
        if losses.ndim != 2 or losses.size == 0:
            raise UsageError('fold histories of shape %s are not (folds, epochs)' % repr(losses.shape))
        self.losses = losses
        self.val_losses = None
        if val_losses is not None and len(val_losses) and all(len(item) for item in val_losses):
            self.val_losses = np.asarray(val_losses, dtype=float)
            if self.val_losses.shape != losses.shape:
                raise UsageError('validation histories do not match the training histories')

    def mean(self, validation=False):
        """
        :return: The cross-fold mean at each epoch
        :rtype:  ``numpy.ndarray``
        """
        source = self.val_losses if validation else self.losses
        return None if source is None else source.mean(axis=0)

    def std(self, validation=False):
        """
        :return: The cross-fold standard deviation at each epoch
        :rtype:  ``numpy.ndarray``
        """
        source = self.val_losses if validation else self.losses
        return None if source is None else source.std(axis=0)

    def convergence_epoch(self, tolerance=0.05):
        """
        :return: The first epoch where the mean loss is within ``tolerance`` of its final value
        :rtype:  ``int``
        """
        return convergence_epoch(self.mean(), tolerance)

    def to_dict(self):
        """
        :return: The history as a JSON-ready dictionary
        :rtype:  ``dict``
        """
        result = {'loss': self.losses.tolist(), 'mean': self.mean().tolist(), 'std': self.std().tolist()}
        if self.val_losses is not None:
            result.update({'val_loss': self.val_losses.tolist(), 'val_mean': self.mean(True).tolist(),
                           'val_std': self.std(True).tolist()})
        return result

    @classmethod
    def from_dict(cls, data):
        """
        :return: The history written by :meth:`to_dict`
        :rtype:  :class:`ConvergenceHistory`
        """
        return cls(data['loss'], data.get('val_loss'))


def aggregate_histories(histories):
    """
    Returns the cross-fold history of several training runs.

    :param histories: One training history per fold
    :type histories:  ``list`` of :class:`~qforecast.models.TrainingHistory`

    :return: The aggregated history
    :rtype:  :class:`ConvergenceHistory`
    """
    return ConvergenceHistory([item.loss for item in histories], [item.val_loss for item in histories])


pass
# #mark -
# #mark Cross-validation

class CrossValidationResult(object):
    """
    An instance is the outcome of :func:`run_cross_validation`.

    :ivar report: The test scores
    :vartype report: :class:`MetricsReport`

    :ivar history: The training curves
    :vartype history: :class:`ConvergenceHistory`

    :ivar predictions: (fold, series index, target, prediction, raw target, raw prediction) rows
    :vartype predictions: ``list`` of ``tuple``

    :ivar runtime: The wall-clock seconds spent
    :vartype runtime: ``float``
    """

    def __init__(self, report, history, predictions, runtime):
        self.report = report
        self.history = history
        self.predictions = predictions
        self.runtime = runtime


def run_cross_validation(label, series, plan, config, cache=None):
    """
    Trains and scores one model on every fold of ``plan``.

    For each fold the normalizer is fitted on the training samples only, and the
    training, validation and test samples are windowed separately.  An autoencoder
    is trained (or read from ``cache``) on the training windows, then the regressor is
    trained on their latents while the validation loss is monitored, and finally the
    test windows are scored.  Fold f uses the seed ``config.seed + f``, so classic and
    hybrid runs share encoders.

    :param label: The model to evaluate
    :type label:  :class:`~qforecast.models.ModelLabel`

    :param series: The whole series
    :type series:  :class:`~qforecast.data.TimeSeries`

    :param plan: The fold plan for the series
    :type plan:  :class:`FoldPlan`

    :param config: The experiment settings
    :type config:  :class:`~qforecast.config.ExperimentConfig`

    :param cache: Where trained autoencoders are kept
    :type cache:  :class:`~qforecast.autoencoder.AutoencoderCache` or ``None``

    :return: The scores, curves and predictions
    :rtype:  :class:`CrossValidationResult`
    """
    if isinstance(label, str):
        label = ModelLabel.parse(label)
    if plan.n != len(series):
        raise UsageError('the plan covers %d samples, the series has %d' % (plan.n, len(series)))

    began = time.perf_counter()
    w = config.window
    scores, raw_scores, histories, predictions = [], [], [], []
    for fold in plan.folds:
        seed = config.seed + fold.index
        logger.info('model=%s fold=%d train=%d validation=%d test=%d', label.token, fold.index,
                    fold.train.size, fold.validation.size, fold.test.size)
        scaler = fit_normalizer(series.values[fold.train])
        scaled = scaler.apply(series.values)
        train = windows_from_indices(scaled, fold.train, w)
        validation = windows_from_indices(scaled, fold.validation, w)
        test = windows_from_indices(scaled, fold.test, w)
        if len(train) == 0 or len(test) == 0:
            raise ConfigurationError('fold %d has no %s windows of length %d'
                                     % (fold.index, 'training' if len(train) == 0 else 'test', w))

        settings = (config.ae_epochs, config.batch_size, seed, config.learning_rate, config.clip_norm)
        if cache is None:
            encoder = train_autoencoder(train, label.n_q, *settings)[0]
        else:
            encoder = cache.train_or_load(train, label.n_q, *settings)

        model = build_model(label, seed, config.angle_scale, config.layers_per_block)
        model, history = train_regressor(model, encoder, train, config.epochs, config.batch_size, seed,
                                         config.learning_rate, validation, config.clip_norm)
        histories.append(history)

        guess = model.predict(encode_many(encoder, test.inputs))
        scores.append(compute_metrics(guess, test.targets))
        raw_guess = scaler.invert(guess)
        raw_target = scaler.invert(test.targets)
        raw_scores.append(compute_metrics(raw_guess, raw_target))
        for pos in range(len(test)):
            predictions.append((fold.index, int(test.starts[pos]) + w, float(test.targets[pos]),
                                float(guess[pos]), float(raw_target[pos]), float(raw_guess[pos])))
        logger.info('model=%s fold=%d mse=%.6g mae=%.6g r2=%s', label.token, fold.index,
                    scores[-1].mse, scores[-1].mae, scores[-1].r2)

    echo = config.to_dict() if hasattr(config, 'to_dict') else {}
    report = MetricsReport(label.token, scores, raw_scores, echo)
    return CrossValidationResult(report, aggregate_histories(histories), predictions,
                                 time.perf_counter() - began)


def consistency_check(report):
    """
    Returns every fold score divided by its cross-fold mean.

    For each metric the result holds the normalized per-fold values, their standard
    deviation and the Spearman rank correlation between fold index and score (None
    when the scores are all equal).  A metric with a zero mean or an undefined fold
    score is skipped with a warning.

    :param report: The scores of one model
    :type report:  :class:`MetricsReport`

    :return: The normalized scores keyed by metric
    :rtype:  ``dict``
    """
    if len(report) < 2:
        raise UsageError('a consistency check needs at least 2 folds, not %d' % len(report))
    result = {}
    for metric in METRICS:
        values = report.values(metric)
        if any(value is None for value in values):
            logger.warning('skipping %s of %s: a fold score is undefined', metric, report.label)
            continue
        mean = float(np.mean(values))
        if mean == 0:
            logger.warning('skipping %s of %s: the mean score is zero', metric, report.label)
            continue
        normalized = np.asarray(values, dtype=float) / mean
        rho = None
        if np.ptp(normalized) > 0:
            rho = float(stats.spearmanr(np.arange(normalized.size), normalized)[0])
        result[metric] = {'normalized': normalized.tolist(), 'std': float(np.std(normalized)),
                          'spearman': rho}
    return result
