"""
Traffic flow series: ingestion, synthesis, normalization and windowing.

A series holds one flow value (vehicles per hour) every 90 seconds, which is 40
values per hour and 960 per day.  Series are read from a two column CSV file with
the header ``timestamp,flow``, or generated with a commuter-shaped daily profile.

Windows are built after a series has been split into folds.  The function
:func:`windows_from_indices` only makes windows inside contiguous runs of the indices
it is given, so no window ever straddles two splits.

:author:  qforecast developers
:version: October 17, 2026
"""
import datetime
import hashlib
import logging
import math
from dataclasses import dataclass, asdict

import numpy as np

from . import filetools
from .errors import ConfigurationError, IngestionError, UsageError

logger = logging.getLogger(__name__)

# Seconds between two measurements
SAMPLE_INTERVAL = 90

# Measurements per hour and per day
SAMPLES_PER_HOUR = 40
SAMPLES_PER_DAY = 24 * SAMPLES_PER_HOUR

# The default origin of synthetic series (a Wednesday)
DEFAULT_ORIGIN = '2023-03-01T00:00:00'

CSV_HEADER = ['timestamp', 'flow']


def _parse_time(text):
    """
    Returns the datetime of an ISO-8601 string, accepting a trailing Z. [INTERNAL]
    """
    text = text.strip()
    if text.endswith('Z'):
        text = text[:-1] + '+00:00'
    return datetime.datetime.fromisoformat(text)


class TimeSeries(object):
    """
    An instance is a regularly sampled flow series.

    The timestamp of value i is ``origin + i * sample_interval`` seconds.
    """

    @property
    def values(self):
        """
        The flow values in vehicles per hour.

        **Invariant**: Value is a finite, non-negative float array.
        """
        return self._values

    @property
    def origin(self):
        """
        The timestamp of the first value.

        **Invariant**: Value is a ``datetime.datetime``.
        """
        return self._origin

    @property
    def sample_interval(self):
        """
        The seconds between consecutive values.

        **Invariant**: Value is an ``int`` > 0.
        """
        return self._interval

    def __init__(self, values, origin=None, sample_interval=SAMPLE_INTERVAL):
        """
        Creates a series from its values.

        :param values: The flow values
        :type values:  array-like

        :param origin: The first timestamp (default 2023-03-01T00:00:00)
        :type origin:  ``datetime.datetime``, ``str`` or ``None``

        :param sample_interval: The seconds between values
        :type sample_interval:  ``int``
        """
        values = np.array(values, dtype=float)
        if values.ndim != 1:
            raise UsageError('series values of shape %s are not a vector' % repr(values.shape))
        if not np.all(np.isfinite(values)):
            raise UsageError('series values must be finite')
        if np.any(values < 0):
            raise UsageError('series values must be non-negative')
        if origin is None:
            origin = DEFAULT_ORIGIN
        if isinstance(origin, str):
            origin = _parse_time(origin)
        self._values = values
        self._origin = origin
        self._interval = int(sample_interval)

    def __len__(self):
        """
        :return: The number of values
        :rtype:  ``int``
        """
        return self._values.size

    def __repr__(self):
        """
        :return: An unambiguous string representation of this series.
        :rtype:  ``str``
        """
        return 'TimeSeries(%d values from %s)' % (len(self), self._origin.isoformat())

    def timestamp(self, index):
        """
        Returns the timestamp of value ``index``.

        :param index: The position in the series
        :type index:  ``int``

        :return: The timestamp
        :rtype:  ``datetime.datetime``
        """
        return self._origin + datetime.timedelta(seconds=self._interval * int(index))


@dataclass
class SyntheticConfig:
    """
    The parameters of a synthetic traffic series.

    The daily profile is ``base_flow`` plus two Gaussian bumps centred at the morning
    and evening peaks, scaled so the peaks reach ``peak_flow``.  Weekend days are
    multiplied by ``weekend_factor``.  Gaussian noise with deviation ``noise_std`` is
    added and the result is clamped at zero.
    """
    n_days: int = 40
    peak_flow: float = 2000.0
    base_flow: float = 300.0
    noise_std: float = 60.0
    weekend_factor: float = 0.6
    morning_peak: float = 8.0
    evening_peak: float = 18.0
    peak_width: float = 1.5
    seed: int = 0
    origin: str = DEFAULT_ORIGIN

    def validate(self):
        """
        Raises a ConfigurationError if any field is out of range.
        """
        if type(self.n_days) != int or self.n_days < 1:
            raise ConfigurationError('%s is not a valid number of days' % repr(self.n_days))
        if not self.noise_std >= 0:
            raise ConfigurationError('%s is not a valid noise deviation' % repr(self.noise_std))
        if not 0 <= self.base_flow <= self.peak_flow:
            raise ConfigurationError('base flow %s must lie in [0, peak flow %s]'
                                     % (repr(self.base_flow), repr(self.peak_flow)))
        if not self.weekend_factor >= 0:
            raise ConfigurationError('%s is not a valid weekend factor' % repr(self.weekend_factor))
        if not self.peak_width > 0:
            raise ConfigurationError('%s is not a valid peak width' % repr(self.peak_width))
        try:
            _parse_time(self.origin)
        except ValueError:
            raise ConfigurationError('%s is not an ISO-8601 timestamp' % repr(self.origin))

    def to_dict(self):
        """
        :return: The fields of this configuration
        :rtype:  ``dict``
        """
        return asdict(self)


def generate_synthetic(config):
    """
    Returns a synthetic flow series with n_days * 960 values.

    The series is deterministic for a given seed.  With zero noise it is exactly
    periodic with a period of one week.

    :param config: The generator parameters
    :type config:  :class:`SyntheticConfig`

    :return: The generated series
    :rtype:  :class:`TimeSeries`
    """
    config.validate()
    origin = _parse_time(config.origin)
    count = config.n_days * SAMPLES_PER_DAY
    index = np.arange(count)
    hours = (index % SAMPLES_PER_DAY) / SAMPLES_PER_HOUR
    days = index // SAMPLES_PER_DAY

    width = 2 * config.peak_width ** 2
    bumps = np.exp(-(hours - config.morning_peak) ** 2 / width) + \
        np.exp(-(hours - config.evening_peak) ** 2 / width)
    # Rescale so the larger of the two bump sums hits peak_flow
    crest = max(1 + math.exp(-(config.evening_peak - config.morning_peak) ** 2 / width), 1.0)
    profile = config.base_flow + (config.peak_flow - config.base_flow) * bumps / crest

    weekday = (origin.weekday() + days) % 7
    profile = np.where(weekday >= 5, profile * config.weekend_factor, profile)

    rng = np.random.default_rng(config.seed)
    noise = rng.normal(0.0, config.noise_std, size=count) if config.noise_std > 0 else np.zeros(count)
    values = np.maximum(profile + noise, 0.0)
    logger.debug('generated %d synthetic values (seed=%d)', count, config.seed)
    return TimeSeries(values, origin)


def fill_gaps(records, fill=True, interval=SAMPLE_INTERVAL):
    """
    Returns the values of chronological records on a regular time grid.

    Each record is a (timestamp, value, row) triple.  Consecutive records must be
    ``interval`` seconds apart.  A gap that is a whole number of intervals is filled
    by linear interpolation if ``fill`` is True, and rejected otherwise.  Any other
    spacing is always an error.

    :param records: The measurements in time order
    :type records:  ``list`` of ``tuple``

    :param fill: Whether to interpolate missing measurements
    :type fill:  ``bool``

    :param interval: The seconds between measurements
    :type interval:  ``int``

    :return: The regularly spaced values
    :rtype:  ``list`` of ``float``
    """
    if not records:
        return []
    values = [records[0][1]]
    step = datetime.timedelta(seconds=interval)
    for (before, prev, _), (when, value, pos) in zip(records, records[1:]):
        delta = when - before
        if delta <= datetime.timedelta(0):
            raise IngestionError('timestamp %s is not after %s' % (when.isoformat(), before.isoformat()), pos)
        if delta == step:
            values.append(value)
            continue
        missing = delta / step
        if not fill or missing != int(missing):
            raise IngestionError('gap of %s before this row' % str(delta), pos)
        count = int(missing)
        for k in range(1, count):
            values.append(prev + (value - prev) * k / count)
        values.append(value)
        logger.info('filled %d missing values before row %d', count - 1, pos)
    return values


def load_csv(path, fill=False, sort=False):
    """
    Reads a flow series from a ``timestamp,flow`` CSV file.

    Rows must be in chronological order 90 seconds apart.  With ``sort`` the rows are
    sorted first instead of rejected.  With ``fill`` missing measurements are
    linearly interpolated instead of rejected.

    :param path: The file to read
    :type path:  ``str``

    :param fill: Whether to interpolate gaps
    :type fill:  ``bool``

    :param sort: Whether to sort out-of-order rows
    :type sort:  ``bool``

    :return: The series
    :rtype:  :class:`TimeSeries`
    """
    rows = filetools.read_csv(path)
    if [cell.strip() for cell in rows[0]] != CSV_HEADER:
        raise IngestionError('header %s is not %s' % (repr(rows[0]), ','.join(CSV_HEADER)), 0)
    if len(rows) < 2:
        raise IngestionError('file %s has no data rows' % repr(path))

    records = []
    for pos in range(1, len(rows)):
        stamp, flow = rows[pos]
        try:
            when = _parse_time(stamp)
        except ValueError:
            raise IngestionError('%s is not an ISO-8601 timestamp' % repr(stamp), pos)
        try:
            value = float(flow)
        except ValueError:
            raise IngestionError('%s is not a number' % repr(flow), pos)
        if not math.isfinite(value):
            raise IngestionError('flow %s is not finite' % repr(flow), pos)
        if value < 0:
            raise IngestionError('flow %s is negative' % repr(flow), pos)
        if records and (when.tzinfo is None) != (records[0][0].tzinfo is None):
            raise IngestionError('timestamp %s mixes naive and UTC-offset times' % repr(stamp), pos)
        records.append((when, value, pos))

    if sort:
        records.sort(key=lambda record: record[0])

    return TimeSeries(fill_gaps(records, fill), records[0][0])


def write_csv(series, path):
    """
    Writes ``series`` in the ``timestamp,flow`` CSV schema.

    :param series: The series to write
    :type series:  :class:`TimeSeries`

    :param path: The file to write
    :type path:  ``str``

    :return: The name of the file written
    :rtype:  ``str``
    """
    data = [list(CSV_HEADER)]
    for pos in range(len(series)):
        data.append([series.timestamp(pos).isoformat(), float(series.values[pos])])
    return filetools.write_csv(data, path)


def series_hash(values):
    """
    Returns a SHA-256 hex digest of an array, for cache keys.

    :param values: The values to hash
    :type values:  ``numpy.ndarray``

    :return: The hex digest
    :rtype:  ``str``
    """
    values = np.ascontiguousarray(values, dtype='<f8')
    digest = hashlib.sha256()
    digest.update(repr(values.shape).encode('ascii'))
    digest.update(values.tobytes())
    return digest.hexdigest()


pass
# #mark -
# #mark Normalization

class NormalizationParams(object):
    """
    An instance is a min-max scaling fitted on training values.

    :meth:`apply` maps [min, max] onto [0, 1]; values outside the training range map
    outside [0, 1].
    """

    @property
    def min(self):
        """
        The smallest training value.

        **Invariant**: Value is a ``float`` less than ``max``.
        """
        return self._min

    @property
    def max(self):
        """
        The largest training value.

        **Invariant**: Value is a ``float`` greater than ``min``.
        """
        return self._max

    def __init__(self, low, high):
        """
        Creates a scaling from its bounds.

        :param low: The training minimum
        :type low:  ``float``

        :param high: The training maximum
        :type high:  ``float``
        """
        if not high > low:
            raise UsageError('normalization bounds [%s, %s] are empty' % (repr(low), repr(high)))
        self._min = float(low)
        self._max = float(high)

    def __repr__(self):
        """
        :return: An unambiguous string representation of this scaling.
        :rtype:  ``str``
        """
        return 'NormalizationParams(min=%r, max=%r)' % (self._min, self._max)

    def apply(self, values):
        """
        :return: ``values`` scaled so the training range becomes [0, 1]
        :rtype:  ``numpy.ndarray``
        """
        return (np.asarray(values, dtype=float) - self._min) / (self._max - self._min)

    def invert(self, values):
        """
        :return: normalized ``values`` mapped back to vehicles per hour
        :rtype:  ``numpy.ndarray``
        """
        return np.asarray(values, dtype=float) * (self._max - self._min) + self._min

    def to_dict(self):
        """
        :return: The bounds as a dictionary
        :rtype:  ``dict``
        """
        return {'min': self._min, 'max': self._max}


def fit_normalizer(values):
    """
    Returns the min-max scaling of ``values``.

    Pass only training values: the scaling must not see validation or test data.

    :param values: The training values
    :type values:  ``numpy.ndarray``

    :return: The fitted scaling
    :rtype:  :class:`NormalizationParams`
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise UsageError('cannot normalize an empty training segment')
    low, high = float(values.min()), float(values.max())
    if not high > low:
        raise UsageError('the training segment is constant at %r' % low)
    return NormalizationParams(low, high)


pass
# #mark -
# #mark Windows

class WindowSet(object):
    """
    An instance is a set of input windows with their next-step targets.

    :ivar inputs: The (n_samples, w) windows
    :vartype inputs: ``numpy.ndarray``

    :ivar targets: The value following each window
    :vartype targets: ``numpy.ndarray``

    :ivar starts: The series index of the first element of each window
    :vartype starts: ``numpy.ndarray``
    """

    @property
    def width(self):
        """
        The window length w.

        **Invariant**: Value is an ``int`` >= 1.
        """
        return self.inputs.shape[1]

    def __init__(self, inputs, targets, starts):
        """
        Creates a window set.

        :param inputs: The (n_samples, w) windows
        :param targets: The n_samples targets
        :param starts: The n_samples source indices
        """
        inputs = np.asarray(inputs, dtype=float)
        targets = np.asarray(targets, dtype=float)
        starts = np.asarray(starts, dtype=int)
        if inputs.ndim != 2 or targets.shape != (inputs.shape[0],) or starts.shape != targets.shape:
            raise UsageError('windows %s, targets %s and starts %s do not match'
                             % (inputs.shape, targets.shape, starts.shape))
        self.inputs = inputs
        self.targets = targets
        self.starts = starts

    def __len__(self):
        """
        :return: The number of windows
        :rtype:  ``int``
        """
        return self.targets.size

    def __repr__(self):
        """
        :return: An unambiguous string representation of this set.
        :rtype:  ``str``
        """
        return 'WindowSet(%d windows of width %d)' % (len(self), self.width)

    def source_indices(self):
        """
        Returns every series index that feeds a window, as input or as target.

        :return: The sorted indices
        :rtype:  ``numpy.ndarray``
        """
        if len(self) == 0:
            return np.zeros(0, dtype=int)
        spans = self.starts[:, np.newaxis] + np.arange(self.width + 1)[np.newaxis, :]
        return np.unique(spans)

    def subset(self, rows):
        """
        Returns the windows at the given rows.

        :param rows: The rows to keep
        :type rows:  ``numpy.ndarray``

        :return: A new window set
        :rtype:  :class:`WindowSet`
        """
        return WindowSet(self.inputs[rows], self.targets[rows], self.starts[rows])

    @classmethod
    def concat(cls, sets, width):
        """
        Returns the union of several window sets, in order.

        :param sets: The window sets to join
        :type sets:  ``list`` of :class:`WindowSet`

        :param width: The window length (used when ``sets`` is empty)
        :type width:  ``int``

        :return: A new window set
        :rtype:  :class:`WindowSet`
        """
        sets = [item for item in sets if len(item)]
        if not sets:
            return cls(np.zeros((0, width)), np.zeros(0), np.zeros(0, dtype=int))
        return cls(np.concatenate([item.inputs for item in sets]),
                   np.concatenate([item.targets for item in sets]),
                   np.concatenate([item.starts for item in sets]))


def make_windows(segment, w=20, start_index=0):
    """
    Returns every window of length ``w`` in ``segment`` with its next value.

    A segment of length L gives L - w windows.

    :param segment: The contiguous values to window
    :type segment:  ``numpy.ndarray``

    :param w: The window length
    :type w:  ``int``

    :param start_index: The series index of ``segment[0]``
    :type start_index:  ``int``

    :return: The windows
    :rtype:  :class:`WindowSet`
    """
    segment = np.asarray(segment, dtype=float)
    if w < 1:
        raise UsageError('%s is not a valid window length' % repr(w))
    if segment.ndim != 1 or segment.size <= w:
        raise UsageError('a segment of %d values is too short for windows of %d' % (segment.size, w))
    count = segment.size - w
    inputs = np.lib.stride_tricks.sliding_window_view(segment, w)[:count].copy()
    targets = segment[w:].copy()
    starts = start_index + np.arange(count)
    return WindowSet(inputs, targets, starts)


def contiguous_runs(indices):
    """
    Splits sorted series indices into runs of consecutive values.

    :param indices: The indices, in increasing order
    :type indices:  ``numpy.ndarray``

    :return: The runs
    :rtype:  ``list`` of ``numpy.ndarray``
    """
    indices = np.asarray(indices, dtype=int)
    if indices.size == 0:
        return []
    breaks = np.nonzero(np.diff(indices) != 1)[0] + 1
    return np.split(indices, breaks)


def windows_from_indices(values, indices, w=20):
    """
    Returns the windows lying entirely inside the index set ``indices``.

    The indices are split into contiguous runs and each run is windowed on its own.
    Runs of w values or fewer produce no windows.

    :param values: The whole (normalized) series
    :type values:  ``numpy.ndarray``

    :param indices: The series indices of one split
    :type indices:  ``numpy.ndarray``

    :param w: The window length
    :type w:  ``int``

    :return: The windows
    :rtype:  :class:`WindowSet`
    """
    values = np.asarray(values, dtype=float)
    sets = []
    for run in contiguous_runs(np.sort(np.asarray(indices, dtype=int))):
        if run.size > w:
            sets.append(make_windows(values[run[0]:run[-1] + 1], w, int(run[0])))
    return WindowSet.concat(sets, w)
