"""
Experiment configuration.

An :class:`ExperimentConfig` holds every setting of a run or grid.  It is read from
JSON, overridden field by field from the command line, and echoed verbatim into
every report so that a report can be executed again.

:author:  qforecast developers
:version: October 17, 2026
"""
import math
import os
from dataclasses import dataclass, field, asdict, fields
from typing import Optional

from . import filetools
from .data import SyntheticConfig
from .errors import ConfigurationError, UsageError
from .models import SCENARIOS, VARIANTS, MIN_QUBITS, MAX_QUBITS

# The environment variable naming the default output directory
OUTPUT_ENV = 'QFORECAST_OUTPUT_DIR'

DEFAULT_GRID = [2, 4, 6, 8, 10, 12, 14]


def default_output_dir():
    """
    :return: The output directory from the environment, or ``results``
    :rtype:  ``str``
    """
    return os.environ.get(OUTPUT_ENV) or 'results'


@dataclass
class ExperimentConfig:
    """
    Every setting of an experiment.

    The data come from ``csv`` when it is set, and from the ``synthetic`` generator
    otherwise.  A single run uses ``scenario``, ``variant`` and ``n_q``; a grid uses
    ``scenario`` with every variant in ``variants`` and every count in ``grid``.
    """
    csv: Optional[str] = None
    fill: bool = False
    sort: bool = False
    synthetic: SyntheticConfig = field(default_factory=SyntheticConfig)
    scenario: str = 'A'
    variant: str = 'classic'
    n_q: int = 4
    variants: list = field(default_factory=lambda: list(VARIANTS))
    grid: list = field(default_factory=lambda: list(DEFAULT_GRID))
    window: int = 20
    epochs: int = 20
    batch_size: int = 32
    learning_rate: float = 0.0005
    ae_epochs: int = 20
    clip_norm: Optional[float] = 5.0
    k: int = 5
    gap_size: int = 960
    val_fraction: float = 0.1
    angle_scale: float = math.pi
    layers_per_block: int = 1
    seed: int = 0
    workers: int = 1
    output_dir: str = field(default_factory=default_output_dir)
    fixed_timestamp: bool = False
    plots: bool = True

    def validate(self):
        """
        Raises an error if any setting is invalid.

        Unknown scenario or variant tokens are usage errors; bad sizes are
        configuration errors.
        """
        if self.scenario not in SCENARIOS:
            raise UsageError('%s is not a scenario; choose one of %s' % (repr(self.scenario), ', '.join(SCENARIOS)))
        for variant in [self.variant] + list(self.variants):
            if variant not in VARIANTS:
                raise UsageError('%s is not a variant; choose one of %s' % (repr(variant), ', '.join(VARIANTS)))
        if not self.variants:
            raise ConfigurationError('the grid needs at least one variant')
        if not self.grid:
            raise ConfigurationError('the grid needs at least one qubit count')
        for n_q in [self.n_q] + list(self.grid):
            if type(n_q) != int or not MIN_QUBITS <= n_q <= MAX_QUBITS:
                raise ConfigurationError('%s is not a qubit count in %d..%d' % (repr(n_q), MIN_QUBITS, MAX_QUBITS))
        for name in ('window', 'epochs', 'batch_size', 'ae_epochs', 'layers_per_block', 'workers'):
            value = getattr(self, name)
            if type(value) != int or value < 1:
                raise ConfigurationError('%s is not a valid %s' % (repr(value), name))
        if type(self.seed) != int:
            raise ConfigurationError('%s is not an integer seed' % repr(self.seed))
        if type(self.k) != int or self.k < 2:
            raise ConfigurationError('%s is not a valid fold count' % repr(self.k))
        if type(self.gap_size) != int or self.gap_size < 0:
            raise ConfigurationError('%s is not a valid gap size' % repr(self.gap_size))
        if not 0 < self.val_fraction < 0.5:
            raise ConfigurationError('validation fraction %s is not in (0, 0.5)' % repr(self.val_fraction))
        if not self.learning_rate > 0:
            raise ConfigurationError('%s is not a valid learning rate' % repr(self.learning_rate))
        if self.clip_norm is not None and not self.clip_norm > 0:
            raise ConfigurationError('%s is not a valid clipping norm' % repr(self.clip_norm))
        if not math.isfinite(self.angle_scale):
            raise ConfigurationError('%s is not a valid angle scale' % repr(self.angle_scale))
        self.synthetic.validate()

    def to_dict(self):
        """
        :return: Every field, with the synthetic settings as a nested dictionary
        :rtype:  ``dict``
        """
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        """
        Returns the configuration described by ``data``.

        Missing fields take their defaults; unknown fields are an error.

        :param data: The settings, as written by :meth:`to_dict`
        :type data:  ``dict``

        :return: The validated configuration
        :rtype:  :class:`ExperimentConfig`
        """
        if type(data) != dict:
            raise ConfigurationError('a configuration must be a JSON object, not %s' % type(data).__name__)
        data = dict(data)
        known = {item.name for item in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError('unknown configuration fields %s' % ', '.join(unknown))
        synthetic = data.pop('synthetic', None) or {}
        if type(synthetic) != dict:
            raise ConfigurationError('the synthetic settings must be a JSON object')
        allowed = {item.name for item in fields(SyntheticConfig)}
        if set(synthetic) - allowed:
            raise ConfigurationError('unknown synthetic fields %s' % ', '.join(sorted(set(synthetic) - allowed)))
        result = cls(synthetic=SyntheticConfig(**synthetic), **data)
        result.validate()
        return result

    def override(self, **changes):
        """
        Returns a copy with the given fields replaced; None values are ignored.

        Keys naming a field of :class:`~qforecast.data.SyntheticConfig` (``n_days``,
        ``noise_std``, ...) change the synthetic settings.

        :return: The validated configuration
        :rtype:  :class:`ExperimentConfig`
        """
        data = self.to_dict()
        synthetic = data['synthetic']
        for key, value in changes.items():
            if value is None:
                continue
            if key in synthetic and key not in data:
                synthetic[key] = value
            elif key in data:
                data[key] = value
            else:
                raise ConfigurationError('%s is not a configuration field' % repr(key))
        return ExperimentConfig.from_dict(data)


def load_config(filename):
    """
    Reads and validates a configuration file.

    :param filename: The JSON file to read
    :type filename:  ``str``

    :return: The configuration
    :rtype:  :class:`ExperimentConfig`
    """
    return ExperimentConfig.from_dict(filetools.read_json(filename))
