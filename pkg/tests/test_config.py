"""
Unit test for the experiment configuration

:author:  qforecast developers
:version: October 17, 2026
"""
import math
import os
import os.path
import shutil
import tempfile
import unittest
import unittest.mock

from qforecast import config, filetools
from qforecast.errors import ConfigurationError, FileToolError, UsageError


def fixture(name):
    """
    Returns the path of a file in the fixtures folder.
    """
    return os.path.join(os.path.split(__file__)[0], 'files', name)


class ConfigTest(unittest.TestCase):
    """
    Unit test for the config module
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

    def test01_defaults(self):
        """
        Tests the default experiment.
        """
        settings = config.ExperimentConfig()
        settings.validate()
        self.assertEqual((settings.scenario, settings.variant, settings.n_q), ('A', 'classic', 4))
        self.assertEqual(settings.grid, [2, 4, 6, 8, 10, 12, 14])
        self.assertEqual(settings.variants, ['classic', 'hybrid'])
        self.assertEqual((settings.window, settings.k, settings.gap_size), (20, 5, 960))
        self.assertEqual(settings.learning_rate, 0.0005)
        self.assertEqual(settings.angle_scale, math.pi)
        self.assertEqual(settings.synthetic.n_days, 40)

        settings.grid.append(3)
        self.assertEqual(config.ExperimentConfig().grid, config.DEFAULT_GRID)

        with unittest.mock.patch.dict(os.environ, {config.OUTPUT_ENV: self.folder}):
            self.assertEqual(config.ExperimentConfig().output_dir, self.folder)
        with unittest.mock.patch.dict(os.environ, {config.OUTPUT_ENV: ''}):
            self.assertEqual(config.ExperimentConfig().output_dir, 'results')

    def test02_validate(self):
        """
        Tests the errors raised by invalid settings.
        """
        base = config.ExperimentConfig()
        for change in ({'scenario': 'C'}, {'variant': 'quantum'}, {'variants': ['classic', 'analog']}):
            with self.assertRaises(UsageError):
                base.override(**change)
        for change in ({'n_q': 1}, {'n_q': 15}, {'grid': [2, 16]}, {'grid': []}, {'variants': []},
                       {'window': 0}, {'epochs': 0}, {'batch_size': 0}, {'workers': 0}, {'k': 1},
                       {'gap_size': -1}, {'val_fraction': 0.5}, {'learning_rate': 0.0},
                       {'clip_norm': -1.0}, {'angle_scale': math.inf}, {'n_days': 0}):
            with self.assertRaises(ConfigurationError):
                base.override(**change)

        relaxed = base.override(clip_norm=None)
        self.assertEqual(relaxed.clip_norm, 5.0)

    def test03_from_dict(self):
        """
        Tests reading settings from a dictionary.
        """
        settings = config.ExperimentConfig.from_dict({'n_q': 6, 'synthetic': {'n_days': 3, 'seed': 2}})
        self.assertEqual(settings.n_q, 6)
        self.assertEqual(settings.synthetic.n_days, 3)
        self.assertEqual(settings.synthetic.seed, 2)
        self.assertEqual(settings.window, 20)

        again = config.ExperimentConfig.from_dict(settings.to_dict())
        self.assertEqual(again, settings)

        with self.assertRaises(ConfigurationError):
            config.ExperimentConfig.from_dict({'n_qubits': 4})
        with self.assertRaises(ConfigurationError):
            config.ExperimentConfig.from_dict({'synthetic': {'days': 4}})
        with self.assertRaises(ConfigurationError):
            config.ExperimentConfig.from_dict({'synthetic': [1]})
        with self.assertRaises(ConfigurationError):
            config.ExperimentConfig.from_dict([('n_q', 4)])
        for seed in (None, 1.5):
            with self.assertRaises(ConfigurationError):
                config.ExperimentConfig.from_dict({'seed': seed})

    def test04_override(self):
        """
        Tests field replacement, including the synthetic fields.
        """
        base = config.ExperimentConfig()
        changed = base.override(n_days=2, noise_std=0.0, seed=7, window=8, csv=None)
        self.assertEqual(changed.synthetic.n_days, 2)
        self.assertEqual(changed.synthetic.noise_std, 0.0)
        self.assertEqual(changed.seed, 7)
        self.assertEqual(changed.synthetic.seed, 0)
        self.assertEqual(changed.window, 8)
        self.assertEqual(base.window, 20)
        self.assertEqual(base.synthetic.n_days, 40)

        with self.assertRaises(ConfigurationError):
            base.override(qubits=4)

    def test05_load(self):
        """
        Tests reading configuration files.
        """
        settings = config.load_config(fixture('config.json'))
        self.assertEqual((settings.window, settings.k, settings.n_q), (4, 3, 2))
        self.assertEqual(settings.synthetic.n_days, 1)

        filename = filetools.write_json(settings.to_dict(), os.path.join(self.folder, 'echo.json'))
        self.assertEqual(config.load_config(filename), settings)

        with self.assertRaises(ConfigurationError):
            config.load_config(fixture('config_bad.json'))
        with self.assertRaises(FileToolError):
            config.load_config(os.path.join(self.folder, 'missing.json'))


if __name__ == '__main__':
    unittest.main()
