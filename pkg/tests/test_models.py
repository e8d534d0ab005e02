"""
Unit test for the regressors

:author:  qforecast developers
:version: October 17, 2026
"""
import math
import os.path
import shutil
import tempfile
import unittest

import numpy

from qforecast import models, qsim
from qforecast.autoencoder import AutoencoderWeights, encode_many
from qforecast.data import make_windows
from qforecast.errors import ConfigurationError, InternalError, UsageError
from qforecast.nn import gradient_check


TOKENS = ('A-classic-Q2', 'A-hybrid-Q2', 'B-classic-Q2', 'B-hybrid-Q2')


class ModelsTest(unittest.TestCase):
    """
    Unit test for the models module
    """

    def assertClose(self, given, correct, atol=1e-10):
        """
        Replacement to assertAlmostEquals that works on arrays.

        :param given: The value produced by the test
        :type given:  any

        :param correct: The expected value
        :type correct:  any
        """
        message = '%s != %s' % (repr(given), repr(correct))
        self.assertTrue(numpy.allclose(given, correct, rtol=0, atol=atol), message)

    def setUp(self):
        """
        Creates a scratch folder and a fixed generator
        """
        self.folder = tempfile.mkdtemp()
        self.rng = numpy.random.default_rng(31)

    def tearDown(self):
        """
        Removes the scratch folder
        """
        shutil.rmtree(self.folder, ignore_errors=True)

    def test01_labels(self):
        """
        Tests model labels.
        """
        label = models.ModelLabel('A', 'classic', 4)
        self.assertEqual(label.name, 'Q4')
        self.assertEqual(label.token, 'A-classic-Q4')
        self.assertEqual(str(label), 'A-classic-Q4')
        self.assertEqual(models.ModelLabel.parse('b-Hybrid-q6'), models.ModelLabel('B', 'hybrid', 6))

        labels = [models.ModelLabel.parse(token) for token in ('B-classic-Q2', 'A-hybrid-Q4', 'A-classic-Q4', 'A-hybrid-Q2')]
        ordered = [item.token for item in sorted(labels, key=models.ModelLabel.sort_key)]
        self.assertEqual(ordered, ['A-hybrid-Q2', 'A-classic-Q4', 'A-hybrid-Q4', 'B-classic-Q2'])

        with self.assertRaises(UsageError):
            models.ModelLabel('C', 'classic', 4)
        with self.assertRaises(UsageError):
            models.ModelLabel('A', 'quantum', 4)
        with self.assertRaises(UsageError):
            models.ModelLabel.parse('A-classic')
        for bad in (1, 15, True, 4.0):
            with self.assertRaises(ConfigurationError):
                models.ModelLabel('A', 'classic', bad)

    def test02_sizes(self):
        """
        Tests the structure of each variant.
        """
        model = models.build_model('A-classic-Q3')
        self.assertIsInstance(model, models.RegressorA_Classic)
        self.assertEqual(model.describe()['hidden_width'], 8)
        self.assertEqual(model.n_parameters, (3 * 8 + 8) + (8 + 1))

        model = models.build_model('B-hybrid-Q6')
        self.assertIsInstance(model, models.RegressorB_Hybrid)
        self.assertEqual(model.quantum.n_blocks, 6)
        self.assertEqual(model.n_parameters, 108 + 7)

        model = models.build_model('A-hybrid-Q4', layers_per_block=2)
        self.assertIsInstance(model, models.RegressorA_Hybrid)
        self.assertEqual(model.quantum.n_blocks, 1)
        self.assertEqual(model.n_parameters, 2 * 4 * 3 + 5)
        self.assertEqual(model.describe()['layers_per_block'], 2)

        model = models.build_model(models.ModelLabel('B', 'classic', 2))
        self.assertIsInstance(model, models.RegressorB_Classic)
        self.assertEqual(model.n_parameters, 4 * (2 + 4 + 2) + 3)
        description = model.describe()
        self.assertEqual((description['recursions'], description['units']), (2, 2))
        self.assertEqual(description['label'], 'B-classic-Q2')

        with self.assertRaises(ConfigurationError):
            models.build_model('A-classic-Q1')

    def test03_determinism(self):
        """
        Tests that the seed fixes the initial parameters.
        """
        for token in TOKENS:
            first = models.build_model(token, seed=4).parameters().flat_params()
            second = models.build_model(token, seed=4).parameters().flat_params()
            other = models.build_model(token, seed=5).parameters().flat_params()
            self.assertTrue(numpy.array_equal(first, second), token)
            self.assertFalse(numpy.array_equal(first, other), token)
            blank = models.build_model(token, seed=None).parameters().flat_params()
            self.assertTrue(numpy.all(blank == 0), token)

        hybrid = models.build_model('B-hybrid-Q3', seed=0)
        self.assertTrue(numpy.all((hybrid.quantum.weights >= 0) & (hybrid.quantum.weights < 2 * math.pi)))

    def test04_zero_output(self):
        """
        Tests that zero output weights predict the output bias.
        """
        latents = self.rng.uniform(-1, 1, size=(6, 2))
        for token in TOKENS:
            model = models.build_model(token, seed=None)
            model.output.biases[:] = 0.37
            self.assertClose(model.predict(latents), numpy.full(6, 0.37))
            self.assertAlmostEqual(model.predict(latents[0]), 0.37)

    def test05_output_layer(self):
        """
        Tests that every model ends in one linear neuron.
        """
        latents = self.rng.uniform(-1, 1, size=(5, 3))
        model = models.build_model('A-classic-Q3', seed=2)
        features = numpy.tanh(latents @ model.hidden.weights.T + model.hidden.biases)
        self.assertClose(model.predict(latents), features @ model.output.weights[0] + model.output.biases[0])

        model = models.build_model('B-hybrid-Q3', seed=2)
        features = qsim.run_reupload_circuit(model.quantum, latents).values
        self.assertClose(model.predict(latents), features @ model.output.weights[0] + model.output.biases[0])

        model = models.build_model('A-classic-Q3', seed=2)
        single = model.forward(latents[1], cache=False)
        self.assertIsInstance(single, float)
        self.assertAlmostEqual(single, model.predict(latents)[1])

    def test06_gradients(self):
        """
        Tests the analytic gradients of all four variants against central differences.
        """
        for token in TOKENS + ('A-classic-Q4', 'A-hybrid-Q4', 'B-classic-Q4', 'B-hybrid-Q4'):
            model = models.build_model(token, seed=8)
            model.output.biases[:] = 0.2
            n_q = model.n_q
            latents = self.rng.uniform(-1, 1, size=(4, n_q))
            upstream = self.rng.normal(size=4)

            def loss():
                return float(numpy.sum(upstream * model.forward(latents, cache=False)))

            bundle = model.parameters()
            bundle.zero_grad()
            model.forward(latents)
            model.backward(upstream)
            self.assertLess(gradient_check(loss, bundle, step=1e-5, floor=1e-5), 1e-4, token)

    def test07_cache(self):
        """
        Tests the forward cache discipline.
        """
        model = models.build_model('A-hybrid-Q2', seed=1)
        with self.assertRaises(InternalError):
            model.backward(numpy.ones(3))
        with self.assertRaises(UsageError):
            model.forward(numpy.zeros((3, 4)))

        model.forward(numpy.zeros((3, 2)))
        model.backward(numpy.ones(3))
        self.assertEqual(model.circuit_evaluations, 2 * model.quantum.weights.size)

        model.forward(numpy.zeros((3, 2)))
        model.clear_cache()
        with self.assertRaises(InternalError):
            model.backward(numpy.ones(3))

    def test08_convergence(self):
        """
        Tests the convergence epoch.
        """
        self.assertEqual(models.convergence_epoch([5.0, 3.0, 2.0, 1.02, 1.0]), 4)
        self.assertEqual(models.convergence_epoch([1.0]), 1)
        self.assertEqual(models.convergence_epoch([2.0, 2.0, 2.0]), 1)
        self.assertEqual(models.convergence_epoch([5.0, 3.0, 2.0], tolerance=0.6), 2)
        with self.assertRaises(UsageError):
            models.convergence_epoch([])

    def test09_training(self):
        """
        Tests the regressor training loop.
        """
        values = 0.5 + 0.4 * numpy.sin(numpy.arange(140) / 5.0)
        train = make_windows(values[:100], 5)
        validation = make_windows(values[100:], 5, 100)
        encoder = AutoencoderWeights.create(2, 5, self.rng)

        for token in ('A-classic-Q2', 'A-hybrid-Q2'):
            model, history = models.train_regressor(models.build_model(token, seed=0), encoder, train,
                                                    epochs=5, batch_size=16, seed=0, learning_rate=0.01,
                                                    validation=validation)
            self.assertEqual(len(history.loss), 5)
            self.assertEqual(len(history.val_loss), 5)
            self.assertLess(history.loss[-1], history.loss[0], token)
            self.assertEqual(history.to_dict()['loss'], history.loss)

            again = models.train_regressor(models.build_model(token, seed=0), encoder, train, epochs=5,
                                           batch_size=16, seed=0, learning_rate=0.01, validation=validation)
            self.assertEqual(history.loss, again[1].loss)
            self.assertTrue(numpy.array_equal(model.parameters().flat_params(), again[0].parameters().flat_params()))

        model, history = models.train_regressor(models.build_model('B-classic-Q2'), encoder, train, epochs=2)
        self.assertEqual(history.val_loss, [])
        guess = model.predict(encode_many(encoder, train.inputs))
        self.assertEqual(guess.shape, (len(train),))

        with self.assertRaises(UsageError):
            models.train_regressor(model, encoder, train.subset(numpy.zeros(0, dtype=int)))

    def test10_persistence(self):
        """
        Tests writing and reading regressor checkpoints.
        """
        latents = self.rng.uniform(-1, 1, size=(4, 2))
        for token in TOKENS:
            model = models.build_model(token, seed=12, angle_scale=1.5, layers_per_block=2)
            filename = models.save_regressor(model, os.path.join(self.folder, token + '.json'), {'fold': 1})
            loaded = models.load_regressor(filename)
            self.assertEqual(loaded.label, model.label)
            self.assertEqual(loaded.describe(), model.describe())
            self.assertTrue(numpy.array_equal(loaded.predict(latents), model.predict(latents)), token)


if __name__ == '__main__':
    unittest.main()
