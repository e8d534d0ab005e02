"""
Unit test for the autoencoder module

:author:  qforecast developers
:version: October 17, 2026
"""
import os.path
import shutil
import tempfile
import unittest

import numpy

from qforecast import autoencoder, data, filetools
from qforecast.errors import UsageError
from qforecast.nn import gradient_check, mse_loss, mse_loss_and_grad


def sine_windows(count=64, w=5):
    """
    Returns normalized windows of a slow sine wave.
    """
    values = 0.5 + 0.4 * numpy.sin(numpy.arange(count + w) / 4.0)
    return data.make_windows(values, w)


class AutoencoderTest(unittest.TestCase):
    """
    Unit test for the autoencoder module
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
        Creates a scratch folder for checkpoints
        """
        self.folder = tempfile.mkdtemp()
        self.rng = numpy.random.default_rng(99)

    def tearDown(self):
        """
        Removes the scratch folder
        """
        shutil.rmtree(self.folder, ignore_errors=True)

    def test01_shapes(self):
        """
        Tests the layer sizes of a fresh autoencoder.
        """
        weights = autoencoder.AutoencoderWeights.create(4, 20, self.rng)
        self.assertEqual(weights.n_q, 4)
        self.assertEqual(weights.window, 20)
        self.assertEqual(weights.epochs_run, 0)
        self.assertIsNone(weights.final_loss)

        h = autoencoder.HIDDEN_UNITS
        encoder = 4 * (h + h * h + h) + (h * 4 + 4)
        decoder = (4 * h + h) + 4 * (h * h + h * h + h) + (h + 1)
        self.assertEqual(weights.encoder.parameters().size(), encoder)
        self.assertEqual(weights.decoder.parameters().size(), decoder)
        bundle = weights.parameters()
        self.assertEqual(bundle.size(), encoder + decoder)
        self.assertEqual(bundle.names()[0], 'encoder.lstm.W_i')
        self.assertEqual(bundle.names()[-1], 'decoder.readout.biases')

        with self.assertRaises(UsageError):
            autoencoder.AutoencoderWeights(autoencoder.EncoderSpec.create(3), autoencoder.DecoderSpec.create(4))

    def test02_encode(self):
        """
        Tests the latent features of single windows and batches.
        """
        weights = autoencoder.AutoencoderWeights.create(3, 6, self.rng)
        windows = self.rng.uniform(0, 1, size=(10, 6))
        latents = autoencoder.encode(weights, windows)
        self.assertEqual(latents.shape, (10, 3))
        self.assertTrue(numpy.all(numpy.abs(latents) < 1))
        self.assertClose(autoencoder.encode(weights, windows[4]), latents[4])
        self.assertClose(autoencoder.encode_many(weights, windows, batch_size=3), latents)
        self.assertEqual(autoencoder.encode_many(weights, numpy.zeros((0, 6))).shape, (0, 3))
        self.assertIsNone(weights.encoder.lstm._trace)

        with self.assertRaises(UsageError):
            autoencoder.encode(weights, numpy.zeros(5))
        with self.assertRaises(UsageError):
            autoencoder.encode_many(weights, numpy.zeros((2, 7)))

    def test03_decode(self):
        """
        Tests reconstructions, including the all-zero autoencoder.
        """
        blank = autoencoder.AutoencoderWeights.create(3, 5)
        self.assertClose(autoencoder.decode(blank, [0.3, -0.2, 0.9]), numpy.zeros(5))
        self.assertClose(autoencoder.encode(blank, numpy.ones(5)), numpy.zeros(3))

        weights = autoencoder.AutoencoderWeights.create(3, 5, self.rng)
        latents = self.rng.uniform(-1, 1, size=(4, 3))
        batch = autoencoder.decode(weights, latents)
        self.assertEqual(batch.shape, (4, 5))
        self.assertClose(autoencoder.decode(weights, latents[2]), batch[2])

        windows = self.rng.uniform(0, 1, size=(4, 5))
        rebuilt = autoencoder.reconstruct(weights, windows)
        self.assertAlmostEqual(autoencoder.reconstruction_mse(weights, windows), mse_loss(rebuilt, windows))

        with self.assertRaises(UsageError):
            autoencoder.decode(weights, [0.1, 0.2])

    def test04_gradient(self):
        """
        Tests backpropagation through both halves against central differences.
        """
        weights = autoencoder.AutoencoderWeights.create(2, 3, self.rng)
        batch = self.rng.uniform(0, 1, size=(2, 3))

        def loss():
            return mse_loss(autoencoder._decode(weights, autoencoder._encode(weights, batch, False), False), batch)

        bundle = weights.parameters()
        bundle.zero_grad()
        output = autoencoder._decode(weights, autoencoder._encode(weights, batch, True), True)
        value, grad = mse_loss_and_grad(output, batch)
        self.assertAlmostEqual(value, loss())
        autoencoder._backward(weights, grad)
        self.assertLess(gradient_check(loss, bundle, step=1e-5, floor=1e-5), 1e-4)

    def test05_training(self):
        """
        Tests that training is deterministic and reduces the loss.
        """
        windows = sine_windows()
        first, history = autoencoder.train_autoencoder(windows, 2, epochs=6, batch_size=16, seed=3,
                                                       learning_rate=0.01)
        self.assertEqual(len(history), 6)
        self.assertLess(history[-1], history[0])
        self.assertEqual(first.epochs_run, 6)
        self.assertEqual(first.final_loss, history[-1])
        self.assertEqual(first.history, history)

        second, again = autoencoder.train_autoencoder(windows.inputs, 2, epochs=6, batch_size=16, seed=3,
                                                      learning_rate=0.01)
        self.assertEqual(history, again)
        self.assertTrue(numpy.array_equal(first.parameters().flat_params(), second.parameters().flat_params()))

        other = autoencoder.train_autoencoder(windows, 2, epochs=1, batch_size=16, seed=4)[0]
        self.assertFalse(numpy.array_equal(first.parameters().flat_params(), other.parameters().flat_params()))

        with self.assertRaises(UsageError):
            autoencoder.train_autoencoder(numpy.zeros((0, 5)), 2)
        with self.assertRaises(UsageError):
            autoencoder.train_autoencoder(windows, 2, epochs=0)

    def test06_persistence(self):
        """
        Tests writing and reading autoencoder checkpoints.
        """
        weights = autoencoder.train_autoencoder(sine_windows(), 3, epochs=1, batch_size=32, seed=1)[0]
        filename = autoencoder.save_autoencoder(weights, os.path.join(self.folder, 'ae.json'), {'note': 'x'})
        loaded, record = autoencoder.load_autoencoder(filename)
        self.assertTrue(numpy.array_equal(weights.parameters().flat_params(), loaded.parameters().flat_params()))
        self.assertEqual((record['n_q'], record['window'], record['hidden_units']), (3, 5, 32))
        self.assertEqual(record['note'], 'x')
        self.assertEqual(loaded.epochs_run, 1)
        self.assertEqual(loaded.final_loss, weights.final_loss)
        windows = sine_windows().inputs
        self.assertTrue(numpy.array_equal(autoencoder.encode(weights, windows), autoencoder.encode(loaded, windows)))

        other = filetools.write_json({'format': 'something'}, os.path.join(self.folder, 'other.json'))
        with self.assertRaises(UsageError):
            autoencoder.load_autoencoder(other)

    def test07_cache(self):
        """
        Tests that the cache reuses matching encoders and retrains stale ones.
        """
        windows = sine_windows()
        cache = autoencoder.AutoencoderCache(os.path.join(self.folder, 'cache'))
        first = cache.train_or_load(windows, 2, epochs=1, batch_size=32, seed=7)
        files = os.listdir(cache.directory)
        self.assertEqual(len(files), 1)
        self.assertTrue(files[0].startswith('ae_Q2_s7_'))

        second = cache.train_or_load(windows, 2, epochs=1, batch_size=32, seed=7)
        self.assertTrue(numpy.array_equal(first.parameters().flat_params(), second.parameters().flat_params()))

        third = cache.train_or_load(windows, 2, epochs=2, batch_size=32, seed=7)
        self.assertEqual(third.epochs_run, 2)
        self.assertEqual(autoencoder.load_autoencoder(os.path.join(cache.directory, files[0]))[1]['epochs'], 2)

        cache.train_or_load(windows, 3, epochs=1, batch_size=32, seed=7)
        self.assertEqual(len(os.listdir(cache.directory)), 2)

        with self.assertRaises(UsageError):
            cache.train_or_load(windows, 2, epochs=1, batch_size=32, seed=None)
        self.assertEqual(len(os.listdir(cache.directory)), 2)


if __name__ == '__main__':
    unittest.main()
