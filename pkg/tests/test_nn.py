"""
Unit test for the classical learning core

The gradient tests compare every backward pass against central differences.

:author:  qforecast developers
:version: October 17, 2026
"""
import unittest

import numpy

from qforecast import nn
from qforecast.errors import UsageError, InternalError


class NnTest(unittest.TestCase):
    """
    Unit test for the nn package
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
        Initializes a unit test with a fixed generator
        """
        self.rng = numpy.random.default_rng(2024)

    def tearDown(self):
        """
        Completes a unit test (UNUSED)
        """
        pass

    def test01_activations(self):
        """
        Tests the activation table and its derivatives.
        """
        self.assertAlmostEqual(float(nn.sigmoid(0.0)), 0.5)
        self.assertClose(nn.sigmoid(numpy.array([-1000.0, 1000.0])), [0, 1])
        with self.assertRaises(UsageError):
            nn.get_activation('softmax')

        z = numpy.array([-1.3, -0.2, 0.4, 2.1])
        step = 1e-6
        for name in ('linear', 'tanh', 'sigmoid', 'relu'):
            func, deriv = nn.get_activation(name)
            numeric = (func(z + step) - func(z - step)) / (2 * step)
            self.assertClose(deriv(z, func(z)), numeric, atol=1e-6)

    def test02_glorot(self):
        """
        Tests the bounds of the Glorot initializer.
        """
        matrix = nn.glorot_uniform(self.rng, 4, 6)
        self.assertEqual(matrix.shape, (4, 6))
        self.assertTrue(numpy.all(numpy.abs(matrix) <= numpy.sqrt(6.0 / 10)))
        self.assertTrue(numpy.any(matrix != 0))

    def test03_bundle(self):
        """
        Tests parameter bundles.
        """
        a = numpy.zeros((2, 3))
        b = numpy.ones(2)
        bundle = nn.ParameterBundle([('a', a, numpy.zeros_like(a))])
        bundle.add('b', b, numpy.zeros_like(b))
        self.assertEqual(bundle.names(), ['a', 'b'])
        self.assertEqual(len(bundle), 2)
        self.assertEqual(bundle.size(), 8)
        self.assertIs(bundle.get('b'), b)

        with self.assertRaises(UsageError):
            bundle.add('a', a, numpy.zeros_like(a))
        with self.assertRaises(InternalError):
            bundle.add('c', a, numpy.zeros(3))
        with self.assertRaises(UsageError):
            bundle.get('missing')

        bundle.set_flat_params(numpy.arange(8.0))
        self.assertClose(a, [[0, 1, 2], [3, 4, 5]])
        self.assertClose(b, [6, 7])
        self.assertClose(bundle.flat_params(), numpy.arange(8.0))

        outer = nn.ParameterBundle()
        outer.extend('layer', bundle)
        self.assertEqual(outer.names(), ['layer.a', 'layer.b'])
        self.assertIs(outer.get('layer.a'), a)

    def test04_clip(self):
        """
        Tests global norm clipping.
        """
        param = numpy.zeros(2)
        grad = numpy.array([3.0, 4.0])
        bundle = nn.ParameterBundle([('p', param, grad)])
        self.assertAlmostEqual(nn.clip_global_norm(bundle, 10.0), 5.0)
        self.assertClose(grad, [3, 4])
        self.assertAlmostEqual(nn.clip_global_norm(bundle, None), 5.0)
        self.assertClose(grad, [3, 4])
        self.assertAlmostEqual(nn.clip_global_norm(bundle, 1.0), 5.0)
        self.assertClose(grad, [0.6, 0.8])
        self.assertAlmostEqual(bundle.global_norm(), 1.0)

    def test05_loss(self):
        """
        Tests the mean squared error and its gradient.
        """
        self.assertAlmostEqual(nn.mse_loss([0.0, 0.0], [1.0, -1.0]), 1.0)
        loss, grad = nn.mse_loss_and_grad(numpy.array([0.0, 0.0]), numpy.array([1.0, -1.0]))
        self.assertAlmostEqual(loss, 1.0)
        self.assertClose(grad, [-1, 1])

        pred = self.rng.normal(size=(4, 3))
        target = self.rng.normal(size=(4, 3))
        loss, grad = nn.mse_loss_and_grad(pred, target)
        self.assertAlmostEqual(loss, float(numpy.mean((pred - target) ** 2)))
        self.assertClose(grad, 2 * (pred - target) / 12)

        with self.assertRaises(UsageError):
            nn.mse_loss([1.0, 2.0], [1.0])
        with self.assertRaises(UsageError):
            nn.mse_loss([], [])

    def test06_dense_forward(self):
        """
        Tests dense layers on vectors and batches.
        """
        layer = nn.DenseLayer.create(3, 2, 'tanh')
        self.assertEqual((layer.in_dim, layer.out_dim), (3, 2))
        self.assertClose(layer.forward(numpy.ones(3), cache=False), [0, 0])

        layer = nn.DenseLayer.create(3, 2, 'tanh', rng=self.rng)
        layer.biases[:] = [0.1, -0.2]
        x = self.rng.normal(size=(5, 3))
        batch = layer.forward(x, cache=False)
        self.assertEqual(batch.shape, (5, 2))
        for row in range(5):
            self.assertClose(layer.forward(x[row], cache=False), batch[row])
        self.assertClose(batch, numpy.tanh(x @ layer.weights.T + layer.biases))

        with self.assertRaises(UsageError):
            layer.forward(numpy.ones(4))
        with self.assertRaises(UsageError):
            nn.DenseLayer(numpy.ones((2, 3)), numpy.ones(3))

    def test07_dense_gradient(self):
        """
        Tests dense backpropagation against central differences.
        """
        for activation in ('linear', 'tanh', 'sigmoid'):
            layer = nn.DenseLayer.create(3, 2, activation, rng=self.rng)
            layer.biases[:] = self.rng.normal(size=2)
            x = self.rng.normal(size=(5, 3))
            upstream = self.rng.normal(size=(5, 2))
            dx = numpy.zeros_like(x)

            def loss():
                return float(numpy.sum(upstream * layer.forward(x, cache=False)))

            bundle = layer.parameters()
            bundle.zero_grad()
            nn.dense_forward(layer, x)
            dx[...] = nn.dense_backward(layer, upstream)
            self.assertLess(nn.gradient_check(loss, bundle, step=1e-5, floor=1e-5), 1e-4)

            inputs = nn.ParameterBundle([('x', x, dx)])
            self.assertLess(nn.gradient_check(loss, inputs, step=1e-5, floor=1e-5), 1e-4)

    def test08_dense_stack(self):
        """
        Tests that backward passes pop the forward passes in reverse order.
        """
        layer = nn.DenseLayer.create(2, 2, 'tanh', rng=self.rng)
        x1 = numpy.array([0.3, -0.7])
        x2 = numpy.array([1.1, 0.4])
        a1 = layer.forward(x1)
        a2 = layer.forward(x2)
        upstream = numpy.array([1.0, -2.0])

        self.assertClose(layer.backward(upstream), (upstream * (1 - a2 * a2)) @ layer.weights)
        self.assertClose(layer.backward(upstream), (upstream * (1 - a1 * a1)) @ layer.weights)
        with self.assertRaises(InternalError):
            layer.backward(upstream)

        layer.forward(x1)
        with self.assertRaises(InternalError):
            layer.backward(numpy.ones(3))
        layer.forward(x1)
        layer.clear_cache()
        with self.assertRaises(InternalError):
            layer.backward(upstream)

    def test09_lstm_create(self):
        """
        Tests LSTM cell creation and a single step.
        """
        cell = nn.LstmCell.create(2, 3)
        self.assertEqual((cell.input_dim, cell.hidden_dim), (2, 3))
        h, c = nn.lstm_step(cell, numpy.ones(2), numpy.zeros(3), numpy.zeros(3))
        self.assertClose(h, [0, 0, 0])
        self.assertClose(c, [0, 0, 0])
        self.assertEqual(cell.parameters().size(), 4 * (2 * 3 + 3 * 3 + 3))

        cell = nn.LstmCell.create(2, 3, rng=self.rng)
        self.assertClose(cell.b['f'], [1, 1, 1])
        self.assertClose(cell.b['i'], [0, 0, 0])
        self.assertEqual(cell.parameters().names()[:2], ['W_i', 'W_f'])

        x = self.rng.normal(size=2)
        h_prev = self.rng.normal(size=3)
        c_prev = self.rng.normal(size=3)
        gate = lambda name, func: func(cell.W[name] @ x + cell.U[name] @ h_prev + cell.b[name])
        i = gate('i', nn.sigmoid)
        f = gate('f', nn.sigmoid)
        g = gate('g', numpy.tanh)
        o = gate('o', nn.sigmoid)
        h, c = nn.lstm_step(cell, x, h_prev, c_prev)
        self.assertClose(c, f * c_prev + i * g)
        self.assertClose(h, o * numpy.tanh(f * c_prev + i * g))

        with self.assertRaises(UsageError):
            nn.lstm_step(cell, numpy.ones(3), h_prev, c_prev)
        with self.assertRaises(UsageError):
            nn.lstm_step(cell, x, h_prev, numpy.zeros(2))

    def test10_lstm_forward(self):
        """
        Tests LSTM sequences, single and batched.
        """
        cell = nn.LstmCell.create(2, 4, rng=self.rng)
        sequence = self.rng.normal(size=(6, 2))
        hidden, h, c = nn.lstm_forward(cell, sequence, cache=False)
        self.assertEqual(hidden.shape, (6, 4))
        self.assertClose(hidden[-1], h)

        state = (numpy.zeros(4), numpy.zeros(4))
        for t in range(6):
            state = nn.lstm_step(cell, sequence[t], *state)
            self.assertClose(hidden[t], state[0])
        self.assertClose(c, state[1])

        batch = self.rng.normal(size=(6, 3, 2))
        hidden, h, c = nn.lstm_forward(cell, batch, cache=False)
        self.assertEqual(hidden.shape, (6, 3, 4))
        for row in range(3):
            single = nn.lstm_forward(cell, batch[:, row, :], cache=False)
            self.assertClose(hidden[:, row, :], single[0])
            self.assertClose(c[row], single[2])

        with self.assertRaises(UsageError):
            nn.lstm_forward(cell, numpy.zeros((0, 2)))
        with self.assertRaises(UsageError):
            nn.lstm_forward(cell, numpy.zeros((4, 3)))

    def test11_lstm_gradient(self):
        """
        Tests backpropagation through time against central differences.
        """
        cell = nn.LstmCell.create(2, 3, rng=self.rng)
        for gate in nn.lstm.GATES:
            cell.b[gate][:] = self.rng.normal(scale=0.3, size=3)
        sequence = self.rng.normal(size=(5, 4, 2))
        d_hidden = self.rng.normal(size=(5, 4, 3))
        d_h = self.rng.normal(size=(4, 3))
        d_c = self.rng.normal(size=(4, 3))
        d_sequence = numpy.zeros_like(sequence)

        def loss():
            hidden, h, c = nn.lstm_forward(cell, sequence, cache=False)
            return float(numpy.sum(d_hidden * hidden) + numpy.sum(d_h * h) + numpy.sum(d_c * c))

        bundle = cell.parameters()
        bundle.zero_grad()
        nn.lstm_forward(cell, sequence)
        d_sequence[...] = nn.lstm_backward_through_time(cell, d_hidden, d_h, d_c)
        self.assertLess(nn.gradient_check(loss, bundle, step=1e-5, floor=1e-5), 1e-4)

        inputs = nn.ParameterBundle([('sequence', sequence, d_sequence)])
        self.assertLess(nn.gradient_check(loss, inputs, step=1e-5, floor=1e-5), 1e-4)

        with self.assertRaises(InternalError):
            nn.lstm_backward_through_time(cell, d_hidden)

    def test12_lstm_final_only(self):
        """
        Tests backpropagation from the final hidden state of one sequence.
        """
        cell = nn.LstmCell.create(1, 2, rng=self.rng)
        sequence = self.rng.normal(size=(4, 1))
        weights = numpy.array([0.7, -1.2])
        d_sequence = numpy.zeros_like(sequence)

        def loss():
            return float(weights @ nn.lstm_forward(cell, sequence, cache=False)[1])

        bundle = cell.parameters()
        bundle.zero_grad()
        nn.lstm_forward(cell, sequence)
        d_sequence[...] = nn.lstm_backward_through_time(cell, d_h_final=weights)
        self.assertLess(nn.gradient_check(loss, bundle, step=1e-5, floor=1e-5), 1e-4)
        inputs = nn.ParameterBundle([('sequence', sequence, d_sequence)])
        self.assertLess(nn.gradient_check(loss, inputs, step=1e-5, floor=1e-5), 1e-4)

        nn.lstm_forward(cell, sequence)
        with self.assertRaises(InternalError):
            nn.lstm_backward_through_time(cell, d_hidden=numpy.zeros((3, 2)))

    def test13_adam_step(self):
        """
        Tests the bias-corrected first Adam step.
        """
        with self.assertRaises(UsageError):
            nn.AdamState(0.0)

        param = numpy.array([1.0, -2.0, 0.5])
        grad = numpy.array([0.3, -4.0, 0.0])
        bundle = nn.ParameterBundle([('p', param, grad)])
        state = nn.AdamState(learning_rate=0.1)
        nn.adam_update(state, bundle)
        self.assertEqual(state.t, 1)
        expected = numpy.array([1.0, -2.0, 0.5]) - 0.1 * grad / (numpy.abs(grad) + 1e-8)
        self.assertClose(param, expected, atol=1e-12)

        grad[...] = 0.0
        before = param.copy()
        nn.adam_update(state, bundle)
        self.assertEqual(state.t, 2)
        self.assertTrue(numpy.all(numpy.abs(param - before) <= 0.1))

        other = nn.ParameterBundle([('p', param, grad), ('q', numpy.zeros(1), numpy.zeros(1))])
        with self.assertRaises(InternalError):
            nn.adam_update(state, other)

    def test14_adam_descent(self):
        """
        Tests that Adam reduces a convex loss on every epoch until it is below 1e-6.
        """
        target = numpy.array([1.0, -1.0, 1.0, -1.0])
        param = numpy.zeros(4)
        grad = numpy.zeros(4)
        bundle = nn.ParameterBundle([('p', param, grad)])
        state = nn.AdamState(learning_rate=0.002)
        losses = []
        while state.t < 20000:
            loss, grad[...] = nn.mse_loss_and_grad(param, target)
            losses.append(loss)
            if loss < 1e-6:
                break
            nn.adam_update(state, bundle)
        self.assertLess(losses[-1], 1e-6)
        for pos in range(1, len(losses)):
            self.assertLess(losses[pos], losses[pos - 1])

    def test15_relative_error(self):
        """
        Tests the gradient comparison.
        """
        self.assertEqual(nn.relative_error([], []), 0.0)
        self.assertLess(nn.relative_error([1.0, 2.0], [1.0 + 1e-9, 2.0]), 1e-8)
        self.assertAlmostEqual(nn.relative_error([0.0], [1e-9], floor=1e-6), 1e-3)
        self.assertAlmostEqual(nn.relative_error([2.0], [1.0]), 0.5)

        param = numpy.array([0.5, -1.5])
        grad = numpy.zeros(2)
        bundle = nn.ParameterBundle([('p', param, grad)])
        loss = lambda: float(numpy.sum(param ** 2))
        self.assertClose(nn.numerical_gradient(loss, bundle), [1.0, -3.0], atol=1e-6)
        self.assertClose(param, [0.5, -1.5], atol=0)
        grad[...] = [1.0, -3.0]
        self.assertLess(nn.gradient_check(loss, bundle), 1e-6)


if __name__ == '__main__':
    unittest.main()
