"""
The four next-step regressors and their training loop.

Every regressor reads the N_q latent features of a window and ends in a single linear
neuron.  The two scenarios pair a classical stage with a quantum stage of matching
size:

* Scenario A: a dense tanh layer of 2^N_q neurons (classic) against one N_q qubit
  embedding and entangling block (hybrid).
* Scenario B: an LSTM of N_q units reading the latent as N_q scalar timesteps
  (classic) against an N_q qubit circuit with N_q re-uploading blocks (hybrid).

All four share the :class:`Regressor` interface, so the training loop and the
cross-validation harness never look at the variant.

:author:  qforecast developers
:version: October 17, 2026
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import checkpoint, filetools
from .autoencoder import encode_many
from .errors import ConfigurationError, InternalError, UsageError
from .nn import (DenseLayer, LstmCell, ParameterBundle, AdamState, adam_update, clip_global_norm,
                 lstm_forward, lstm_backward_through_time, mse_loss, mse_loss_and_grad)
from .qsim import ReuploadCircuitSpec, run_reupload_circuit, circuit_gradient

logger = logging.getLogger(__name__)

SCENARIOS = ('A', 'B')
VARIANTS = ('classic', 'hybrid')

# Bounds of the qubit count of a model
MIN_QUBITS = 2
MAX_QUBITS = 14


@dataclass(frozen=True)
class ModelLabel:
    """
    The identity of a model: scenario, variant and qubit count.

    The token form is ``A-classic-Q4`` and the display name is ``Q4``.
    """
    scenario: str
    variant: str
    n_q: int

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise UsageError('%s is not a scenario; choose one of %s' % (repr(self.scenario), ', '.join(SCENARIOS)))
        if self.variant not in VARIANTS:
            raise UsageError('%s is not a variant; choose one of %s' % (repr(self.variant), ', '.join(VARIANTS)))
        if not isinstance(self.n_q, (int, np.integer)) or isinstance(self.n_q, bool) \
                or not MIN_QUBITS <= self.n_q <= MAX_QUBITS:
            raise ConfigurationError('%s is not a qubit count in %d..%d' % (repr(self.n_q), MIN_QUBITS, MAX_QUBITS))

    @property
    def name(self):
        """
        The display name, such as ``Q4``.
        """
        return 'Q%d' % self.n_q

    @property
    def token(self):
        """
        The label as a single token, such as ``A-classic-Q4``.
        """
        return '%s-%s-%s' % (self.scenario, self.variant, self.name)

    def __str__(self):
        return self.token

    def sort_key(self):
        """
        :return: The key ordering labels by scenario, qubit count and variant
        :rtype:  ``tuple``
        """
        return (self.scenario, self.n_q, VARIANTS.index(self.variant))

    @classmethod
    def parse(cls, token):
        """
        Returns the label written as ``token``.

        :param token: A label such as ``B-hybrid-Q6``
        :type token:  ``str``

        :return: The label
        :rtype:  :class:`ModelLabel`
        """
        parts = str(token).split('-')
        if len(parts) != 3 or not parts[2][:1] in ('Q', 'q') or not parts[2][1:].isdigit():
            raise UsageError('%s is not a model label like A-classic-Q4' % repr(token))
        return cls(parts[0].upper(), parts[1].lower(), int(parts[2][1:]))


class Regressor(object):
    """
    An instance is a trainable map from latent vectors to one prediction.

    Subclasses build their layers in ``__init__`` and implement :meth:`_forward` and
    :meth:`_backward` on batches.  The public methods accept one latent vector or a
    batch of rows.
    """
    # PRIVATE ATTRIBUTES:
    #    _stack : the batches seen by cached forward passes, most recent last

    @property
    def label(self):
        """
        The identity of this model.

        **Invariant**: Value is a :class:`ModelLabel`.
        """
        return self._label

    @property
    def n_q(self):
        """
        The latent width.

        **Invariant**: Value is an ``int`` in 2..14.
        """
        return self._label.n_q

    @property
    def n_parameters(self):
        """
        The number of trainable scalars.

        **Invariant**: Value is an ``int`` > 0.
        """
        return self.parameters().size()

    def __init__(self, label):
        """
        Initializes the common state.

        :param label: The model identity
        :type label:  :class:`ModelLabel`
        """
        self._label = label
        self._stack = []

    def __repr__(self):
        """
        :return: An unambiguous string representation of this model.
        :rtype:  ``str``
        """
        return '%s(%s)' % (type(self).__name__, self._label.token)

    def parameters(self):
        """
        :return: Every trainable parameter with its gradient slot
        :rtype:  :class:`~qforecast.nn.ParameterBundle`
        """
        raise NotImplementedError

    def describe(self):
        """
        :return: The structural metadata of this model
        :rtype:  ``dict``
        """
        return {'label': self._label.token, 'scenario': self._label.scenario,
                'variant': self._label.variant, 'n_q': self.n_q, 'n_parameters': self.n_parameters}

    def clear_cache(self):
        """
        Discards every cached forward pass.
        """
        self._stack = []
        self.output.clear_cache()

    def forward(self, latents, cache=True):
        """
        Returns the predictions for one latent vector or a batch of rows.

        :param latents: The latent of length N_q, or (batch, N_q)
        :type latents:  ``numpy.ndarray``

        :param cache: Whether to keep the activations for :meth:`backward`
        :type cache:  ``bool``

        :return: A scalar prediction, or one per row
        :rtype:  ``float`` or ``numpy.ndarray``
        """
        latents = np.asarray(latents, dtype=float)
        batched = latents.ndim == 2
        batch = np.atleast_2d(latents)
        if batch.ndim != 2 or batch.shape[1] != self.n_q:
            raise UsageError('latent of shape %s does not match n_q=%d' % (repr(latents.shape), self.n_q))
        features = self._forward(batch, cache)
        result = self.output.forward(features, cache)[:, 0]
        if cache:
            self._stack.append((batch, batched))
        return result if batched else float(result[0])

    def backward(self, upstream):
        """
        Adds the gradients of the latest cached pass to the gradient slots.

        The latents receive no gradient; the encoder is frozen.

        :param upstream: The loss gradient for each prediction
        :type upstream:  ``float`` or ``numpy.ndarray``
        """
        if not self._stack:
            raise InternalError('%s has no forward pass to differentiate' % repr(self))
        batch, batched = self._stack.pop()
        upstream = np.asarray(upstream, dtype=float).reshape(batch.shape[0], 1)
        d_features = self.output.backward(upstream)
        self._backward(batch, d_features)

    def predict(self, latents):
        """
        Returns the predictions without caching anything.

        :param latents: The latent of length N_q, or (batch, N_q)
        :type latents:  ``numpy.ndarray``

        :return: A scalar prediction, or one per row
        :rtype:  ``float`` or ``numpy.ndarray``
        """
        return self.forward(latents, False)

    def _forward(self, batch, cache):
        """
        Returns the (batch, width) input of the output neuron. [ABSTRACT]
        """
        raise NotImplementedError

    def _backward(self, batch, d_features):
        """
        Backpropagates the output neuron's input gradient. [ABSTRACT]
        """
        raise NotImplementedError


class RegressorA_Classic(Regressor):
    """
    Scenario A classic: a dense tanh layer of 2^N_q neurons and the output neuron.
    """

    def __init__(self, label, rng=None):
        super().__init__(label)
        width = 2 ** label.n_q
        self.hidden = DenseLayer.create(label.n_q, width, 'tanh', rng)
        self.output = DenseLayer.create(width, 1, 'linear', rng)

    def parameters(self):
        bundle = ParameterBundle()
        bundle.extend('hidden', self.hidden.parameters())
        bundle.extend('output', self.output.parameters())
        return bundle

    def describe(self):
        result = super().describe()
        result['hidden_width'] = self.hidden.out_dim
        return result

    def clear_cache(self):
        super().clear_cache()
        self.hidden.clear_cache()

    def _forward(self, batch, cache):
        return self.hidden.forward(batch, cache)

    def _backward(self, batch, d_features):
        self.hidden.backward(d_features)


class _HybridRegressor(Regressor):
    """
    The common part of the quantum regressors: a re-upload circuit read out as N_q
    Pauli-Z expectations, followed by the output neuron.

    :ivar quantum: The circuit with its entangling angles
    :vartype quantum: :class:`~qforecast.qsim.ReuploadCircuitSpec`

    :ivar circuit_evaluations: The circuit runs spent on gradients so far
    :vartype circuit_evaluations: ``int``
    """

    def __init__(self, label, n_blocks, rng=None, angle_scale=math.pi, layers_per_block=1):
        super().__init__(label)
        if rng is None:
            self.quantum = ReuploadCircuitSpec.zeros(label.n_q, n_blocks, layers_per_block, angle_scale)
        else:
            self.quantum = ReuploadCircuitSpec.random(label.n_q, n_blocks, rng, layers_per_block, angle_scale)
        self.grad_quantum = np.zeros_like(self.quantum.weights)
        self.output = DenseLayer.create(label.n_q, 1, 'linear', rng)
        self.circuit_evaluations = 0

    def parameters(self):
        bundle = ParameterBundle([('quantum.weights', self.quantum.weights, self.grad_quantum)])
        bundle.extend('output', self.output.parameters())
        return bundle

    def describe(self):
        result = super().describe()
        result['qubits'] = self.quantum.n_qubits
        result['blocks'] = self.quantum.n_blocks
        result['layers_per_block'] = self.quantum.layers_per_block
        result['angle_scale'] = self.quantum.angle_scale
        return result

    def _forward(self, batch, cache):
        return run_reupload_circuit(self.quantum, batch).values

    def _backward(self, batch, d_features):
        gradient = circuit_gradient(self.quantum, batch, d_features, wrt_features=False)
        self.grad_quantum += gradient.weights
        self.circuit_evaluations += gradient.evaluations


class RegressorA_Hybrid(_HybridRegressor):
    """
    Scenario A hybrid: one embedding and entangling block on N_q qubits.
    """

    def __init__(self, label, rng=None, angle_scale=math.pi, layers_per_block=1):
        super().__init__(label, 1, rng, angle_scale, layers_per_block)


class RegressorB_Hybrid(_HybridRegressor):
    """
    Scenario B hybrid: N_q re-uploading blocks on N_q qubits.
    """

    def __init__(self, label, rng=None, angle_scale=math.pi, layers_per_block=1):
        super().__init__(label, label.n_q, rng, angle_scale, layers_per_block)


class RegressorB_Classic(Regressor):
    """
    Scenario B classic: an LSTM of N_q units that reads the latent as N_q scalar
    timesteps, and the output neuron on its final hidden state.
    """

    def __init__(self, label, rng=None):
        super().__init__(label)
        self.lstm = LstmCell.create(1, label.n_q, rng)
        self.output = DenseLayer.create(label.n_q, 1, 'linear', rng)

    def parameters(self):
        bundle = ParameterBundle()
        bundle.extend('lstm', self.lstm.parameters())
        bundle.extend('output', self.output.parameters())
        return bundle

    def describe(self):
        result = super().describe()
        result['recursions'] = self.n_q
        result['units'] = self.lstm.hidden_dim
        return result

    def clear_cache(self):
        super().clear_cache()
        self.lstm.clear_cache()

    def _forward(self, batch, cache):
        hidden, h, c = lstm_forward(self.lstm, batch.T[:, :, np.newaxis], cache)
        return h

    def _backward(self, batch, d_features):
        lstm_backward_through_time(self.lstm, d_h_final=d_features)


def build_model(label, seed=0, angle_scale=math.pi, layers_per_block=1):
    """
    Returns a freshly initialized regressor for ``label``.

    The parameters are drawn from ``numpy.random.default_rng(seed)``.  With
    ``seed=None`` every parameter is zero.

    :param label: The model identity (or its token)
    :type label:  :class:`ModelLabel` or ``str``

    :param seed: The initialization seed
    :type seed:  ``int`` or ``None``

    :param angle_scale: The embedding scale of the hybrid circuits
    :type angle_scale:  ``float``

    :param layers_per_block: The entangling layers in each hybrid block
    :type layers_per_block:  ``int``

    :return: The regressor
    :rtype:  :class:`Regressor`
    """
    if isinstance(label, str):
        label = ModelLabel.parse(label)
    rng = None if seed is None else np.random.default_rng(seed)
    if label.variant == 'classic':
        if label.scenario == 'A':
            return RegressorA_Classic(label, rng)
        return RegressorB_Classic(label, rng)
    if label.scenario == 'A':
        return RegressorA_Hybrid(label, rng, angle_scale, layers_per_block)
    return RegressorB_Hybrid(label, rng, angle_scale, layers_per_block)


pass
# #mark -
# #mark Training

@dataclass
class TrainingHistory:
    """
    The per-epoch losses of one training run.

    ``loss`` holds the sample-weighted mean training MSE of each epoch and
    ``val_loss`` the validation MSE after each epoch (empty without validation data).
    """
    loss: list
    val_loss: list

    def to_dict(self):
        """
        :return: The history as a dictionary
        :rtype:  ``dict``
        """
        return {'loss': list(self.loss), 'val_loss': list(self.val_loss)}


def train_regressor(regressor, encoder, windows, epochs=20, batch_size=32, seed=0,
                    learning_rate=0.0005, validation=None, clip_norm=5.0):
    """
    Trains ``regressor`` with Adam on the latents of ``windows``.

    The windows are encoded once with the frozen encoder.  Batches are reshuffled
    every epoch from ``seed``, so the same seed gives the same history.

    :param regressor: The model to train (updated in place)
    :type regressor:  :class:`Regressor`

    :param encoder: The trained autoencoder
    :type encoder:  :class:`~qforecast.autoencoder.AutoencoderWeights`

    :param windows: The normalized training windows
    :type windows:  :class:`~qforecast.data.WindowSet`

    :param epochs: The number of passes over the data
    :type epochs:  ``int``

    :param batch_size: The number of windows per Adam step
    :type batch_size:  ``int``

    :param seed: The shuffling seed
    :type seed:  ``int``

    :param validation: Windows scored after every epoch
    :type validation:  :class:`~qforecast.data.WindowSet` or ``None``

    :return: The regressor and its history
    :rtype:  ``tuple``
    """
    if len(windows) == 0:
        raise UsageError('cannot train %s on an empty window set' % repr(regressor))
    if epochs < 1 or batch_size < 1:
        raise UsageError('epochs %s and batch size %s must be positive' % (repr(epochs), repr(batch_size)))

    latents = encode_many(encoder, windows.inputs)
    targets = windows.targets
    val_latents = None
    if validation is not None and len(validation):
        val_latents = encode_many(encoder, validation.inputs)

    rng = np.random.default_rng(seed)
    bundle = regressor.parameters()
    state = AdamState(learning_rate)
    count = targets.size
    history = TrainingHistory([], [])
    for epoch in range(epochs):
        order = rng.permutation(count)
        total = 0.0
        for pos in range(0, count, batch_size):
            rows = order[pos:pos + batch_size]
            bundle.zero_grad()
            pred = regressor.forward(latents[rows])
            loss, grad = mse_loss_and_grad(pred, targets[rows])
            regressor.backward(grad)
            clip_global_norm(bundle, clip_norm)
            adam_update(state, bundle)
            total += loss * rows.size
        history.loss.append(total / count)
        if val_latents is not None:
            history.val_loss.append(mse_loss(regressor.predict(val_latents), validation.targets))
            logger.info('model=%s epoch=%d loss=%.6g val_loss=%.6g', regressor.label.token,
                        epoch + 1, history.loss[-1], history.val_loss[-1])
        else:
            logger.info('model=%s epoch=%d loss=%.6g', regressor.label.token, epoch + 1, history.loss[-1])
    regressor.clear_cache()
    return regressor, history


def convergence_epoch(losses, tolerance=0.05):
    """
    Returns the first epoch (counting from 1) whose loss is within ``tolerance`` of
    the final loss.

    :param losses: The per-epoch losses
    :type losses:  ``list`` of ``float``

    :param tolerance: The relative distance allowed
    :type tolerance:  ``float``

    :return: The convergence epoch
    :rtype:  ``int``
    """
    if not len(losses):
        raise UsageError('an empty history has no convergence epoch')
    final = float(losses[-1])
    bound = tolerance * abs(final)
    for pos, loss in enumerate(losses):
        if abs(float(loss) - final) <= bound:
            return pos + 1
    return len(losses)


pass
# #mark -
# #mark Persistence

def save_regressor(regressor, filename, metadata=None):
    """
    Writes a regressor to a checkpoint tagged with its label.

    :param regressor: The model to store
    :type regressor:  :class:`Regressor`

    :param filename: The file to write
    :type filename:  ``str``

    :return: The name of the file written
    :rtype:  ``str``
    """
    record = dict(metadata or {})
    record['model'] = regressor.describe()
    return checkpoint.save_checkpoint(regressor.parameters(), filename, regressor.label.token, record)


def load_regressor(filename):
    """
    Reads a regressor from a checkpoint written by :func:`save_regressor`.

    :param filename: The file to read
    :type filename:  ``str``

    :return: The regressor
    :rtype:  :class:`Regressor`
    """
    document = filetools.read_json(filename)
    if type(document) != dict:
        raise UsageError('%s is not a model checkpoint' % repr(filename))
    model = document.get('metadata', {}).get('model', {})
    regressor = build_model(document.get('label', ''), None,
                            model.get('angle_scale', math.pi), model.get('layers_per_block', 1))
    checkpoint.decode_into(document, regressor.parameters())
    return regressor
