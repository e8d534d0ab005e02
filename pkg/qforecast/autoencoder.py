"""
The LSTM autoencoder that compresses a window into the latent features.

The encoder runs a 32 unit LSTM over the window (one scalar per timestep) and
projects its final hidden state to N_q features through a tanh layer, so every
latent entry lies strictly inside (-1, 1).  The decoder mirrors it: the latent is
expanded back to 32 values, repeated once per timestep as the input of a second LSTM,
and a linear readout turns each hidden state into one reconstructed value.

After training only the encoder is used.  The regressors treat it as a frozen
pre-processing stage and never send gradients into it.

:author:  qforecast developers
:version: October 17, 2026
"""
import logging
import os.path

import numpy as np

from . import checkpoint, filetools
from .data import series_hash
from .errors import UsageError
from .nn import (DenseLayer, LstmCell, ParameterBundle, AdamState, adam_update, clip_global_norm,
                 lstm_forward, lstm_backward_through_time, mse_loss, mse_loss_and_grad)

logger = logging.getLogger(__name__)

# Units of both LSTM cells
HIDDEN_UNITS = 32


class EncoderSpec(object):
    """
    An instance is the encoder half: an LSTM (1 -> 32) and a tanh projection (32 -> N_q).

    :ivar lstm: The recurrent cell
    :vartype lstm: :class:`~qforecast.nn.LstmCell`

    :ivar projection: The bottleneck layer
    :vartype projection: :class:`~qforecast.nn.DenseLayer`
    """

    @property
    def n_q(self):
        """
        The number of latent features.

        **Invariant**: Value is an ``int`` >= 1.
        """
        return self.projection.out_dim

    def __init__(self, lstm, projection):
        """
        Creates an encoder from its layers.

        :param lstm: The recurrent cell (input 1, hidden 32)
        :type lstm:  :class:`~qforecast.nn.LstmCell`

        :param projection: The bottleneck (32 -> N_q, tanh)
        :type projection:  :class:`~qforecast.nn.DenseLayer`
        """
        if lstm.input_dim != 1 or lstm.hidden_dim != HIDDEN_UNITS:
            raise UsageError('encoder cell %s is not 1 -> %d' % (repr(lstm), HIDDEN_UNITS))
        if projection.in_dim != HIDDEN_UNITS or projection.activation != 'tanh':
            raise UsageError('encoder projection %s is not a tanh layer from %d' % (repr(projection), HIDDEN_UNITS))
        self.lstm = lstm
        self.projection = projection

    @classmethod
    def create(cls, n_q, rng=None):
        """
        :return: A new encoder for ``n_q`` features (all zero if ``rng`` is None)
        :rtype:  :class:`EncoderSpec`
        """
        return cls(LstmCell.create(1, HIDDEN_UNITS, rng),
                   DenseLayer.create(HIDDEN_UNITS, n_q, 'tanh', rng))

    def parameters(self):
        """
        :return: The encoder parameters
        :rtype:  :class:`~qforecast.nn.ParameterBundle`
        """
        bundle = ParameterBundle()
        bundle.extend('lstm', self.lstm.parameters())
        bundle.extend('projection', self.projection.parameters())
        return bundle


class DecoderSpec(object):
    """
    An instance is the decoder half: expansion (N_q -> 32, tanh), an LSTM (32 -> 32)
    and a linear readout (32 -> 1) applied at every timestep.

    :ivar expansion: The layer undoing the bottleneck
    :vartype expansion: :class:`~qforecast.nn.DenseLayer`

    :ivar lstm: The recurrent cell
    :vartype lstm: :class:`~qforecast.nn.LstmCell`

    :ivar readout: The per-step output layer
    :vartype readout: :class:`~qforecast.nn.DenseLayer`
    """

    def __init__(self, expansion, lstm, readout):
        """
        Creates a decoder from its layers.
        """
        if expansion.out_dim != HIDDEN_UNITS or lstm.input_dim != HIDDEN_UNITS or \
                lstm.hidden_dim != HIDDEN_UNITS or readout.in_dim != HIDDEN_UNITS or readout.out_dim != 1:
            raise UsageError('decoder layers do not mirror a %d unit encoder' % HIDDEN_UNITS)
        self.expansion = expansion
        self.lstm = lstm
        self.readout = readout

    @classmethod
    def create(cls, n_q, rng=None):
        """
        :return: A new decoder for ``n_q`` features (all zero if ``rng`` is None)
        :rtype:  :class:`DecoderSpec`
        """
        return cls(DenseLayer.create(n_q, HIDDEN_UNITS, 'tanh', rng),
                   LstmCell.create(HIDDEN_UNITS, HIDDEN_UNITS, rng),
                   DenseLayer.create(HIDDEN_UNITS, 1, 'linear', rng))

    def parameters(self):
        """
        :return: The decoder parameters
        :rtype:  :class:`~qforecast.nn.ParameterBundle`
        """
        bundle = ParameterBundle()
        bundle.extend('expansion', self.expansion.parameters())
        bundle.extend('lstm', self.lstm.parameters())
        bundle.extend('readout', self.readout.parameters())
        return bundle


class AutoencoderWeights(object):
    """
    An instance is a trained (or fresh) autoencoder with its training record.

    :ivar encoder: The encoder half
    :vartype encoder: :class:`EncoderSpec`

    :ivar decoder: The decoder half
    :vartype decoder: :class:`DecoderSpec`

    :ivar window: The window length w the autoencoder reconstructs
    :vartype window: ``int``

    :ivar epochs_run: The number of training epochs completed
    :vartype epochs_run: ``int``

    :ivar final_loss: The training MSE of the last epoch (None before training)
    :vartype final_loss: ``float`` or ``None``

    :ivar history: The per-epoch training MSE
    :vartype history: ``list`` of ``float``
    """

    @property
    def n_q(self):
        """
        The number of latent features.

        **Invariant**: Value is an ``int`` >= 1.
        """
        return self.encoder.n_q

    def __init__(self, encoder, decoder, window=20):
        """
        Creates an autoencoder from its halves.

        :param encoder: The encoder half
        :type encoder:  :class:`EncoderSpec`

        :param decoder: The decoder half
        :type decoder:  :class:`DecoderSpec`

        :param window: The window length
        :type window:  ``int``
        """
        if decoder.expansion.in_dim != encoder.n_q:
            raise UsageError('decoder expects %d features, encoder makes %d'
                             % (decoder.expansion.in_dim, encoder.n_q))
        self.encoder = encoder
        self.decoder = decoder
        self.window = int(window)
        self.epochs_run = 0
        self.final_loss = None
        self.history = []

    @classmethod
    def create(cls, n_q, window=20, rng=None):
        """
        Returns a fresh autoencoder.

        :param n_q: The number of latent features
        :type n_q:  ``int``

        :param window: The window length
        :type window:  ``int``

        :param rng: The random generator (None gives all zero weights)
        :type rng:  ``numpy.random.Generator`` or ``None``

        :return: The autoencoder
        :rtype:  :class:`AutoencoderWeights`
        """
        return cls(EncoderSpec.create(n_q, rng), DecoderSpec.create(n_q, rng), window)

    def __repr__(self):
        """
        :return: An unambiguous string representation of this autoencoder.
        :rtype:  ``str``
        """
        return 'AutoencoderWeights(n_q=%d, window=%d, epochs_run=%d)' % (self.n_q, self.window, self.epochs_run)

    def parameters(self):
        """
        :return: Every parameter, encoder first
        :rtype:  :class:`~qforecast.nn.ParameterBundle`
        """
        bundle = ParameterBundle()
        bundle.extend('encoder', self.encoder.parameters())
        bundle.extend('decoder', self.decoder.parameters())
        return bundle

    def clear_cache(self):
        """
        Discards the forward passes cached by training.
        """
        self.encoder.lstm.clear_cache()
        self.encoder.projection.clear_cache()
        self.decoder.expansion.clear_cache()
        self.decoder.lstm.clear_cache()
        self.decoder.readout.clear_cache()


pass
# #mark -
# #mark Passes

def _as_windows(weights, windows):
    """
    Returns windows as a (batch, w) array and whether a batch was given. [INTERNAL]
    """
    windows = np.asarray(windows, dtype=float)
    batched = windows.ndim == 2
    windows = np.atleast_2d(windows)
    if windows.ndim != 2 or windows.shape[1] != weights.window:
        raise UsageError('windows of shape %s do not have length %d' % (repr(windows.shape), weights.window))
    return windows, batched


def _encode(weights, windows, cache):
    """
    Returns the (batch, n_q) latents of (batch, w) windows. [INTERNAL]
    """
    sequence = windows.T[:, :, np.newaxis]
    hidden, h, c = lstm_forward(weights.encoder.lstm, sequence, cache)
    return weights.encoder.projection.forward(h, cache)


def _decode(weights, latents, cache):
    """
    Returns the (batch, w) reconstructions of (batch, n_q) latents. [INTERNAL]
    """
    decoder = weights.decoder
    expanded = decoder.expansion.forward(latents, cache)
    sequence = np.repeat(expanded[np.newaxis, :, :], weights.window, axis=0)
    hidden, h, c = lstm_forward(decoder.lstm, sequence, cache)
    steps, batch, units = hidden.shape
    values = decoder.readout.forward(hidden.reshape(steps * batch, units), cache)
    return values.reshape(steps, batch).T


def _backward(weights, d_output):
    """
    Backpropagates a (batch, w) reconstruction gradient through both halves. [INTERNAL]
    """
    decoder = weights.decoder
    batch, steps = d_output.shape
    d_hidden = decoder.readout.backward(d_output.T.reshape(steps * batch, 1))
    d_sequence = lstm_backward_through_time(decoder.lstm, d_hidden.reshape(steps, batch, HIDDEN_UNITS))
    d_latent = decoder.expansion.backward(d_sequence.sum(axis=0))
    d_h = weights.encoder.projection.backward(d_latent)
    lstm_backward_through_time(weights.encoder.lstm, d_h_final=d_h)


def encode(weights, window):
    """
    Returns the latent features of a window.

    The window is fed to the encoder one value per timestep.  This function has no
    side effects.

    :param weights: The autoencoder
    :type weights:  :class:`AutoencoderWeights`

    :param window: A normalized window of length w (or a batch of rows)
    :type window:  ``numpy.ndarray``

    :return: The latent vector of length N_q (or one per row)
    :rtype:  ``numpy.ndarray``
    """
    windows, batched = _as_windows(weights, window)
    latents = _encode(weights, windows, False)
    return latents if batched else latents[0]


def encode_many(weights, windows, batch_size=1024):
    """
    Returns the latents of many windows, encoding them in chunks.

    :param weights: The autoencoder
    :type weights:  :class:`AutoencoderWeights`

    :param windows: The (n_samples, w) windows
    :type windows:  ``numpy.ndarray``

    :param batch_size: The number of windows encoded at once
    :type batch_size:  ``int``

    :return: The (n_samples, N_q) latents
    :rtype:  ``numpy.ndarray``
    """
    windows = np.asarray(windows, dtype=float)
    if windows.ndim != 2 or windows.shape[1] != weights.window:
        raise UsageError('windows of shape %s do not have length %d' % (repr(windows.shape), weights.window))
    if windows.shape[0] == 0:
        return np.zeros((0, weights.n_q))
    parts = [_encode(weights, windows[pos:pos + batch_size], False)
             for pos in range(0, windows.shape[0], batch_size)]
    return np.concatenate(parts)


def decode(weights, latent):
    """
    Returns the window reconstructed from a latent vector.

    :param weights: The autoencoder
    :type weights:  :class:`AutoencoderWeights`

    :param latent: A latent vector of length N_q (or a batch of rows)
    :type latent:  ``numpy.ndarray``

    :return: The reconstruction of length w (or one per row)
    :rtype:  ``numpy.ndarray``
    """
    latent = np.asarray(latent, dtype=float)
    batched = latent.ndim == 2
    latents = np.atleast_2d(latent)
    if latents.ndim != 2 or latents.shape[1] != weights.n_q:
        raise UsageError('latent of shape %s does not have length %d' % (repr(latent.shape), weights.n_q))
    values = _decode(weights, latents, False)
    return values if batched else values[0]


def reconstruct(weights, window):
    """
    :return: ``decode(weights, encode(weights, window))``
    :rtype:  ``numpy.ndarray``
    """
    return decode(weights, encode(weights, window))


def reconstruction_mse(weights, windows):
    """
    Returns the mean squared reconstruction error over a set of windows.

    :param weights: The autoencoder
    :type weights:  :class:`AutoencoderWeights`

    :param windows: The (n_samples, w) windows
    :type windows:  ``numpy.ndarray``

    :return: The MSE
    :rtype:  ``float``
    """
    windows, batched = _as_windows(weights, windows)
    return mse_loss(_decode(weights, _encode(weights, windows, False), False), windows)


def train_autoencoder(windows, n_q, epochs=20, batch_size=32, seed=0, learning_rate=0.0005,
                      clip_norm=5.0):
    """
    Trains a fresh autoencoder to reconstruct ``windows``.

    The weights are initialized and the batches shuffled from ``seed``, so the same
    seed and data give the same history.  The loss of an epoch is the sample-weighted
    mean of its batch losses.

    :param windows: The normalized training windows
    :type windows:  :class:`~qforecast.data.WindowSet` or ``numpy.ndarray``

    :param n_q: The number of latent features
    :type n_q:  ``int``

    :param epochs: The number of passes over the data
    :type epochs:  ``int``

    :param batch_size: The number of windows per Adam step
    :type batch_size:  ``int``

    :param seed: The random seed
    :type seed:  ``int``

    :return: The trained autoencoder and its per-epoch loss history
    :rtype:  ``tuple``
    """
    inputs = np.asarray(getattr(windows, 'inputs', windows), dtype=float)
    if inputs.ndim != 2 or inputs.shape[0] == 0:
        raise UsageError('cannot train an autoencoder on %s windows' % repr(inputs.shape))
    if epochs < 1 or batch_size < 1:
        raise UsageError('epochs %s and batch size %s must be positive' % (repr(epochs), repr(batch_size)))

    rng = np.random.default_rng(seed)
    weights = AutoencoderWeights.create(n_q, inputs.shape[1], rng)
    bundle = weights.parameters()
    state = AdamState(learning_rate)
    count = inputs.shape[0]
    history = []
    for epoch in range(epochs):
        order = rng.permutation(count)
        total = 0.0
        for pos in range(0, count, batch_size):
            batch = inputs[order[pos:pos + batch_size]]
            bundle.zero_grad()
            output = _decode(weights, _encode(weights, batch, True), True)
            loss, grad = mse_loss_and_grad(output, batch)
            _backward(weights, grad)
            clip_global_norm(bundle, clip_norm)
            adam_update(state, bundle)
            total += loss * batch.shape[0]
        history.append(total / count)
        logger.info('autoencoder n_q=%d epoch=%d loss=%.6g', n_q, epoch + 1, history[-1])

    weights.clear_cache()
    weights.epochs_run = epochs
    weights.final_loss = history[-1]
    weights.history = list(history)
    return weights, history


pass
# #mark -
# #mark Persistence

def save_autoencoder(weights, filename, metadata=None):
    """
    Writes an autoencoder to a checkpoint file.

    :param weights: The autoencoder
    :type weights:  :class:`AutoencoderWeights`

    :param filename: The file to write
    :type filename:  ``str``

    :param metadata: Extra information to store (for example a cache key)
    :type metadata:  ``dict`` or ``None``

    :return: The name of the file written
    :rtype:  ``str``
    """
    record = dict(metadata or {})
    record.update({'n_q': weights.n_q, 'window': weights.window, 'hidden_units': HIDDEN_UNITS,
                   'epochs_run': weights.epochs_run, 'final_loss': weights.final_loss,
                   'history': list(weights.history)})
    return checkpoint.save_checkpoint(weights.parameters(), filename, 'autoencoder', record)


def load_autoencoder(filename):
    """
    Reads an autoencoder from a checkpoint file.

    :param filename: The file to read
    :type filename:  ``str``

    :return: The autoencoder and the checkpoint metadata
    :rtype:  ``tuple``
    """
    document = filetools.read_json(filename)
    record = document.get('metadata', {}) if type(document) == dict else {}
    if 'n_q' not in record or 'window' not in record:
        raise UsageError('%s is not an autoencoder checkpoint' % repr(filename))
    weights = AutoencoderWeights.create(record['n_q'], record['window'])
    checkpoint.decode_into(document, weights.parameters())
    weights.epochs_run = record.get('epochs_run', 0)
    weights.final_loss = record.get('final_loss')
    weights.history = list(record.get('history', []))
    return weights, record


class AutoencoderCache(object):
    """
    An instance is a directory of trained autoencoders.

    Entries are keyed by (N_q, seed, hash of the training windows), so the classic
    and hybrid runs of a grid cell share one encoder.  An entry trained with other
    settings (epochs, learning rate) is treated as missing.
    """

    @property
    def directory(self):
        """
        The folder holding the checkpoints.

        **Invariant**: Value is a ``str``.
        """
        return self._directory

    def __init__(self, directory):
        """
        Creates a cache in ``directory`` (made on first write).

        :param directory: The cache folder
        :type directory:  ``str``
        """
        self._directory = directory

    def filename(self, n_q, seed, data_hash):
        """
        :return: The checkpoint file for a cache key
        :rtype:  ``str``
        """
        if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
            raise UsageError('%s is not an integer seed; a cached encoder must be reproducible' % repr(seed))
        return os.path.join(self._directory, 'ae_Q%d_s%d_%s.json' % (n_q, seed, data_hash[:16]))

    def train_or_load(self, windows, n_q, epochs=20, batch_size=32, seed=0, learning_rate=0.0005,
                      clip_norm=5.0):
        """
        Returns the cached autoencoder for these windows, training it if needed.

        The arguments are those of :func:`train_autoencoder`.

        :return: The autoencoder
        :rtype:  :class:`AutoencoderWeights`
        """
        inputs = np.asarray(getattr(windows, 'inputs', windows), dtype=float)
        data_hash = series_hash(inputs)
        settings = {'epochs': epochs, 'batch_size': batch_size, 'learning_rate': learning_rate,
                    'clip_norm': clip_norm, 'seed': seed, 'data_hash': data_hash}
        filename = self.filename(n_q, seed, data_hash)
        if os.path.isfile(filename):
            weights, record = load_autoencoder(filename)
            if all(record.get(key) == value for key, value in settings.items()):
                logger.info('reusing autoencoder %s', filename)
                return weights
            logger.info('autoencoder %s was trained with other settings', filename)
        weights, history = train_autoencoder(inputs, n_q, epochs, batch_size, seed, learning_rate, clip_norm)
        save_autoencoder(weights, filename, settings)
        return weights
