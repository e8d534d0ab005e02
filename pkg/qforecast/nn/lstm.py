"""
The LSTM cell and backpropagation through time.

The cell uses the standard gate equations::

    i = sigmoid(W_i x + U_i h + b_i)
    f = sigmoid(W_f x + U_f h + b_f)
    g = tanh(W_g x + U_g h + b_g)
    o = sigmoid(W_o x + U_o h + b_o)
    c' = f * c + i * g
    h' = o * tanh(c')

A sequence is a (timesteps, in_dim) array, or a (timesteps, batch, in_dim) array for
a batch.  The initial hidden and cell states are zero.

:author:  qforecast developers
:version: October 17, 2026
"""
import numpy as np

from .activations import sigmoid
from .optim import ParameterBundle, glorot_uniform
from ..errors import UsageError, InternalError

# Gate order used for parameter names and checkpoints
GATES = ('i', 'f', 'g', 'o')


class LstmCell(object):
    """
    An instance is an LSTM cell with its gate parameters.

    The parameters are held in dictionaries keyed by gate name: ``W`` (input
    matrices, hidden_dim x input_dim), ``U`` (recurrent matrices, hidden_dim x
    hidden_dim) and ``b`` (biases).  Each has a matching gradient dictionary.
    """
    # PRIVATE ATTRIBUTES:
    #    _trace : the cached steps of the latest lstm_forward, or None

    @property
    def input_dim(self):
        """
        The width of each input vector.

        **Invariant**: Value is an ``int`` >= 1.
        """
        return self.W['i'].shape[1]

    @property
    def hidden_dim(self):
        """
        The number of units.

        **Invariant**: Value is an ``int`` >= 1.
        """
        return self.W['i'].shape[0]

    def __init__(self, W, U, b):
        """
        Creates a cell from gate dictionaries (the arrays are not copied).

        :param W: The input matrices keyed by gate
        :type W:  ``dict``

        :param U: The recurrent matrices keyed by gate
        :type U:  ``dict``

        :param b: The biases keyed by gate
        :type b:  ``dict``
        """
        hidden, inputs = np.shape(W['i'])
        for gate in GATES:
            if np.shape(W[gate]) != (hidden, inputs) or np.shape(U[gate]) != (hidden, hidden) \
                    or np.shape(b[gate]) != (hidden,):
                raise UsageError('gate %s has inconsistent shapes' % repr(gate))
        self.W = {gate: np.asarray(W[gate], dtype=float) for gate in GATES}
        self.U = {gate: np.asarray(U[gate], dtype=float) for gate in GATES}
        self.b = {gate: np.asarray(b[gate], dtype=float) for gate in GATES}
        self.dW = {gate: np.zeros_like(self.W[gate]) for gate in GATES}
        self.dU = {gate: np.zeros_like(self.U[gate]) for gate in GATES}
        self.db = {gate: np.zeros_like(self.b[gate]) for gate in GATES}
        self._trace = None

    @classmethod
    def create(cls, input_dim, hidden_dim, rng=None, forget_bias=1.0):
        """
        Creates a cell with Glorot-uniform matrices.

        The forget-gate bias starts at ``forget_bias``; the other biases start at 0.
        If ``rng`` is None, every parameter is zero (including the forget bias).

        :param input_dim: The input width
        :type input_dim:  ``int``

        :param hidden_dim: The number of units
        :type hidden_dim:  ``int``

        :param rng: The random generator to draw from
        :type rng:  ``numpy.random.Generator`` or ``None``

        :return: A new cell
        :rtype:  :class:`LstmCell`
        """
        W, U, b = {}, {}, {}
        for gate in GATES:
            if rng is None:
                W[gate] = np.zeros((hidden_dim, input_dim))
                U[gate] = np.zeros((hidden_dim, hidden_dim))
            else:
                W[gate] = glorot_uniform(rng, hidden_dim, input_dim)
                U[gate] = glorot_uniform(rng, hidden_dim, hidden_dim)
            b[gate] = np.zeros(hidden_dim)
        if rng is not None:
            b['f'][:] = forget_bias
        return cls(W, U, b)

    def __repr__(self):
        """
        :return: An unambiguous string representation of this cell.
        :rtype:  ``str``
        """
        return 'LstmCell(%d -> %d)' % (self.input_dim, self.hidden_dim)

    def parameters(self):
        """
        :return: Every gate parameter with its gradient slot, in gate order
        :rtype:  :class:`ParameterBundle`
        """
        bundle = ParameterBundle()
        for gate in GATES:
            bundle.add('W_' + gate, self.W[gate], self.dW[gate])
        for gate in GATES:
            bundle.add('U_' + gate, self.U[gate], self.dU[gate])
        for gate in GATES:
            bundle.add('b_' + gate, self.b[gate], self.db[gate])
        return bundle

    def clear_cache(self):
        """
        Discards the cached forward pass.
        """
        self._trace = None


def _gates(cell, x, h_prev):
    """
    Returns the activated gates (i, f, g, o) for one step. [INTERNAL]
    """
    pre = {gate: x @ cell.W[gate].T + h_prev @ cell.U[gate].T + cell.b[gate] for gate in GATES}
    return sigmoid(pre['i']), sigmoid(pre['f']), np.tanh(pre['g']), sigmoid(pre['o'])


def lstm_step(cell, x, h_prev, c_prev):
    """
    Returns the hidden and cell states after one step of ``cell``.

    All arguments may be single vectors or batches with one sample per row.

    :param cell: The cell
    :type cell:  :class:`LstmCell`

    :param x: The input, length input_dim
    :type x:  ``numpy.ndarray``

    :param h_prev: The previous hidden state, length hidden_dim
    :type h_prev:  ``numpy.ndarray``

    :param c_prev: The previous cell state, length hidden_dim
    :type c_prev:  ``numpy.ndarray``

    :return: The new states (h, c)
    :rtype:  ``tuple``
    """
    x = np.asarray(x, dtype=float)
    h_prev = np.asarray(h_prev, dtype=float)
    c_prev = np.asarray(c_prev, dtype=float)
    if x.shape[-1:] != (cell.input_dim,):
        raise UsageError('input of shape %s does not match input_dim %d' % (repr(x.shape), cell.input_dim))
    if h_prev.shape[-1:] != (cell.hidden_dim,) or c_prev.shape != h_prev.shape:
        raise UsageError('states of shape %s and %s do not match hidden_dim %d'
                         % (repr(h_prev.shape), repr(c_prev.shape), cell.hidden_dim))
    i, f, g, o = _gates(cell, x, h_prev)
    c = f * c_prev + i * g
    h = o * np.tanh(c)
    return h, c


def lstm_forward(cell, sequence, cache=True):
    """
    Runs ``cell`` over a sequence from zero initial states.

    With ``cache=True`` the step activations are kept on the cell for
    :func:`lstm_backward_through_time`, replacing any earlier cache.

    :param cell: The cell
    :type cell:  :class:`LstmCell`

    :param sequence: The inputs, shape (T, input_dim) or (T, batch, input_dim)
    :type sequence:  ``numpy.ndarray`` or ``list``

    :param cache: Whether to keep the activations
    :type cache:  ``bool``

    :return: The hidden states (T, ...), the final hidden state and the final cell state
    :rtype:  ``tuple``
    """
    sequence = np.asarray(sequence, dtype=float)
    if sequence.ndim not in (2, 3) or sequence.shape[0] == 0:
        raise UsageError('a sequence of shape %s is not a nonempty list of vectors' % repr(sequence.shape))
    if sequence.shape[-1] != cell.input_dim:
        raise UsageError('sequence of shape %s does not match input_dim %d' % (repr(sequence.shape), cell.input_dim))

    state_shape = sequence.shape[1:-1] + (cell.hidden_dim,)
    h = np.zeros(state_shape)
    c = np.zeros(state_shape)
    hidden = np.empty((sequence.shape[0],) + state_shape)
    trace = []
    for t in range(sequence.shape[0]):
        x = sequence[t]
        i, f, g, o = _gates(cell, x, h)
        c_new = f * c + i * g
        tanh_c = np.tanh(c_new)
        h_new = o * tanh_c
        if cache:
            trace.append((x, h, c, i, f, g, o, tanh_c))
        h, c = h_new, c_new
        hidden[t] = h
    cell._trace = trace if cache else None
    return hidden, h, c


def lstm_backward_through_time(cell, d_hidden=None, d_h_final=None, d_c_final=None):
    """
    Backpropagates through the cached sequence of ``cell``.

    The gradients may address every hidden state (``d_hidden``), only the final
    states, or both.  Parameter gradients are added to the gradient slots of the cell.
    The cache is consumed.

    :param cell: The cell with a cached forward pass
    :type cell:  :class:`LstmCell`

    :param d_hidden: The loss gradient for each hidden state, shaped like the output
    :type d_hidden:  ``numpy.ndarray`` or ``None``

    :param d_h_final: The loss gradient for the final hidden state
    :type d_h_final:  ``numpy.ndarray`` or ``None``

    :param d_c_final: The loss gradient for the final cell state
    :type d_c_final:  ``numpy.ndarray`` or ``None``

    :return: The loss gradient for each input, shaped like the sequence
    :rtype:  ``numpy.ndarray``
    """
    trace = cell._trace
    if not trace:
        raise InternalError('%s has no forward pass to differentiate' % repr(cell))
    cell._trace = None

    steps = len(trace)
    state_shape = trace[0][1].shape
    if d_hidden is not None and np.shape(d_hidden) != (steps,) + state_shape:
        raise InternalError('hidden gradients of shape %s do not match the cache' % repr(np.shape(d_hidden)))
    dh_next = np.zeros(state_shape) if d_h_final is None else np.array(d_h_final, dtype=float)
    dc_next = np.zeros(state_shape) if d_c_final is None else np.array(d_c_final, dtype=float)
    if dh_next.shape != state_shape or dc_next.shape != state_shape:
        raise InternalError('final state gradients do not match the cache')

    d_inputs = np.empty((steps,) + trace[0][0].shape)
    for t in reversed(range(steps)):
        x, h_prev, c_prev, i, f, g, o, tanh_c = trace[t]
        dh = dh_next if d_hidden is None else dh_next + d_hidden[t]
        do = dh * tanh_c
        dc = dc_next + dh * o * (1.0 - tanh_c * tanh_c)
        pre = {
            'i': dc * g * i * (1.0 - i),
            'f': dc * c_prev * f * (1.0 - f),
            'g': dc * i * (1.0 - g * g),
            'o': do * o * (1.0 - o),
        }
        dx = np.zeros_like(x)
        dh_next = np.zeros_like(h_prev)
        for gate in GATES:
            da = pre[gate]
            if x.ndim == 1:
                cell.dW[gate] += np.outer(da, x)
                cell.dU[gate] += np.outer(da, h_prev)
                cell.db[gate] += da
            else:
                cell.dW[gate] += da.T @ x
                cell.dU[gate] += da.T @ h_prev
                cell.db[gate] += da.sum(axis=0)
            dx += da @ cell.W[gate]
            dh_next += da @ cell.U[gate]
        dc_next = dc * f
        d_inputs[t] = dx
    return d_inputs
