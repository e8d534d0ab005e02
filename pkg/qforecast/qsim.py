"""
Dense statevector simulation of variational circuits.

This module simulates the small quantum layers used by the hybrid regressors.  A
circuit acts on a register of at most 14 qubits, and the simulator tracks all 2^n
complex amplitudes of that register.  The supported gates are the Pauli rotations
RX, RY and RZ, the general rotation Rot (three angles) and CNOT.

Qubit 0 is the most significant bit of a basis index.  So the state written |10> is
basis index 2, and a CNOT with control 0 and target 1 maps it to |11>.

Every operation accepts a single sample or a batch of samples.  A batched state has
amplitudes of shape (batch, 2^n), and a batched embedding uses different angles for
each sample.  Gate kernels reshape the amplitude array so that the target qubit is
its own axis, which keeps the cost of a gate linear in the size of the state.

Gradients use the parameter-shift rule.  Every trainable gate is a Pauli rotation, so
the derivative of an expectation with respect to an angle is exactly half the
difference of two evaluations at the angle shifted by plus and minus pi/2.

:author:  qforecast developers
:version: October 17, 2026
"""
import logging
import math

import numpy as np

from .errors import ConfigurationError, UsageError, InternalError

logger = logging.getLogger(__name__)

# The largest register this simulator accepts
MAX_QUBITS = 14

# The gate names, with the number of angles each one takes
GATE_KINDS = {'RX': 1, 'RY': 1, 'RZ': 1, 'Rot': 3, 'CNOT': 0}

_SHIFT = math.pi / 2


def _check_qubits(n_qubits):
    """
    Raises a ConfigurationError if ``n_qubits`` is not a legal register size. [INTERNAL]

    :param n_qubits: The candidate qubit count
    :type n_qubits:  ``int``
    """
    if not isinstance(n_qubits, (int, np.integer)) or isinstance(n_qubits, bool):
        raise ConfigurationError('%s is not an integer qubit count' % repr(n_qubits))
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError('%s is not a qubit count in 1..%d' % (repr(n_qubits), MAX_QUBITS))


pass
# #mark -
# #mark Gate Matrices

def rx_matrix(theta):
    """
    Returns the RX rotation matrix for the angle (or angles) ``theta``.

    If ``theta`` is an array, the result has shape ``theta.shape + (2,2)``.

    :param theta: The rotation angle in radians
    :type theta:  ``float`` or ``numpy.ndarray``

    :return: The rotation matrix (or stack of matrices)
    :rtype:  ``numpy.ndarray``
    """
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    result = np.empty(theta.shape + (2, 2), dtype=complex)
    result[..., 0, 0] = c
    result[..., 0, 1] = -1j * s
    result[..., 1, 0] = -1j * s
    result[..., 1, 1] = c
    return result


def ry_matrix(theta):
    """
    Returns the RY rotation matrix for the angle (or angles) ``theta``.

    The matrix has rows [cos(t/2), -sin(t/2)] and [sin(t/2), cos(t/2)].

    :param theta: The rotation angle in radians
    :type theta:  ``float`` or ``numpy.ndarray``

    :return: The rotation matrix (or stack of matrices)
    :rtype:  ``numpy.ndarray``
    """
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    result = np.empty(theta.shape + (2, 2), dtype=complex)
    result[..., 0, 0] = c
    result[..., 0, 1] = -s
    result[..., 1, 0] = s
    result[..., 1, 1] = c
    return result


def rz_matrix(theta):
    """
    Returns the RZ rotation matrix diag(exp(-i t/2), exp(i t/2)).

    :param theta: The rotation angle in radians
    :type theta:  ``float`` or ``numpy.ndarray``

    :return: The rotation matrix (or stack of matrices)
    :rtype:  ``numpy.ndarray``
    """
    theta = np.asarray(theta, dtype=float)
    result = np.zeros(theta.shape + (2, 2), dtype=complex)
    result[..., 0, 0] = np.exp(-0.5j * theta)
    result[..., 1, 1] = np.exp(0.5j * theta)
    return result


def rot_matrix(alpha, beta, gamma):
    """
    Returns the general rotation RZ(gamma) RY(beta) RZ(alpha).

    As an operator product, RZ(alpha) acts first and RZ(gamma) acts last.

    :param alpha: The first z-rotation angle
    :type alpha:  ``float``

    :param beta: The y-rotation angle
    :type beta:  ``float``

    :param gamma: The last z-rotation angle
    :type gamma:  ``float``

    :return: The 2x2 rotation matrix
    :rtype:  ``numpy.ndarray``
    """
    return rz_matrix(gamma) @ ry_matrix(beta) @ rz_matrix(alpha)


_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


pass
# #mark -
# #mark Domain Types

class StateVector(object):
    """
    An instance is the amplitude vector of an n-qubit register.

    A state may also hold a batch of registers, one per row.  The attribute
    ``amplitudes`` always has the shape given at construction: ``(2**n,)`` for a
    single register or ``(batch, 2**n)`` for a batch.
    """
    # PRIVATE ATTRIBUTES:
    #    _data    : amplitudes as a (batch, 2**n) complex array
    #    _batched : whether the original shape had a batch axis

    @property
    def n_qubits(self):
        """
        The number of qubits in the register.

        **Invariant**: Value is an ``int`` in 1..14.
        """
        return self._n

    @property
    def amplitudes(self):
        """
        The complex amplitudes, of length 2**n_qubits (per sample).

        **Invariant**: Value is a complex ``numpy.ndarray``.
        """
        return self._data if self._batched else self._data[0]

    @property
    def batched(self):
        """
        Whether this state holds a batch of registers.

        **Invariant**: Value is a ``bool``.
        """
        return self._batched

    @property
    def batch_size(self):
        """
        The number of registers held (1 for an unbatched state).

        **Invariant**: Value is an ``int`` >= 1.
        """
        return self._data.shape[0]

    def __init__(self, amplitudes, n_qubits=None):
        """
        Creates a state from an amplitude array.

        The amplitudes are copied.  No normalization is performed; use
        :meth:`norm` to check the state.

        :param amplitudes: The amplitudes, shape ``(2**n,)`` or ``(batch, 2**n)``
        :type amplitudes:  array-like

        :param n_qubits: The qubit count (inferred from the length if omitted)
        :type n_qubits:  ``int`` or ``None``
        """
        data = np.array(amplitudes, dtype=complex)
        if data.ndim not in (1, 2):
            raise UsageError('amplitudes of shape %s are neither a vector nor a batch' % repr(data.shape))
        self._batched = data.ndim == 2
        data = np.atleast_2d(data)
        size = data.shape[1]
        if n_qubits is None:
            n_qubits = int(round(math.log2(size))) if size > 0 else 0
        _check_qubits(n_qubits)
        if size != 2 ** n_qubits:
            raise UsageError('%d amplitudes do not describe %d qubits' % (size, n_qubits))
        self._n = n_qubits
        self._data = data

    @classmethod
    def _wrap(cls, data, n_qubits, batched):
        """
        Returns a state sharing the (batch, 2**n) array ``data``. [INTERNAL]
        """
        result = cls.__new__(cls)
        result._n = n_qubits
        result._data = data
        result._batched = batched
        return result

    def __repr__(self):
        """
        :return: An unambiguous string representation of this state.
        :rtype:  ``str``
        """
        return '%s(n_qubits=%d, amplitudes=%s)' % (self.__class__.__name__, self._n, repr(self.amplitudes))

    def copy(self):
        """
        :return: A copy of this state
        :rtype:  :class:`StateVector`
        """
        return StateVector._wrap(self._data.copy(), self._n, self._batched)

    def norm(self):
        """
        Returns the L2 norm of the amplitudes (one per sample when batched).

        :return: The norm of this state
        :rtype:  ``float`` or ``numpy.ndarray``
        """
        result = np.sqrt(np.sum(np.abs(self._data) ** 2, axis=1))
        return result if self._batched else float(result[0])

    def probabilities(self):
        """
        Returns the probability of each basis state.

        :return: The squared magnitudes of the amplitudes
        :rtype:  ``numpy.ndarray``
        """
        probs = np.abs(self._data) ** 2
        return probs if self._batched else probs[0]


class GateOp(object):
    """
    An instance is one gate applied to specific qubits.

    The angles of a rotation may be numbers or arrays with one entry per sample, so
    that a batched state can be rotated by a different angle in each row.
    """

    @property
    def kind(self):
        """
        The gate name, one of 'RX', 'RY', 'RZ', 'Rot' or 'CNOT'.

        **Invariant**: Value is a key of ``GATE_KINDS``.
        """
        return self._kind

    @property
    def params(self):
        """
        The rotation angles in radians (empty for CNOT).

        **Invariant**: Value is a tuple whose length matches the gate kind.
        """
        return self._params

    @property
    def target(self):
        """
        The qubit the gate acts on.

        **Invariant**: Value is an ``int`` >= 0.
        """
        return self._target

    @property
    def control(self):
        """
        The control qubit of a CNOT (None for rotations).

        **Invariant**: Value is ``None`` or an ``int`` >= 0 different from ``target``.
        """
        return self._control

    def __init__(self, kind, target, params=(), control=None):
        """
        Creates a new gate.

        :param kind: The gate name
        :type kind:  ``str``

        :param target: The target qubit
        :type target:  ``int``

        :param params: The rotation angles
        :type params:  ``tuple``

        :param control: The control qubit (CNOT only)
        :type control:  ``int`` or ``None``
        """
        if kind not in GATE_KINDS:
            raise UsageError('%s is not a gate kind; expected one of %s' % (repr(kind), ', '.join(GATE_KINDS)))
        params = tuple(params)
        if len(params) != GATE_KINDS[kind]:
            raise UsageError('%s takes %d angles, not %d' % (kind, GATE_KINDS[kind], len(params)))
        if int(target) < 0:
            raise UsageError('%s is not a qubit index' % repr(target))
        if kind == 'CNOT':
            if control is None or int(control) < 0:
                raise UsageError('CNOT requires a control qubit, got %s' % repr(control))
            if int(control) == int(target):
                raise UsageError('CNOT control and target are both qubit %d' % int(target))
        elif control is not None:
            raise UsageError('%s does not take a control qubit' % kind)
        self._kind = kind
        self._target = int(target)
        self._control = None if control is None else int(control)
        self._params = params

    def __repr__(self):
        """
        :return: An unambiguous string representation of this gate.
        :rtype:  ``str``
        """
        if self._kind == 'CNOT':
            return 'GateOp(CNOT, control=%d, target=%d)' % (self._control, self._target)
        return 'GateOp(%s%s, target=%d)' % (self._kind, repr(self._params), self._target)

    def matrix(self):
        """
        Returns the unitary of this gate on its own qubits.

        Rotations give a 2x2 matrix (a stack of them for batched angles).  CNOT gives
        the 4x4 matrix in the basis |control target>.

        :return: The gate unitary
        :rtype:  ``numpy.ndarray``
        """
        if self._kind == 'RX':
            return rx_matrix(self._params[0])
        elif self._kind == 'RY':
            return ry_matrix(self._params[0])
        elif self._kind == 'RZ':
            return rz_matrix(self._params[0])
        elif self._kind == 'Rot':
            return rot_matrix(*self._params)
        return _CNOT.copy()


class EntanglingBlockParams(object):
    """
    An instance is the (alpha, beta, gamma) angles of one entangling layer.

    Row q holds the angles of the Rot gate applied to qubit q.
    """

    @property
    def angles(self):
        """
        The rotation angles, one row of three per qubit.

        **Invariant**: Value is a finite float array of shape (n_qubits, 3).
        """
        return self._angles

    @property
    def n_qubits(self):
        """
        The number of qubits these angles are for.

        **Invariant**: Value is an ``int`` >= 1.
        """
        return self._angles.shape[0]

    def __init__(self, angles):
        """
        Creates the angles of an entangling layer.

        The array is not copied, so that an optimizer may update it in place.

        :param angles: The angles, shape (n_qubits, 3)
        :type angles:  ``numpy.ndarray``
        """
        angles = np.asarray(angles, dtype=float)
        if angles.ndim != 2 or angles.shape[1] != 3 or angles.shape[0] < 1:
            raise UsageError('entangling angles of shape %s are not (n_qubits, 3)' % repr(angles.shape))
        if not np.all(np.isfinite(angles)):
            raise UsageError('entangling angles must be finite')
        self._angles = angles

    def __repr__(self):
        """
        :return: An unambiguous string representation of these angles.
        :rtype:  ``str``
        """
        return 'EntanglingBlockParams(%s)' % repr(self._angles.tolist())


class ReuploadCircuitSpec(object):
    """
    An instance is a data re-uploading circuit with its trainable angles.

    The circuit repeats ``n_blocks`` times: an RY angle embedding of the input
    features followed by ``layers_per_block`` entangling layers.  The trainable
    angles live in the array ``weights`` of shape
    (n_blocks, layers_per_block, n_qubits, 3).  Optimizers update this array in place.
    """

    @property
    def n_qubits(self):
        """
        The number of qubits (and of input features).

        **Invariant**: Value is an ``int`` in 1..14.
        """
        return self._weights.shape[2]

    @property
    def n_blocks(self):
        """
        The number of re-upload blocks.

        **Invariant**: Value is an ``int`` >= 1.
        """
        return self._weights.shape[0]

    @property
    def layers_per_block(self):
        """
        The number of entangling layers in each block.

        **Invariant**: Value is an ``int`` >= 1.
        """
        return self._weights.shape[1]

    @property
    def weights(self):
        """
        The trainable angles, shape (n_blocks, layers_per_block, n_qubits, 3).

        **Invariant**: Value is a finite float array.
        """
        return self._weights

    @property
    def angle_scale(self):
        """
        The factor applied to every feature before it becomes an RY angle.

        **Invariant**: Value is a finite ``float``.
        """
        return self._scale

    @property
    def blocks(self):
        """
        The entangling angles grouped by block.

        Entry r is a tuple with one :class:`EntanglingBlockParams` per layer of block r.
        The parameters are views of ``weights``.

        **Invariant**: Value is a list of length ``n_blocks``.
        """
        return [tuple(EntanglingBlockParams(layer) for layer in block) for block in self._weights]

    def __init__(self, weights, angle_scale=math.pi):
        """
        Creates a circuit from its trainable angles.

        :param weights: The angles, shape (n_blocks, layers_per_block, n_qubits, 3);
            a (n_blocks, n_qubits, 3) array means one layer per block
        :type weights:  ``numpy.ndarray``

        :param angle_scale: The embedding scale factor
        :type angle_scale:  ``float``
        """
        weights = np.asarray(weights, dtype=float)
        if weights.ndim == 3:
            weights = weights[:, np.newaxis, :, :]
        if weights.ndim != 4 or weights.shape[3] != 3:
            raise UsageError('circuit weights of shape %s are not (blocks, layers, qubits, 3)' % repr(weights.shape))
        if weights.shape[0] < 1:
            raise ConfigurationError('a re-upload circuit needs at least one block')
        if weights.shape[1] < 1:
            raise ConfigurationError('a re-upload block needs at least one entangling layer')
        _check_qubits(weights.shape[2])
        if not np.all(np.isfinite(weights)) or not math.isfinite(angle_scale):
            raise UsageError('circuit angles must be finite')
        self._weights = weights
        self._scale = float(angle_scale)

    @classmethod
    def zeros(cls, n_qubits, n_blocks, layers_per_block=1, angle_scale=math.pi):
        """
        Creates a circuit whose entangling rotations are all the identity.

        :param n_qubits: The number of qubits
        :type n_qubits:  ``int``

        :param n_blocks: The number of re-upload blocks
        :type n_blocks:  ``int``

        :param layers_per_block: The entangling layers per block
        :type layers_per_block:  ``int``

        :param angle_scale: The embedding scale factor
        :type angle_scale:  ``float``

        :return: A new circuit
        :rtype:  :class:`ReuploadCircuitSpec`
        """
        _check_qubits(n_qubits)
        if n_blocks < 1:
            raise ConfigurationError('%s is not a valid block count' % repr(n_blocks))
        return cls(np.zeros((n_blocks, layers_per_block, n_qubits, 3)), angle_scale)

    @classmethod
    def random(cls, n_qubits, n_blocks, rng, layers_per_block=1, angle_scale=math.pi):
        """
        Creates a circuit with angles drawn uniformly from [0, 2 pi).

        :param rng: The random generator to draw from
        :type rng:  ``numpy.random.Generator``

        :return: A new circuit
        :rtype:  :class:`ReuploadCircuitSpec`
        """
        result = cls.zeros(n_qubits, n_blocks, layers_per_block, angle_scale)
        result._weights[...] = rng.uniform(0.0, 2 * math.pi, size=result._weights.shape)
        return result

    def copy(self):
        """
        :return: A copy of this circuit with its own weight array
        :rtype:  :class:`ReuploadCircuitSpec`
        """
        return ReuploadCircuitSpec(self._weights.copy(), self._scale)


class ExpectationVector(object):
    """
    An instance is the Pauli-Z expectation of every qubit.

    For a batch of states the values have shape (batch, n_qubits).
    """

    @property
    def values(self):
        """
        The expectations, one per qubit (per sample).

        **Invariant**: Every value is in [-1, 1] up to 1e-12.
        """
        return self._values

    def __init__(self, values):
        """
        Creates an expectation vector.

        :param values: The expectations
        :type values:  ``numpy.ndarray``
        """
        values = np.asarray(values, dtype=float)
        if np.any(np.abs(values) > 1 + 1e-12):
            raise InternalError('Pauli-Z expectations %s left [-1,1]' % repr(values))
        self._values = values

    def __len__(self):
        """
        :return: The number of qubits
        :rtype:  ``int``
        """
        return self._values.shape[-1]

    def __repr__(self):
        """
        :return: An unambiguous string representation of these expectations.
        :rtype:  ``str``
        """
        return 'ExpectationVector(%s)' % repr(self._values.tolist())


class CircuitGradient(object):
    """
    An instance is the result of :func:`circuit_gradient`.

    :ivar weights: the loss gradient for every entangling angle (summed over a batch)
    :vartype weights: ``numpy.ndarray``

    :ivar features: the loss gradient for every input feature (None if not requested)
    :vartype features: ``numpy.ndarray`` or ``None``

    :ivar evaluations: the number of batched circuit evaluations used
    :vartype evaluations: ``int``
    """

    def __init__(self, weights, features, evaluations):
        """
        Creates a gradient bundle.
        """
        self.weights = weights
        self.features = features
        self.evaluations = evaluations


pass
# #mark -
# #mark Kernels

def _apply_1q(data, matrix, qubit, n):
    """
    Returns ``data`` with a one-qubit matrix applied to ``qubit``. [INTERNAL]

    :param data: amplitudes of shape (batch, 2**n)
    :param matrix: a (2,2) matrix or a (batch,2,2) stack
    """
    batch = data.shape[0]
    psi = data.reshape(batch, 2 ** qubit, 2, 2 ** (n - qubit - 1))
    if matrix.ndim == 2:
        out = np.einsum('ij,bljr->blir', matrix, psi)
    else:
        out = np.einsum('bij,bljr->blir', matrix, psi)
    return out.reshape(batch, 2 ** n)


def _apply_cnot(data, control, target, n):
    """
    Returns ``data`` with a CNOT applied. [INTERNAL]
    """
    batch = data.shape[0]
    psi = data.reshape((batch,) + (2,) * n)
    out = psi.copy()
    index = [slice(None)] * (n + 1)
    index[1 + control] = 1
    index = tuple(index)
    # Removing the control axis shifts later axes down by one
    axis = target if target > control else target + 1
    out[index] = np.flip(psi[index], axis=axis)
    return out.reshape(batch, 2 ** n)


def _zero_data(n, batch):
    """
    Returns the (batch, 2**n) amplitudes of |0...0>. [INTERNAL]
    """
    data = np.zeros((batch, 2 ** n), dtype=complex)
    data[:, 0] = 1.0
    return data


def _embed(data, angles, n):
    """
    Applies RY(angles[:, q]) to each qubit q. [INTERNAL]

    :param angles: a (batch, n) array of rotation angles
    """
    for q in range(n):
        data = _apply_1q(data, ry_matrix(angles[:, q]), q, n)
    return data


def _entangle(data, angles, n):
    """
    Applies Rot to each qubit, then the CNOT ring. [INTERNAL]

    :param angles: a (n, 3) array of rotation angles
    """
    for q in range(n):
        data = _apply_1q(data, rot_matrix(*angles[q]), q, n)
    if n > 1:
        for q in range(n):
            data = _apply_cnot(data, q, (q + 1) % n, n)
    return data


def _expect_z(data, n):
    """
    Returns the (batch, n) Pauli-Z expectations of the amplitudes. [INTERNAL]
    """
    batch = data.shape[0]
    probs = (np.abs(data) ** 2).reshape((batch,) + (2,) * n)
    result = np.empty((batch, n))
    for q in range(n):
        others = tuple(1 + k for k in range(n) if k != q)
        marginal = probs.sum(axis=others) if others else probs
        result[:, q] = marginal[:, 0] - marginal[:, 1]
    return result


def _evaluate(weights, features, scale, offsets=None):
    """
    Returns the (batch, n) expectations of the re-upload circuit. [INTERNAL]

    :param weights: the (blocks, layers, n, 3) angles
    :param features: the (batch, n) inputs
    :param offsets: optional (blocks, n) shifts added to the embedding angles
    """
    blocks, layers, n, _ = weights.shape
    data = _zero_data(n, features.shape[0])
    base = scale * features
    for r in range(blocks):
        angles = base if offsets is None else base + offsets[r]
        data = _embed(data, angles, n)
        for l in range(layers):
            data = _entangle(data, weights[r, l], n)
    return _expect_z(data, n)


def _as_features(spec, features):
    """
    Returns the features as a (batch, n) array and whether they were batched. [INTERNAL]
    """
    features = np.asarray(features, dtype=float)
    batched = features.ndim == 2
    features = np.atleast_2d(features)
    if features.ndim != 2 or features.shape[1] != spec.n_qubits:
        raise UsageError('features of shape %s do not match %d qubits' % (repr(features.shape), spec.n_qubits))
    return features, batched


pass
# #mark -
# #mark Operations

def init_zero_state(n_qubits, batch=None):
    """
    Returns the register |0...0> on ``n_qubits`` qubits.

    :param n_qubits: The number of qubits
    :type n_qubits:  ``int`` in 1..14

    :param batch: The number of copies to hold (None for a single register)
    :type batch:  ``int`` or ``None``

    :return: The all-zero state
    :rtype:  :class:`StateVector`
    """
    _check_qubits(n_qubits)
    data = _zero_data(n_qubits, 1 if batch is None else batch)
    return StateVector._wrap(data, n_qubits, batch is not None)


def apply_gate(state, gate):
    """
    Returns the state obtained by applying ``gate`` to ``state``.

    The input state is not modified.

    :param state: The state to evolve
    :type state:  :class:`StateVector`

    :param gate: The gate to apply
    :type gate:  :class:`GateOp`

    :return: The evolved state
    :rtype:  :class:`StateVector`
    """
    n = state.n_qubits
    for qubit in (gate.target, gate.control):
        if qubit is not None and qubit >= n:
            raise UsageError('qubit %d is out of range for a %d-qubit state' % (qubit, n))
    if gate.kind == 'CNOT':
        data = _apply_cnot(state._data, gate.control, gate.target, n)
    else:
        matrix = gate.matrix()
        if matrix.ndim == 3 and matrix.shape[0] != state.batch_size:
            raise UsageError('%d gate angles for a batch of %d states' % (matrix.shape[0], state.batch_size))
        data = _apply_1q(state._data, matrix, gate.target, n)
    return StateVector._wrap(data, n, state.batched)


def angle_embed(state, features, angle_scale=math.pi):
    """
    Returns the state after one RY angle-embedding layer.

    Qubit q is rotated by RY(angle_scale * features[q]).  For a batched state,
    ``features`` has one row per sample.

    :param state: The state to evolve
    :type state:  :class:`StateVector`

    :param features: The values to embed, one per qubit
    :type features:  ``numpy.ndarray``

    :param angle_scale: The factor applied to each feature
    :type angle_scale:  ``float``

    :return: The evolved state
    :rtype:  :class:`StateVector`
    """
    n = state.n_qubits
    features = np.asarray(features, dtype=float)
    if features.shape[-1:] != (n,) or features.ndim > 2:
        raise UsageError('features of shape %s do not match %d qubits' % (repr(features.shape), n))
    angles = np.broadcast_to(angle_scale * features, (state.batch_size, n)) if features.ndim == 1 \
        else angle_scale * features
    if angles.shape[0] != state.batch_size:
        raise UsageError('%d feature rows for a batch of %d states' % (angles.shape[0], state.batch_size))
    return StateVector._wrap(_embed(state._data, angles, n), n, state.batched)


def entangling_layer(state, params):
    """
    Returns the state after one entangling layer.

    Each qubit q is rotated by Rot(alpha_q, beta_q, gamma_q), and then the CNOT ring
    CNOT(q, q+1 mod n) is applied for q = 0..n-1.  A one-qubit register has no CNOTs.

    :param state: The state to evolve
    :type state:  :class:`StateVector`

    :param params: The rotation angles of this layer
    :type params:  :class:`EntanglingBlockParams` or array of shape (n, 3)

    :return: The evolved state
    :rtype:  :class:`StateVector`
    """
    if not isinstance(params, EntanglingBlockParams):
        params = EntanglingBlockParams(params)
    n = state.n_qubits
    if params.n_qubits != n:
        raise UsageError('entangling angles for %d qubits on a %d-qubit state' % (params.n_qubits, n))
    return StateVector._wrap(_entangle(state._data, params.angles, n), n, state.batched)


def expect_z_all(state):
    """
    Returns the exact Pauli-Z expectation of every qubit.

    No measurement collapse is simulated.

    :param state: The state to read out
    :type state:  :class:`StateVector`

    :return: The expectations
    :rtype:  :class:`ExpectationVector`
    """
    values = _expect_z(state._data, state.n_qubits)
    return ExpectationVector(values if state.batched else values[0])


def run_reupload_circuit(spec, features):
    """
    Returns the Pauli-Z expectations of a re-upload circuit on ``features``.

    The circuit starts in |0...0>.  Each block embeds the features and then applies
    its entangling layers.  The expectations are read out at the end.

    :param spec: The circuit to run
    :type spec:  :class:`ReuploadCircuitSpec`

    :param features: The input, length n_qubits (or a batch of rows)
    :type features:  ``numpy.ndarray``

    :return: The expectations
    :rtype:  :class:`ExpectationVector`
    """
    features, batched = _as_features(spec, features)
    values = _evaluate(spec.weights, features, spec.angle_scale)
    return ExpectationVector(values if batched else values[0])


def circuit_gradient(spec, features, upstream, wrt_features=True):
    """
    Returns the loss gradients of a re-upload circuit by the parameter-shift rule.

    The argument ``upstream`` is the loss gradient with respect to each expectation.
    For every entangling angle the circuit is evaluated twice, at the angle shifted
    by +pi/2 and -pi/2.  For a batch, the angle gradients are summed over samples
    in sample order.

    If ``wrt_features`` is True, every occurrence of a feature in an embedding gate
    is shifted the same way.  The feature gradient is the sum over the blocks,
    scaled by ``angle_scale``, and is returned per sample.

    :param spec: The circuit
    :type spec:  :class:`ReuploadCircuitSpec`

    :param features: The input, length n_qubits (or a batch of rows)
    :type features:  ``numpy.ndarray``

    :param upstream: The gradient of the loss with respect to the expectations
    :type upstream:  ``numpy.ndarray``

    :param wrt_features: Whether to differentiate with respect to the features
    :type wrt_features:  ``bool``

    :return: The gradients and the evaluation count
    :rtype:  :class:`CircuitGradient`
    """
    features, batched = _as_features(spec, features)
    upstream = np.asarray(upstream, dtype=float)
    if upstream.shape != (features.shape if batched else features.shape[1:]):
        raise UsageError('upstream gradient of shape %s does not match the expectations' % repr(upstream.shape))
    upstream = np.atleast_2d(upstream)

    weights = spec.weights
    scale = spec.angle_scale
    grad = np.zeros_like(weights)
    shifted = weights.copy()
    evaluations = 0
    for index in np.ndindex(weights.shape):
        original = shifted[index]
        shifted[index] = original + _SHIFT
        plus = _evaluate(shifted, features, scale)
        shifted[index] = original - _SHIFT
        minus = _evaluate(shifted, features, scale)
        shifted[index] = original
        evaluations += 2
        grad[index] = 0.5 * np.sum(upstream * (plus - minus))

    feature_grad = None
    if wrt_features:
        n = spec.n_qubits
        feature_grad = np.zeros_like(features)
        offsets = np.zeros((spec.n_blocks, n))
        for r in range(spec.n_blocks):
            for q in range(n):
                offsets[r, q] = _SHIFT
                plus = _evaluate(weights, features, scale, offsets)
                offsets[r, q] = -_SHIFT
                minus = _evaluate(weights, features, scale, offsets)
                offsets[r, q] = 0.0
                evaluations += 2
                feature_grad[:, q] += scale * 0.5 * np.sum(upstream * (plus - minus), axis=1)
        if not batched:
            feature_grad = feature_grad[0]

    return CircuitGradient(grad, feature_grad, evaluations)


def circuit_unitary(spec, features):
    """
    Returns the full 2^n x 2^n unitary of a re-upload circuit for one input.

    This builds every gate as an explicit matrix on the whole register (Kronecker
    products of the :meth:`GateOp.matrix` unitaries) and multiplies the chain.  It is
    exponentially more expensive than :func:`run_reupload_circuit` and is meant for
    cross-checking small circuits.

    :param spec: The circuit
    :type spec:  :class:`ReuploadCircuitSpec`

    :param features: The input, length n_qubits
    :type features:  ``numpy.ndarray``

    :return: The circuit unitary
    :rtype:  ``numpy.ndarray``
    """
    features = np.asarray(features, dtype=float)
    n = spec.n_qubits
    if features.shape != (n,):
        raise UsageError('features of shape %s do not match %d qubits' % (repr(features.shape), n))
    gates = []
    for block in spec.blocks:
        gates.extend(GateOp('RY', q, (spec.angle_scale * features[q],)) for q in range(n))
        for layer in block:
            gates.extend(GateOp('Rot', q, tuple(layer.angles[q])) for q in range(n))
            if n > 1:
                gates.extend(GateOp('CNOT', (q + 1) % n, control=q) for q in range(n))
    result = np.identity(2 ** n, dtype=complex)
    for gate in gates:
        result = _full_matrix(gate, n) @ result
    return result


def _full_matrix(gate, n):
    """
    Returns the matrix of ``gate`` on the whole n-qubit register. [INTERNAL]
    """
    ident = np.identity(2, dtype=complex)
    if gate.kind != 'CNOT':
        factors = [gate.matrix() if q == gate.target else ident for q in range(n)]
        result = factors[0]
        for factor in factors[1:]:
            result = np.kron(result, factor)
        return result
    zero = np.array([[1, 0], [0, 0]], dtype=complex)
    one = np.array([[0, 0], [0, 1]], dtype=complex)
    flip = np.array([[0, 1], [1, 0]], dtype=complex)
    keep = [zero if q == gate.control else ident for q in range(n)]
    swap = [one if q == gate.control else flip if q == gate.target else ident for q in range(n)]
    first, second = keep[0], swap[0]
    for q in range(1, n):
        first = np.kron(first, keep[q])
        second = np.kron(second, swap[q])
    return first + second
