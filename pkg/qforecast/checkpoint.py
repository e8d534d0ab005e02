"""
The parameter checkpoint format.

A checkpoint is a JSON document holding the blocks of a
:class:`~qforecast.nn.optim.ParameterBundle` in order.  Each block records its name,
its shape and its values as base64 of little-endian 64-bit floats, so values read
back bit for bit.  The layout is::

    {"format": "qforecast-checkpoint", "version": 1, "label": "...",
     "metadata": {...},
     "blocks": [{"name": "...", "shape": [...], "dtype": "<f8", "data": "..."}]}

:author:  qforecast developers
:version: October 17, 2026
"""
import base64
import binascii

import numpy as np

from . import filetools
from .errors import FileToolError, UsageError

FORMAT = 'qforecast-checkpoint'
VERSION = 1


def encode_bundle(bundle, label='', metadata=None):
    """
    Returns the checkpoint document for ``bundle``.

    :param bundle: The parameters to store
    :type bundle:  :class:`~qforecast.nn.optim.ParameterBundle`

    :param label: A tag naming what the parameters belong to
    :type label:  ``str``

    :param metadata: Extra JSON-encodable information
    :type metadata:  ``dict`` or ``None``

    :return: The checkpoint document
    :rtype:  ``dict``
    """
    blocks = []
    for name, param, grad in bundle:
        data = np.ascontiguousarray(param, dtype='<f8').tobytes()
        blocks.append({'name': name, 'shape': list(param.shape), 'dtype': '<f8',
                       'data': base64.b64encode(data).decode('ascii')})
    return {'format': FORMAT, 'version': VERSION, 'label': label,
            'metadata': dict(metadata or {}), 'blocks': blocks}


def decode_into(document, bundle):
    """
    Copies the blocks of a checkpoint document into the arrays of ``bundle``.

    The names and shapes must match the bundle exactly, in order.

    :param document: The checkpoint document
    :type document:  ``dict``

    :param bundle: The parameters to overwrite (in place)
    :type bundle:  :class:`~qforecast.nn.optim.ParameterBundle`

    :return: The checkpoint metadata
    :rtype:  ``dict``
    """
    if type(document) != dict or document.get('format') != FORMAT:
        raise FileToolError('document is not a %s' % FORMAT)
    if document.get('version') != VERSION:
        raise FileToolError('checkpoint version %s is not supported' % repr(document.get('version')))
    blocks = document.get('blocks', [])
    names = bundle.names()
    if [block.get('name') for block in blocks] != names:
        raise UsageError('checkpoint blocks %s do not match parameters %s'
                         % ([block.get('name') for block in blocks], names))
    for block, (name, param, grad) in zip(blocks, bundle):
        if tuple(block['shape']) != param.shape or block.get('dtype') != '<f8':
            raise UsageError('checkpoint block %s has shape %s, expected %s'
                             % (repr(name), repr(block['shape']), repr(param.shape)))
        try:
            raw = base64.b64decode(block['data'], validate=True)
        except (binascii.Error, TypeError):
            raise FileToolError('checkpoint block %s is not base64' % repr(name))
        if len(raw) != 8 * param.size:
            raise FileToolError('checkpoint block %s is truncated' % repr(name))
        param[...] = np.frombuffer(raw, dtype='<f8').reshape(param.shape)
    return document.get('metadata', {})


def save_checkpoint(bundle, filename, label='', metadata=None):
    """
    Writes ``bundle`` to the checkpoint file ``filename``.

    :param bundle: The parameters to store
    :type bundle:  :class:`~qforecast.nn.optim.ParameterBundle`

    :param filename: The file to write (extension .json)
    :type filename:  ``str``

    :return: The name of the file written
    :rtype:  ``str``
    """
    return filetools.write_json(encode_bundle(bundle, label, metadata), filename)


def load_checkpoint(filename, bundle):
    """
    Reads the checkpoint file ``filename`` into the arrays of ``bundle``.

    :param filename: The file to read
    :type filename:  ``str``

    :param bundle: The parameters to overwrite (in place)
    :type bundle:  :class:`~qforecast.nn.optim.ParameterBundle`

    :return: The label and metadata of the checkpoint
    :rtype:  ``tuple``
    """
    document = filetools.read_json(filename)
    metadata = decode_into(document, bundle)
    return document.get('label', ''), metadata
