"""
Tools to simplify the loading and saving of text, JSON and CSV files.

Every failure is reported as a :class:`~qforecast.errors.FileToolError` naming the
file, so the command line tool can turn it into a clean exit code.  JSON is written
with sorted keys and a fixed indent, and CSV with ``\\n`` line endings, so that two
runs producing the same data produce the same bytes.

:author:  qforecast developers
:version: October 17, 2026
"""
import csv
import hashlib
import io
import json
import os
import os.path

from .errors import FileToolError


def read_txt(filename):
    """
    Reads the contents of the text file ``filename``.

    :param filename: The file to read
    :type filename:  ``str``

    :return: A string representing the file contents
    :rtype:  ``str``
    """
    try:
        with open(filename, encoding='utf-8') as file:
            return file.read()
    except FileNotFoundError:
        message = 'Text file %s does not exist' % repr(filename)
    except Exception as e:
        message = 'Text file %s has error %s' % (repr(filename), str(e))
    raise FileToolError(message)


def read_json(filename):
    """
    Reads the contents of the JSON file ``filename``.

    An empty file is an error, as is any file that is not proper JSON.

    :param filename: The file to read
    :type filename:  ``str``

    :return: A dictionary or list representing the file contents
    :rtype:  ``dict`` or ``list``
    """
    text = read_txt(filename)
    if not text.strip():
        raise FileToolError('JSON file %s is empty' % repr(filename))
    try:
        return json.loads(text)
    except json.decoder.JSONDecodeError as e:
        message = str(e)
        pos = message.find(':')
        message = 'JSON file %s has an error at%s' % (repr(filename), message[pos+1:])
    raise FileToolError(message)


def read_csv(filename):
    """
    Reads the contents of the CSV file ``filename``.

    The result is a 2-dimensional list whose first row is the header.  Cells are all
    strings.  Every row must have as many cells as the header.

    :param filename: The file to read
    :type filename:  ``str``

    :return: A two dimensional list including the header as the first row
    :rtype:  2d ``list``
    """
    try:
        with open(filename, newline='', encoding='utf-8') as csvfile:
            result = [row for row in csv.reader(csvfile)]
    except FileNotFoundError:
        raise FileToolError('CSV file %s does not exist' % repr(filename))
    except Exception as e:
        raise FileToolError('CSV file %s has error %s' % (repr(filename), str(e)))

    if not result:
        raise FileToolError('CSV file %s is empty' % repr(filename))
    for pos in range(1, len(result)):
        if len(result[pos]) != len(result[0]):
            raise FileToolError('CSV file %s has invalid row at %d' % (repr(filename), pos))
    return result


def _prepare(filename):
    """
    Creates the parent directory of ``filename`` if needed. [INTERNAL FUNCTION]
    """
    folder = os.path.dirname(filename)
    if folder:
        os.makedirs(folder, exist_ok=True)


def write_txt(data, filename):
    """
    Writes the given string out as a text file ``filename``.

    The file is written to a temporary name and then moved into place, so readers
    never see a partial file.

    :param data: The text to write to a file
    :type data:  ``str``

    :param filename: The file to write
    :type filename:  ``str``
    """
    try:
        _prepare(filename)
        temp = '%s.%d.part' % (filename, os.getpid())
        with open(temp, 'w', encoding='utf-8', newline='') as file:
            file.write(data)
        os.replace(temp, filename)
        return
    except PermissionError as e:
        message = e.strerror + ': ' + filename
    except Exception as e:
        message = 'Cannot write %s: %s' % (repr(filename), str(e))
    raise FileToolError(message)


def dumps_json(data):
    """
    Returns the canonical JSON text of ``data``.

    Keys are sorted and the indent is fixed, with a trailing newline.

    :param data: The Python value to encode
    :type data:  JSON-encodable value

    :return: The JSON text
    :rtype:  ``str``
    """
    try:
        return json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + '\n'
    except (TypeError, ValueError) as e:
        raise FileToolError('Value cannot be written as JSON: %s' % str(e))


def write_json(data, filename):
    """
    Writes the given data out as a JSON file ``filename``.

    The JSON filename must either have no extension, or the extension .json.  Any other
    extension will cause an error.

    :param data: The Python value to encode as a JSON
    :type data:  JSON-encodable value

    :param filename: The file to write
    :type filename:  ``str``

    :return: The name of the file written
    :rtype:  ``str``
    """
    prefix, ext = os.path.splitext(filename)
    if ext == '':
        filename += '.json'
    elif ext != '.json':
        raise FileToolError('%s is not a valid JSON extension' % repr(ext))
    write_txt(dumps_json(data), filename)
    return filename


def write_csv(data, filename):
    """
    Writes the given data out as a CSV file ``filename``.

    To be a proper CSV file, it must be a 2-dimensional list with the first row
    containing only strings.  Floats are written with ``repr`` so that they read back
    exactly.

    The CSV filename must either have no extension, or the extension .csv.  Any other
    extension will cause an error.

    :param data: The Python value to encode as a CSV file
    :type data:  2d ``list``

    :param filename: The file to write
    :type filename:  ``str``

    :return: The name of the file written
    :rtype:  ``str``
    """
    prefix, ext = os.path.splitext(filename)
    if ext == '':
        filename += '.csv'
    elif ext != '.csv':
        raise FileToolError('%s is not a valid CSV extension' % repr(ext))

    message = _check_csv(data)
    if message:
        raise FileToolError(message)

    buffer = io.StringIO()
    writer = csv.writer(buffer, quoting=csv.QUOTE_MINIMAL, lineterminator='\n')
    for row in data:
        writer.writerow([repr(float(cell)) if isinstance(cell, float) else cell for cell in row])
    write_txt(buffer.getvalue(), filename)
    return filename


def file_checksum(filename):
    """
    Returns the SHA-256 hex digest of the file ``filename``.

    :param filename: The file to hash
    :type filename:  ``str``

    :return: The hex digest
    :rtype:  ``str``
    """
    try:
        digest = hashlib.sha256()
        with open(filename, 'rb') as file:
            for chunk in iter(lambda: file.read(1 << 16), b''):
                digest.update(chunk)
        return digest.hexdigest()
    except FileNotFoundError:
        message = 'File %s does not exist' % repr(filename)
    except Exception as e:
        message = 'File %s has error %s' % (repr(filename), str(e))
    raise FileToolError(message)


pass
# #mark -
# #mark CSV Helpers
def _check_csv(data):
    """
    Returns a string representing an error message if data is malformed [INTERNAL FUNCTION]

    If the data is a properly formed CSV value, this function returns the empty string.

    Parameter data: The Python value to encode as a CSV file
    Precondition: None
    """
    if type(data) not in [tuple, list] or not data:
        return 'CSV data is neither a tuple nor a list'

    if not (type(data[0]) in [tuple, list] and all(type(cell) == str for cell in data[0])):
        return 'Row %s is not a valid CSV header' % repr(data[0])

    headlen = len(data[0])
    for pos in range(1, len(data)):
        if type(data[pos]) not in [tuple, list]:
            return 'Row %d is malformed' % pos
        elif len(data[pos]) != headlen:
            return 'Row %d does not match the header length' % pos

    return ''
