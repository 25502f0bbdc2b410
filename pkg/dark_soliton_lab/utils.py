"""Utilities used by the ``RunFolder`` class: hashing, safe writes and deterministic serialisation of numbers."""
import hashlib
import io
import json
import math
import numbers
import os
import tempfile

import numpy as np

try:
    import fcntl
except ImportError:
    # Not available on Windows
    fcntl = None

_HASH_CHUNKSIZE = 524288


def get_hash(hash_type):
    """Return a hash class with an update method and a hexdigest method."""
    known_hashes = {'sha1': hashlib.sha1, 'sha256': hashlib.sha256}

    try:
        return known_hashes[hash_type]
    except KeyError:
        raise ValueError("Unknown or unsupported hash type '{}'".format(hash_type))


def compute_hash_and_size(stream, hash_type='sha256'):
    """Given a stream and a hash type, return the hash key (hexdigest) and the total size.

    :param stream: an open binary stream
    :param hash_type: the string with a name of a valid hash type
    :return: a tuple with ``(hash, size)`` where ``hash`` is the hexdigest and ``size`` is the size in bytes
    """
    hasher = get_hash(hash_type)()
    size = 0
    while True:
        chunk = stream.read(_HASH_CHUNKSIZE)
        if not chunk:
            break
        size += len(chunk)
        hasher.update(chunk)
    return hasher.hexdigest(), size


def safe_flush_to_disk(fhandle, real_path, use_fullsync=False):
    """Flush an open file to disk, and its parent folder too on POSIX.

    :param fhandle: an open file handle supporting ``fileno()`` and ``flush()``
    :param real_path: the absolute path of the file, used to find the parent folder
    :param use_fullsync: on Mac OS, run a F_FULLFSYNC to really push the data to disk
    """
    fhandle.flush()

    if hasattr(fcntl, 'F_FULLFSYNC') and use_fullsync:
        _fsync_function = lambda fileno: fcntl.fcntl(fileno, fcntl.F_FULLFSYNC)  # pylint: disable=no-member,useless-suppression
    else:
        _fsync_function = os.fsync

    _fsync_function(fhandle.fileno())

    if os.name == 'posix':
        dirfd = os.open(os.path.dirname(real_path), os.O_DIRECTORY)
        _fsync_function(dirfd)
        os.close(dirfd)


def safe_write(path, content, sandbox_folder):
    """Write bytes to ``path`` atomically: to a temporary file in the sandbox first, then renamed into place.

    :return: a tuple ``(hashkey, size)`` of the written content (sha256)
    """
    real_path = os.path.realpath(path)
    handle, temp_path = tempfile.mkstemp(dir=sandbox_folder)
    try:
        with os.fdopen(handle, 'wb') as fhandle:
            fhandle.write(content)
            safe_flush_to_disk(fhandle, os.path.realpath(temp_path))
        os.replace(temp_path, real_path)
    except Exception:
        if os.path.exists(temp_path):
            os.remove(temp_path)
        raise
    return compute_hash_and_size(io.BytesIO(content))


def format_float(value):
    """Return a float formatted so that it reads back to the same value ('{:.17g}')."""
    return '{:.17g}'.format(value)


def format_value(value):
    """Format a table cell: floats exactly, booleans and integers plainly, anything else with str."""
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        return format_float(float(value))
    if value is None:
        return ''
    return str(value)


def csv_bytes(header, columns):
    """Return the CSV serialisation of equally long columns, with a header line.

    :param header: the column names
    :param columns: sequences of numbers, one per column
    """
    if len(header) != len(columns):
        raise ValueError('Got {} column names for {} columns'.format(len(header), len(columns)))
    lengths = {len(column) for column in columns}
    if len(lengths) > 1:
        raise ValueError('All the columns must have the same length, got {}'.format(sorted(lengths)))
    lines = [','.join(header)]
    for row in zip(*columns):
        lines.append(','.join(format_value(value) for value in row))
    return ('\n'.join(lines) + '\n').encode('utf8')


def _to_jsonable(obj):
    """Convert numpy scalars and arrays, complex numbers and non-finite floats to JSON-compatible values."""
    if isinstance(obj, dict):
        return {str(key): _to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_to_jsonable(value) for value in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, numbers.Integral):
        return int(obj)
    if isinstance(obj, numbers.Complex) and not isinstance(obj, numbers.Real):
        return [_to_jsonable(obj.real), _to_jsonable(obj.imag)]
    if isinstance(obj, numbers.Real):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def json_bytes(obj):
    """Return a deterministic JSON serialisation (sorted keys, fixed indentation)."""
    return (json.dumps(_to_jsonable(obj), sort_keys=True, indent=2) + '\n').encode('utf8')
