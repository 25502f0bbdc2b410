"""Builtin initial data and perturbations, and their (de)serialisation.

A :py:class:`Potential` is identified by a builtin name and a dict of parameters, or by the path of a CSV file with
columns ``x, q_re, q_im`` sampled on a uniform power-of-two grid.
"""
import logging
import numbers
import os
import re

import numpy as np

from .core import GridFunction, SpatialGrid
from .exceptions import ConfigurationError, GridError
from .nsoliton import SolitonSpec, nsoliton_eval, one_soliton

LOGGER = logging.getLogger(__name__)

_ANGLE_PATTERN = re.compile(r'^(?P<factor>[0-9]*\.?[0-9]*)\s*\*?\s*pi\s*(?:/\s*(?P<divisor>[0-9]*\.?[0-9]+))?$')


def parse_angle(text):
    """Parse an angle given as a float or as ``[k]pi[/m]`` (e.g. ``'pi/3'``, ``'2pi/3'``, ``'0.5'``)."""
    if isinstance(text, numbers.Real):
        return float(text)
    token = str(text).strip().lower()
    match = _ANGLE_PATTERN.match(token)
    if match:
        factor = float(match.group('factor')) if match.group('factor') else 1.
        divisor = float(match.group('divisor')) if match.group('divisor') else 1.
        if divisor == 0:
            raise ConfigurationError('Division by zero in the angle {!r}'.format(text))
        return factor * np.pi / divisor
    try:
        return float(token)
    except ValueError:
        raise ConfigurationError('Invalid angle {!r}: expected a number or [k]pi[/m]'.format(text))


def parse_angles(value):
    """Parse a comma-separated string or a list of angles."""
    if isinstance(value, str):
        value = [token for token in value.split(',') if token.strip()]
    return [parse_angle(item) for item in value]


def _amplitude(value):
    """Return a complex amplitude from a number or a [re, im] pair."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigurationError('A complex amplitude must be given as [re, im], got {}'.format(value))
        return complex(value[0], value[1])
    return complex(value)


def gaussian(x, amplitude=1., sigma=1., x0=0.):
    """Return A exp(-(x - x0)^2 / sigma^2)."""
    return _amplitude(amplitude) * np.exp(-((x - x0) / sigma)**2)


def compact_bump(x, amplitude=1., width=1., center=0.):
    """Return the C-infinity bump A exp(1 - 1 / (1 - ((x - center) / width)^2)), zero for |x - center| >= width."""
    scaled = (np.asarray(x, dtype=float) - center) / width
    inside = np.abs(scaled) < 1.
    values = np.zeros(scaled.shape, dtype=complex)
    values[inside] = _amplitude(amplitude) * np.exp(1. - 1. / (1. - scaled[inside]**2))
    return values


def _soliton_spec(params):
    """Return the :py:class:`~dark_soliton_lab.nsoliton.SolitonSpec` described by nsoliton parameters."""
    return SolitonSpec.from_thetas(params['thetas'], abs_couplings=params.get('abs_couplings'),
                                   centres=params.get('centres'))


def _sample_black(x, params):  # pylint: disable=unused-argument
    return np.tanh(x).astype(complex)


def _sample_dark(x, params):
    return one_soliton(x, 0., np.exp(1j * params['theta']), params.get('x0', 0.))


def _sample_nsoliton(x, params):
    return nsoliton_eval(_soliton_spec(params), x, params.get('t', 0.))


def _sample_tanh_gaussian(x, params):
    return np.tanh(x) + gaussian(x, params['A'], params.get('sigma', 1.), params.get('x0', 0.))


def _sample_tanh_bump(x, params):
    return np.tanh(x) + compact_bump(x, params['A'], params.get('width', 1.), params.get('center', 0.))


def _sample_gaussian(x, params):
    return gaussian(x, params.get('A', 1.), params.get('sigma', 1.), params.get('x0', 0.))


def _sample_bump(x, params):
    return compact_bump(x, params.get('A', 1.), params.get('width', 1.), params.get('center', 0.))


# name: (sampler, required parameters, optional parameters)
BUILTINS = {
    'black-soliton': (_sample_black, (), ()),
    'dark-soliton': (_sample_dark, ('theta',), ('x0',)),
    'nsoliton': (_sample_nsoliton, ('thetas',), ('abs_couplings', 'centres', 't')),
    'tanh+gaussian': (_sample_tanh_gaussian, ('A',), ('sigma', 'x0')),
    'tanh+compact-bump': (_sample_tanh_bump, ('A',), ('width', 'center')),
    # Perturbations (decaying at both ends), used as the f of the perturbation experiments
    'gaussian': (_sample_gaussian, (), ('A', 'sigma', 'x0')),
    'compact-bump': (_sample_bump, (), ('A', 'width', 'center')),
}
SOLITON_POTENTIALS = ('black-soliton', 'dark-soliton', 'nsoliton')


class Potential:
    """A builtin potential (name and parameters) or a potential read from a CSV file."""

    def __init__(self, name=None, params=None, path=None):
        """Validate and store the description.

        :param name: a key of :py:data:`BUILTINS`
        :param params: the parameters of the builtin
        :param path: the path of a CSV file (mutually exclusive with ``name``)
        :raise ConfigurationError: on unknown names, missing or unknown parameters
        """
        if (name is None) == (path is None):
            raise ConfigurationError('Specify exactly one of a builtin potential name or a file path')
        params = dict(params or {})
        if name is not None:
            if name not in BUILTINS:
                raise ConfigurationError("Unknown potential '{}', valid names are: {}".format(
                    name, ', '.join(sorted(BUILTINS))))
            _, required, optional = BUILTINS[name]
            missing = [key for key in required if key not in params]
            if missing:
                raise ConfigurationError("Potential '{}' is missing the parameters: {}".format(name, missing))
            unknown = sorted(set(params) - set(required) - set(optional))
            if unknown:
                raise ConfigurationError("Unknown parameters for potential '{}': {}".format(name, unknown))
            if name == 'nsoliton' and (params.get('abs_couplings') is None) == (params.get('centres') is None):
                raise ConfigurationError("Potential 'nsoliton' needs exactly one of 'abs_couplings' or 'centres'")
            if 'theta' in params:
                params['theta'] = parse_angle(params['theta'])
            if 'thetas' in params:
                params['thetas'] = parse_angles(params['thetas'])
        elif params:
            raise ConfigurationError('A file potential does not take parameters, got {}'.format(sorted(params)))
        self._name = name
        self._params = params
        self._path = path

    @property
    def name(self):
        """The builtin name, or 'file'."""
        return 'file' if self._path is not None else self._name

    @property
    def params(self):
        """A copy of the parameters."""
        return dict(self._params)

    @property
    def path(self):
        """The CSV path of a file potential (None for builtins)."""
        return self._path

    @property
    def is_soliton(self):
        """True if the potential is reflectionless by construction."""
        return self._name in SOLITON_POTENTIALS

    def soliton_spec(self):
        """Return the :py:class:`~dark_soliton_lab.nsoliton.SolitonSpec` of a reflectionless builtin."""
        if self._name == 'black-soliton':
            return SolitonSpec.from_thetas([np.pi / 2], abs_couplings=[2.])
        if self._name == 'dark-soliton':
            return SolitonSpec.from_thetas([self._params['theta']], centres=[self._params.get('x0', 0.)])
        if self._name == 'nsoliton':
            if self._params.get('t', 0.):
                raise ConfigurationError('The spectral data of an nsoliton potential are defined at t=0')
            return _soliton_spec(self._params)
        raise ConfigurationError("Potential '{}' is not a pure soliton".format(self.name))

    def sample(self, grid):
        """Return the potential as a :py:class:`~dark_soliton_lab.core.GridFunction` on ``grid``.

        A file potential comes with its own grid; ``grid`` is then only compared against it.
        """
        if self._path is not None:
            q = read_potential_file(self._path)
            if grid is not None and q.grid != grid:
                LOGGER.warning('Using the grid of %s (%r) instead of %r', self._path, q.grid, grid)
            return q
        sampler = BUILTINS[self._name][0]
        return GridFunction(grid, sampler(grid.x, self._params))

    def to_dict(self):
        """Return the JSON-serialisable description."""
        if self._path is not None:
            return {'file': self._path}
        return {'name': self._name, 'params': self.params}

    @classmethod
    def from_dict(cls, data):
        """Inverse of :py:meth:`to_dict`."""
        if not isinstance(data, dict):
            raise ConfigurationError('A potential must be described by a dict, got {!r}'.format(data))
        unknown = sorted(set(data) - {'name', 'params', 'file'})
        if unknown:
            raise ConfigurationError('Unknown keys in the potential description: {}'.format(unknown))
        return cls(name=data.get('name'), params=data.get('params'), path=data.get('file'))

    def __eq__(self, other):
        if not isinstance(other, Potential):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self):
        return 'Potential({!r})'.format(self.to_dict())


def read_potential_file(path):
    """Read a potential from a CSV file with a header line and the columns x, q_re, q_im.

    :raise FileNotFoundError: if the file does not exist
    :raise ConfigurationError: if the samples are not on a uniform power-of-two grid
    """
    if not os.path.exists(path):
        raise FileNotFoundError('Potential file not found: {}'.format(path))
    table = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
    if table.shape[1] != 3:
        raise ConfigurationError('Expected the columns x, q_re, q_im in {}, got {} columns'.format(
            path, table.shape[1]))
    x = table[:, 0]
    spacing = np.diff(x)
    if len(x) < 2 or np.max(np.abs(spacing - spacing[0])) > 1e-9 * max(1., abs(spacing[0])):
        raise ConfigurationError('The positions in {} are not uniformly spaced'.format(path))
    try:
        grid = SpatialGrid(x[0], x[-1] + spacing[0], len(x))
    except GridError as exc:
        raise ConfigurationError('Invalid grid in {}: {}'.format(path, exc))
    return GridFunction(grid, table[:, 1] + 1j * table[:, 2])
