"""The run configuration: builtin defaults, JSON files and command-line overrides, validated before execution.

Precedence is defaults < JSON file < flags. Unknown keys are rejected at every level.
"""
import copy
import json
import logging
import numbers
import os

from .core import SpatialGrid, SpectralGrid
from .exceptions import ConfigurationError, GridError
from .potentials import Potential, parse_angles

LOGGER = logging.getLogger(__name__)

CONFIG_VERSION = 1
COMMANDS = ('scatter', 'synthesize', 'evolve', 'predict', 'experiment')
EXPERIMENTS = ('theorem1', 'theorem2', 'appendixC', 'coeffevo', 'phaseregions')

# Used when the experiment section does not give the perturbation sizes
DEFAULT_EPS = {
    'theorem1': [0.05],
    'theorem2': [0.01, 0.02],
    'appendixC': [0.02, 0.04, 0.08],
    'coeffevo': [0.1],
    'phaseregions': [],
}

DEFAULTS = {
    'config_version': CONFIG_VERSION,
    'command': None,
    'potential': {
        'name': 'black-soliton',
        'params': {}
    },
    'grid': {
        'L': 40.,
        'n': 2048
    },
    'spectral': {
        'z_nodes': 48,
        'delta0': 0.05,
        'delta1': 0.02,
        'n_scan': 256
    },
    'evolution': {
        'dt': 2e-3,
        't_final': 1.,
        'snapshot_every': None,
        'boundary_tolerance': 1e-6
    },
    'asymptotics': {
        'rho': None,
        'xi_max': 0.8,
        't': 10.,
        'n_x': 201
    },
    'synthesis': {
        'poles': None,
        'couplings': None,
        'centres': None,
        't': 0.
    },
    'experiment': {
        'name': None,
        'eps': None,
        't_list': [5., 10., 20., 40.],
        'xi_list': None,
        'seed': 0,
        'samples': 1000,
        'sign': 1,
        'perturbation': {
            'name': 'gaussian',
            'params': {
                'A': 1.,
                'sigma': 1.
            }
        }
    },
    'out': None,
}

_REAL = 'real'
_INT = 'int'
_OPTIONAL_REAL = 'optional real'
_REAL_LIST = 'real list'
_OPTIONAL_REAL_LIST = 'optional real list'
_OPTIONAL_ANGLES = 'optional angles'
_OPTIONAL_STRING = 'optional string'
_POTENTIAL = 'potential'

SCHEMA = {
    'config_version': _INT,
    'command': _OPTIONAL_STRING,
    'potential': _POTENTIAL,
    'grid': {
        'L': _REAL,
        'n': _INT
    },
    'spectral': {
        'z_nodes': _INT,
        'delta0': _REAL,
        'delta1': _REAL,
        'n_scan': _INT
    },
    'evolution': {
        'dt': _REAL,
        't_final': _REAL,
        'snapshot_every': _OPTIONAL_REAL,
        'boundary_tolerance': _REAL
    },
    'asymptotics': {
        'rho': _OPTIONAL_REAL,
        'xi_max': _REAL,
        't': _REAL,
        'n_x': _INT
    },
    'synthesis': {
        'poles': _OPTIONAL_ANGLES,
        'couplings': _OPTIONAL_REAL_LIST,
        'centres': _OPTIONAL_REAL_LIST,
        't': _REAL
    },
    'experiment': {
        'name': _OPTIONAL_STRING,
        'eps': _OPTIONAL_REAL_LIST,
        't_list': _REAL_LIST,
        'xi_list': _OPTIONAL_REAL_LIST,
        'seed': _INT,
        'samples': _INT,
        'sign': _INT,
        'perturbation': _POTENTIAL
    },
    'out': _OPTIONAL_STRING,
}


def parse_real_list(value):
    """Parse a comma-separated string or a list of numbers."""
    if isinstance(value, str):
        value = [token for token in value.split(',') if token.strip()]
    try:
        return [float(item) for item in value]
    except (TypeError, ValueError):
        raise ConfigurationError('Invalid list of numbers: {!r}'.format(value))


def _is_real(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def _check_value(key, kind, value):
    """Validate and normalise one leaf value."""
    if kind == _POTENTIAL:
        return Potential.from_dict(value).to_dict()
    if value is None and kind.startswith('optional'):
        return None
    if kind == _INT:
        if isinstance(value, bool) or not isinstance(value, numbers.Integral):
            raise ConfigurationError("'{}' must be an integer, got {!r}".format(key, value))
        return int(value)
    if kind in (_REAL, _OPTIONAL_REAL):
        if not _is_real(value):
            raise ConfigurationError("'{}' must be a number, got {!r}".format(key, value))
        return float(value)
    if kind == _OPTIONAL_STRING:
        if not isinstance(value, str):
            raise ConfigurationError("'{}' must be a string, got {!r}".format(key, value))
        return value
    if kind in (_REAL_LIST, _OPTIONAL_REAL_LIST):
        return parse_real_list(value)
    if kind == _OPTIONAL_ANGLES:
        return parse_angles(value)
    raise ConfigurationError('Unknown kind {} for {}'.format(kind, key))


def _merge(base, update, schema, prefix=''):
    """Merge ``update`` into a copy of ``base``, rejecting keys absent from ``schema``."""
    if not isinstance(update, dict):
        raise ConfigurationError("'{}' must be a dict, got {!r}".format(prefix or 'config', update))
    merged = copy.deepcopy(base)
    for key, value in update.items():
        full_key = '{}.{}'.format(prefix, key) if prefix else key
        if key not in schema:
            raise ConfigurationError("Unknown configuration key '{}'".format(full_key))
        if isinstance(schema[key], dict):
            merged[key] = _merge(base[key], value, schema[key], full_key)
        else:
            merged[key] = _check_value(full_key, schema[key], value)
    return merged


class RunConfig:
    """A validated configuration of a run."""

    def __init__(self, data=None):
        """Merge ``data`` onto the defaults and validate the result.

        :raise ConfigurationError: on unknown keys, wrong types or invalid values
        """
        self._data = _merge(DEFAULTS, data or {}, SCHEMA)
        self._validate()

    @classmethod
    def from_dict(cls, data):
        """Build a configuration from a (possibly partial) dict."""
        return cls(data)

    @classmethod
    def from_file(cls, path):
        """Load a configuration from a JSON file.

        :raise FileNotFoundError: if the file does not exist
        """
        if not os.path.exists(path):
            raise FileNotFoundError('Configuration file not found: {}'.format(path))
        with open(path) as fhandle:
            try:
                data = json.load(fhandle)
            except ValueError as exc:
                raise ConfigurationError('Invalid JSON in {}: {}'.format(path, exc))
        return cls(data)

    def with_overrides(self, overrides):
        """Return a new configuration with the given overrides applied (flags win).

        :param overrides: a dict mapping dotted keys (e.g. ``'grid.L'``) to values; None values are ignored
        """
        data = self.to_dict()
        for dotted, value in overrides.items():
            if value is None:
                continue
            keys = dotted.split('.')
            target = data
            for key in keys[:-1]:
                target = target.setdefault(key, {})
            target[keys[-1]] = value
        return RunConfig(data)

    def _validate(self):
        data = self._data
        if data['config_version'] != CONFIG_VERSION:
            raise ConfigurationError('Unsupported config_version {}'.format(data['config_version']))
        if data['command'] is not None and data['command'] not in COMMANDS:
            raise ConfigurationError("Unknown command '{}', valid commands are: {}".format(
                data['command'], ', '.join(COMMANDS)))
        if not data['grid']['L'] > 0:
            raise ConfigurationError("'grid.L' must be positive, got {}".format(data['grid']['L']))
        try:
            SpatialGrid.symmetric(data['grid']['L'], data['grid']['n'])
        except GridError as exc:
            raise ConfigurationError("Invalid 'grid.n': {}".format(exc))
        spectral = data['spectral']
        for key in ('delta0', 'delta1'):
            if not 0 < spectral[key] < 0.5:
                raise ConfigurationError("'spectral.{}' must be in (0, 0.5), got {}".format(key, spectral[key]))
        if spectral['z_nodes'] < 4:
            raise ConfigurationError("'spectral.z_nodes' must be at least 4, got {}".format(spectral['z_nodes']))
        evolution = data['evolution']
        if not 0 < evolution['dt'] <= 1e-2:
            raise ConfigurationError("'evolution.dt' must be in (0, 1e-2], got {}".format(evolution['dt']))
        if evolution['t_final'] < 0:
            raise ConfigurationError("'evolution.t_final' must be non-negative, got {}".format(evolution['t_final']))
        asymptotics = data['asymptotics']
        if asymptotics['rho'] is not None and not asymptotics['rho'] > 0:
            raise ConfigurationError("'asymptotics.rho' must be positive, got {}".format(asymptotics['rho']))
        if not 0 < asymptotics['xi_max'] < 1:
            raise ConfigurationError("'asymptotics.xi_max' must be in (0, 1), got {}".format(asymptotics['xi_max']))
        if not asymptotics['t'] > 0:
            raise ConfigurationError("'asymptotics.t' must be positive, got {}".format(asymptotics['t']))
        synthesis = data['synthesis']
        if synthesis['couplings'] is not None and synthesis['centres'] is not None:
            raise ConfigurationError("Specify at most one of 'synthesis.couplings' and 'synthesis.centres'")
        experiment = data['experiment']
        if experiment['name'] is not None and experiment['name'] not in EXPERIMENTS:
            raise ConfigurationError("Unknown experiment '{}', valid names are: {}".format(
                experiment['name'], ', '.join(EXPERIMENTS)))
        if experiment['xi_list'] is not None and any(abs(xi) >= 1 for xi in experiment['xi_list']):
            raise ConfigurationError("'experiment.xi_list' must lie in (-1, 1), got {}".format(experiment['xi_list']))
        if experiment['samples'] < 1:
            raise ConfigurationError("'experiment.samples' must be positive, got {}".format(experiment['samples']))
        if experiment['sign'] not in (1, -1):
            raise ConfigurationError("'experiment.sign' must be +1 or -1, got {}".format(experiment['sign']))

    def __getitem__(self, key):
        return self._data[key]

    @property
    def command(self):
        """The pipeline to run."""
        return self._data['command']

    @property
    def potential(self):
        """The :py:class:`~dark_soliton_lab.potentials.Potential` of the run."""
        return Potential.from_dict(self._data['potential'])

    @property
    def perturbation(self):
        """The perturbation f of the experiments, as a :py:class:`~dark_soliton_lab.potentials.Potential`."""
        return Potential.from_dict(self._data['experiment']['perturbation'])

    @property
    def spatial_grid(self):
        """The :py:class:`~dark_soliton_lab.core.SpatialGrid` [-L, L) with n samples."""
        return SpatialGrid.symmetric(self._data['grid']['L'], self._data['grid']['n'])

    @property
    def spectral_grid(self):
        """The :py:class:`~dark_soliton_lab.core.SpectralGrid`."""
        spectral = self._data['spectral']
        return SpectralGrid(spectral['z_nodes'], spectral['delta0'], spectral['delta1'])

    @property
    def eps_list(self):
        """The perturbation sizes of the experiment (experiment-specific default if not set)."""
        eps = self._data['experiment']['eps']
        if eps is None:
            return list(DEFAULT_EPS.get(self._data['experiment']['name'], [0.05]))
        return list(eps)

    def to_dict(self):
        """Return a deep copy of the fully resolved configuration."""
        return copy.deepcopy(self._data)

    def __eq__(self, other):
        if not isinstance(other, RunConfig):
            return NotImplemented
        return self._data == other.to_dict()

    def __repr__(self):
        return 'RunConfig(command={!r})'.format(self._data['command'])
