"""Tests of the builtin potentials and of the potential files."""
import os

import numpy as np
import pytest

from dark_soliton_lab.core import SpatialGrid
from dark_soliton_lab.exceptions import ConfigurationError
from dark_soliton_lab.nsoliton import nsoliton_eval
from dark_soliton_lab.potentials import (
    BUILTINS, Potential, compact_bump, gaussian, parse_angle, parse_angles, read_potential_file
)
from dark_soliton_lab.utils import csv_bytes


@pytest.mark.parametrize(
    'text,expected', [
        ('pi/3', np.pi / 3),
        ('2pi/3', 2 * np.pi / 3),
        ('2*pi/3', 2 * np.pi / 3),
        ('pi', np.pi),
        ('0.5pi', np.pi / 2),
        (' PI / 4 ', np.pi / 4),
        ('1.2', 1.2),
        (0.7, 0.7),
    ]
)
def test_parse_angle(text, expected):
    """Angles are floats or multiples of pi."""
    assert parse_angle(text) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize('text', ['pi/0', 'tau', '3pi/x', ''])
def test_parse_angle_invalid(text):
    """Malformed angles raise a ConfigurationError."""
    with pytest.raises(ConfigurationError):
        parse_angle(text)


def test_parse_angles():
    """Lists and comma-separated strings."""
    assert parse_angles('pi/3, 2pi/3') == pytest.approx([np.pi / 3, 2 * np.pi / 3])
    assert parse_angles([1, 'pi/2']) == pytest.approx([1., np.pi / 2])


def test_perturbations():
    """The Gaussian and the compact bump."""
    x = np.array([-2., -1., 0., 0.5, 1., 3.])
    assert np.allclose(gaussian(x, amplitude=[0., 2.], sigma=2.), 2j * np.exp(-x**2 / 4.))
    bump = compact_bump(x, amplitude=0.5, width=1., center=0.)
    assert bump[2] == pytest.approx(0.5)
    assert np.all(bump[[0, 1, 4, 5]] == 0)
    assert bump[3] == pytest.approx(0.5 * np.exp(1. - 1. / 0.75))
    with pytest.raises(ConfigurationError):
        gaussian(x, amplitude=[1., 2., 3.])


def test_sample_builtins(small_grid):
    """Every builtin samples to finite values; the soliton potentials match the synthesis."""
    params = {
        'black-soliton': {},
        'dark-soliton': {'theta': 'pi/3', 'x0': 1.},
        'nsoliton': {'thetas': 'pi/3,2pi/3', 'centres': [-3., 3.]},
        'tanh+gaussian': {'A': 0.1},
        'tanh+compact-bump': {'A': 0.1, 'width': 2.},
        'gaussian': {},
        'compact-bump': {'center': 1.},
    }
    assert set(params) == set(BUILTINS)
    for name, builtin_params in params.items():
        potential = Potential(name, builtin_params)
        q = potential.sample(small_grid)
        assert q.grid == small_grid
        assert np.all(np.isfinite(q.values))
        if potential.is_soliton:
            spec = potential.soliton_spec()
            assert np.max(np.abs(q.values - nsoliton_eval(spec, small_grid.x, 0.))) < 1e-10

    black = Potential('black-soliton').sample(small_grid)
    assert np.max(np.abs(black.values - np.tanh(small_grid.x))) < 1e-12
    assert not Potential('tanh+gaussian', {'A': 0.1}).is_soliton
    with pytest.raises(ConfigurationError):
        Potential('tanh+gaussian', {'A': 0.1}).soliton_spec()
    with pytest.raises(ConfigurationError):
        Potential('nsoliton', {'thetas': [1.], 'centres': [0.], 't': 1.}).soliton_spec()


@pytest.mark.parametrize(
    'kwargs', [
        {},
        {'name': 'square'},
        {'name': 'tanh+gaussian'},
        {'name': 'tanh+gaussian', 'params': {'A': 0.1, 'B': 1.}},
        {'name': 'nsoliton', 'params': {'thetas': [1.]}},
        {'name': 'nsoliton', 'params': {'thetas': [1.], 'centres': [0.], 'abs_couplings': [1.]}},
        {'name': 'dark-soliton', 'params': {'theta': 'half'}},
        {'path': 'q.csv', 'params': {'A': 1.}},
        {'name': 'black-soliton', 'path': 'q.csv'},
    ]
)
def test_invalid_potential(kwargs):
    """Invalid descriptions raise a ConfigurationError."""
    with pytest.raises(ConfigurationError):
        Potential(**kwargs)


def test_dict():
    """Descriptions are normalised and read back."""
    potential = Potential.from_dict({'name': 'dark-soliton', 'params': {'theta': 'pi/2'}})
    assert potential.params == {'theta': pytest.approx(np.pi / 2)}
    assert Potential.from_dict(potential.to_dict()) == potential
    assert Potential.from_dict({'file': 'q.csv'}).to_dict() == {'file': 'q.csv'}
    assert Potential.from_dict({'file': 'q.csv'}).name == 'file'
    with pytest.raises(ConfigurationError):
        Potential.from_dict({'name': 'black-soliton', 'other': 1})
    with pytest.raises(ConfigurationError):
        Potential.from_dict('black-soliton')


def test_potential_file(temp_dir):
    """A potential is read back from its CSV file on the same grid."""
    grid = SpatialGrid.symmetric(10., 64)
    values = np.tanh(grid.x) + 0.1j * np.exp(-grid.x**2)
    path = os.path.join(temp_dir, 'q.csv')
    with open(path, 'wb') as fhandle:
        fhandle.write(csv_bytes(('x', 'q_re', 'q_im'), [grid.x, values.real, values.imag]))

    q = read_potential_file(path)
    assert q.grid == grid
    assert np.array_equal(q.values, values)
    assert Potential(path=path).sample(None).grid == grid

    with pytest.raises(FileNotFoundError):
        read_potential_file(os.path.join(temp_dir, 'missing.csv'))


@pytest.mark.parametrize(
    'x,header', [
        (np.linspace(-1., 1., 60, endpoint=False), ('x', 'q_re', 'q_im')),
        (np.array([0., 1., 2., 4.]), ('x', 'q_re', 'q_im')),
        (np.array([0., 1., 2.]), ('x', 'q_re', 'q_im')),
        (np.array([0., 1., 2., 3.]), ('x', 'q_re', 'q_im', 'extra')),
    ]
)
def test_invalid_potential_file(temp_dir, x, header):
    """Wrong columns, non-uniform samples and grids that are not a power of two are rejected."""
    path = os.path.join(temp_dir, 'q.csv')
    with open(path, 'wb') as fhandle:
        fhandle.write(csv_bytes(header, [x] * len(header)))
    with pytest.raises(ConfigurationError):
        read_potential_file(path)
