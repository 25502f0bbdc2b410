"""Tests of the grids, grid functions and spectral maps."""
import numpy as np
import pytest

from dark_soliton_lab.core import (
    GridFunction, SpatialGrid, SpectralGrid, background, background_second_derivative, circle_phase, phase_phi,
    spectral_lambda, spectral_zeta
)
from dark_soliton_lab.exceptions import GridError, SpectralDomainError


def test_spectral_maps():
    """lambda and zeta satisfy lambda^2 - zeta^2 = 1 and refuse z = 0."""
    z = np.array([0.3 + 0.2j, -2., 1j, 5.])
    assert np.allclose(spectral_lambda(z)**2 - spectral_zeta(z)**2, 1.)
    assert np.allclose(spectral_lambda(1. / z), spectral_lambda(z))
    assert np.allclose(spectral_zeta(1. / z), -spectral_zeta(z))

    with pytest.raises(SpectralDomainError):
        spectral_lambda(0.)
    with pytest.raises(SpectralDomainError):
        spectral_zeta(np.array([1., 0.]))


def test_phase():
    """Phi is imaginary on the real axis and real on the unit circle."""
    x, t = 1.3, 0.7
    real_z = np.array([-3., -0.4, 0.2, 2.5])
    assert np.allclose(phase_phi(real_z, x, t).real, 0.)

    theta = np.linspace(0.1, 3., 7)
    on_circle = phase_phi(np.exp(1j * theta), x, t)
    assert np.allclose(on_circle.imag, 0., atol=1e-12)
    assert np.allclose(on_circle.real, circle_phase(theta, x, t))


def test_background():
    """The background joins q_minus to 1, and its second derivative matches finite differences."""
    assert np.allclose(background(np.array([-50., 50.])), [-1., 1.])
    q_minus = np.exp(0.4j)
    assert np.isclose(background(-50., q_minus), q_minus)
    assert np.isclose(background(50., q_minus), 1.)

    x = np.linspace(-3., 3., 11)
    step = 1e-4
    finite_difference = (background(x + step, q_minus) - 2. * background(x, q_minus) +
                         background(x - step, q_minus)) / step**2
    assert np.allclose(background_second_derivative(x, q_minus), finite_difference, atol=1e-5)


def test_spatial_grid():
    """Basic properties of a spatial grid."""
    grid = SpatialGrid.symmetric(40., 2048)
    assert grid.n == 2048
    assert grid.length == 80.
    assert grid.h == 80. / 2048
    assert grid.x[0] == -40.
    assert grid.x[-1] < 40.
    assert grid.index_of(0.) == 1024
    assert SpatialGrid.from_dict(grid.to_dict()) == grid
    assert len({grid, SpatialGrid.symmetric(40., 2048)}) == 1

    with pytest.raises(GridError):
        grid.index_of(41.)


@pytest.mark.parametrize('args', [(-1., 1., 1000), (-1., 1., 1), (1., -1., 16), (0., 0., 16)])
def test_spatial_grid_invalid(args):
    """Invalid ends or non-power-of-two sizes are rejected."""
    with pytest.raises(GridError):
        SpatialGrid(*args)


def test_spectral_grid():
    """The nodes are sorted, closed under z -> 1/z and z -> -z, and avoid the exclusion windows."""
    grid = SpectralGrid(12, delta0=0.05, delta1=0.02)
    z = grid.z
    assert grid.size == 48
    assert len(z) == 48
    assert np.all(np.diff(z) > 0)
    assert np.allclose(z[grid.reciprocal_index], 1. / z)
    assert np.allclose(z[::-1], -z)
    assert np.all(np.abs(z) >= 0.05 - 1e-14)
    assert np.all(np.abs(np.abs(z) - 1.) >= 0.0196)
    assert np.all(z[grid.positive_slice] > 0)
    assert [len(z[run]) for run in grid.runs] == [12] * 4
    assert SpectralGrid.from_dict(grid.to_dict()) == grid


@pytest.mark.parametrize('kwargs', [{'z_nodes': 2}, {'delta0': 0.}, {'delta1': 0.6}, {'delta0': -0.1}])
def test_spectral_grid_invalid(kwargs):
    """Invalid spectral grid parameters are rejected."""
    with pytest.raises(GridError):
        SpectralGrid(**kwargs)


def test_grid_function(small_grid):
    """Grid functions are read-only, can be combined and interpolated."""
    q = GridFunction.from_function(small_grid, np.tanh)
    assert not q.values.flags.writeable
    assert np.isclose(q.q_minus, -1.)
    assert np.isclose(q.left_value, np.tanh(-30.))

    bump = GridFunction(small_grid, np.exp(-small_grid.x**2))
    perturbed = q.perturbed(bump, 0.1)
    assert np.isclose(perturbed.sup_distance(q), 0.1)

    points = np.array([-1.234, 0.5, 7.77])
    assert np.allclose(q.interpolate(points), np.tanh(points), atol=1e-6)

    with pytest.raises(GridError):
        GridFunction(small_grid, np.zeros(3))
    with pytest.raises(GridError):
        q.perturbed(GridFunction(SpatialGrid.symmetric(30., 512), np.zeros(512)), 1.)


def test_grid_function_refine(small_grid):
    """Refinement keeps the coarse samples and is spectrally accurate on smooth data."""
    values = np.tanh(small_grid.x) + 0.1 * np.exp(-small_grid.x**2)
    q = GridFunction(small_grid, values)
    x_fine, q_fine = q.refine(4)
    assert len(x_fine) == 4 * small_grid.n + 1
    assert np.isclose(x_fine[-1], small_grid.x_max)
    assert np.allclose(q_fine[::4][:-1], values, atol=1e-10)
    assert np.allclose(q_fine, np.tanh(x_fine) + 0.1 * np.exp(-x_fine**2), atol=1e-8)

    with pytest.raises(GridError):
        q.refine(3)


def test_grid_function_padded():
    """Padding extends the box by a power of two with the background, keeping the spacing and the samples."""
    grid = SpatialGrid.symmetric(10., 256)
    values = np.tanh(grid.x) + 0.1 * np.exp(-grid.x**2)
    q = GridFunction(grid, values)
    assert q.padded(8.) is q

    padded = q.padded(35.)
    assert padded.grid == SpatialGrid.symmetric(40., 1024)
    assert np.isclose(padded.grid.h, grid.h)
    start = padded.grid.index_of(grid.x_min)
    assert np.array_equal(padded.values[start:start + grid.n], values)
    outside = np.ones(padded.grid.n, dtype=bool)
    outside[start:start + grid.n] = False
    assert np.allclose(padded.values[outside], np.tanh(padded.grid.x[outside]), atol=1e-15)

    # The box grows about its own centre
    shifted = GridFunction(SpatialGrid(0., 10., 64), np.ones(64)).padded(12.)
    assert (shifted.grid.x_min, shifted.grid.x_max, shifted.grid.n) == (-15., 25., 256)
    assert np.allclose(shifted.values, 1.)
