"""Configuration file for pytest tests."""
import shutil
import tempfile

import numpy as np
import pytest

from dark_soliton_lab.core import GridFunction, SpatialGrid, SpectralGrid
from dark_soliton_lab.nsoliton import SolitonSpec


def pytest_addoption(parser):
    """Parse a new option to also run the slow (minutes-long) acceptance tests."""
    parser.addoption('--run-slow', action='store_true', default=False, help='Also run the tests marked as slow')


def pytest_configure(config):
    """Register the markers used in the test suite."""
    config.addinivalue_line('markers', 'slow: long-running acceptance test, only run with --run-slow')


def pytest_collection_modifyitems(config, items):
    """Skip the tests marked as slow, unless ``--run-slow`` is given on the command line."""
    if config.getoption('--run-slow'):
        return
    skip_slow = pytest.mark.skip(reason='slow test: use --run-slow to run it')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope='function')
def temp_dir():
    """Get a temporary directory.

    :return: The path to the directory
    :rtype: str
    """
    try:
        dirpath = tempfile.mkdtemp()
        yield dirpath
    finally:
        # after the test function has completed, remove the directory again
        shutil.rmtree(dirpath)


@pytest.fixture(scope='session')
def default_grid():
    """The default box [-40, 40) with 2048 samples."""
    return SpatialGrid.symmetric(40., 2048)


@pytest.fixture(scope='session')
def small_grid():
    """A coarser box [-30, 30) with 1024 samples, for quick tests."""
    return SpatialGrid.symmetric(30., 1024)


@pytest.fixture(scope='session')
def spectral_grid():
    """A spectral grid with fewer nodes than the default, for quick tests."""
    return SpectralGrid(16)


@pytest.fixture(scope='session')
def black_soliton(default_grid):  # pylint: disable=redefined-outer-name
    """The black soliton tanh(x) on the default grid."""
    return GridFunction(default_grid, np.tanh(default_grid.x))


@pytest.fixture(scope='session')
def perturbed_black_soliton():
    """Return a function giving tanh(x) + amplitude exp(-x^2) on a given grid."""

    def _perturbed(grid, amplitude):
        return GridFunction(grid, np.tanh(grid.x) + amplitude * np.exp(-grid.x**2))

    return _perturbed


@pytest.fixture(scope='session')
def two_soliton_spec():
    """The 2-soliton with poles at angles pi/3 and 2pi/3, centred at -3 and 3."""
    return SolitonSpec.from_thetas([np.pi / 3, 2 * np.pi / 3], centres=[-3., 3.])


@pytest.fixture(scope='function')
def generate_random_specs():
    """Return a function to generate reproducible random reflectionless specs."""

    def _generate_random_specs(num_specs=10, max_solitons=4, centre_range=5., seed=0):
        """Generate specs with 1 to ``max_solitons`` distinct poles on the upper circle.

        :param num_specs: the number of specs to generate
        :param max_solitons: the largest number of solitons
        :param centre_range: the isolated-soliton centres are drawn uniformly in [-centre_range, centre_range]
        :param seed: the seed of the random generator (for reproducible runs)
        :return: a list of :py:class:`~dark_soliton_lab.nsoliton.SolitonSpec`
        """
        generator = np.random.default_rng(seed)
        specs = []
        for _ in range(num_specs):
            size = int(generator.integers(1, max_solitons + 1))
            # Poles well separated and away from +-1
            thetas = np.sort(generator.choice(np.linspace(0.2, np.pi - 0.2, 24), size=size, replace=False))
            centres = generator.uniform(-centre_range, centre_range, size)
            specs.append(SolitonSpec.from_thetas(thetas, centres=centres))
        return specs

    yield _generate_random_specs
