"""Tests of the Jost solutions and of the scattering coefficients."""
import numpy as np
import pytest

from dark_soliton_lab.core import GridFunction, SpatialGrid, SpectralGrid
from dark_soliton_lab.exceptions import BoundaryConditionError, SingularParameterError
from dark_soliton_lab.forward_scattering import (
    JostIntegrator, ScatteringCoefficients, a_extend, jost_solve, scattering_coefficients, wronskian
)
from dark_soliton_lab.spectrum import mass


def black_soliton_a(z):
    """The exact transmission coefficient of tanh(x)."""
    return (z - 1j) / (z + 1j)


def test_black_soliton_coefficients(black_soliton):
    """For tanh(x), a(z) = (z - i) / (z + i) and b = 0 on the default spectral grid."""
    coefficients = scattering_coefficients(black_soliton, SpectralGrid())
    assert np.max(np.abs(coefficients.a_values - black_soliton_a(coefficients.z))) <= 1e-6
    assert np.max(np.abs(coefficients.b_values)) <= 1e-6
    assert coefficients.unitarity_defect() <= 1e-6
    assert coefficients.determinant_defect() <= 1e-6
    assert np.isclose(coefficients.q_minus, -1.)


def test_perturbed_unitarity_and_symmetry(default_grid, perturbed_black_soliton):
    """|a|^2 - |b|^2 = 1 and r(1/z) = conj(r(z)) on the nodes, for tanh(x) + 0.1 exp(-x^2)."""
    q = perturbed_black_soliton(default_grid, 0.1)
    coefficients = scattering_coefficients(q, SpectralGrid())
    assert coefficients.unitarity_defect() <= 1e-6
    assert coefficients.symmetry_defect() <= 1e-6
    assert coefficients.determinant_defect() <= 1e-6
    # The perturbation does reflect
    assert np.max(np.abs(coefficients.r_values)) > 1e-3
    assert np.all(np.abs(coefficients.r_values) < 1.)
    assert np.all(np.isfinite(coefficients.log_weight()))


def test_wronskian_zero(black_soliton):
    """The Wronskian of tanh(x) vanishes at z = i, and a_extend matches the closed form in C+."""
    integrator = JostIntegrator(black_soliton)
    assert abs(wronskian(None, 1j, integrator=integrator)) < 1e-8
    z = np.array([0.5 + 0.5j, -2. + 1j, 3j])
    assert np.allclose(a_extend(None, z, integrator=integrator), black_soliton_a(z), atol=1e-7)
    # Regular at z = +-1, where a has a removable singularity
    assert np.all(np.isfinite(wronskian(None, np.array([1., -1.]), integrator=integrator)))

    with pytest.raises(ValueError):
        a_extend(None, 1. - 1j, integrator=integrator)


def test_jost_solve(black_soliton):
    """Only the columns that are stable off the real axis are returned for complex z."""
    columns = jost_solve(black_soliton, 2.)
    assert columns.m2_minus is not None and columns.m1_plus is not None
    assert columns.m1_minus.shape == (2,)

    columns = jost_solve(black_soliton, np.array([0.5 + 0.5j, 2j]))
    assert columns.m2_minus is None and columns.m1_plus is None
    assert columns.m1_minus.shape == (2, 2)

    with pytest.raises(SingularParameterError):
        jost_solve(black_soliton, 0.01)
    with pytest.raises(ValueError):
        jost_solve(black_soliton, 2., side='left')


@pytest.mark.parametrize('x_match', [0., 1.5])
def test_black_soliton_jost_at_unit_points(black_soliton, x_match):
    """The Jost column m1^- of tanh(x) at z = -1 and z = 1 matches its closed form at the matching point."""
    # m1^-(-1; y) = (i + e^(-2y), -i + e^(-2y)) / (1 + e^(-2y))
    # m1^-(1; y) = (-i + e^(-2y), -i - e^(-2y)) / (1 + e^(-2y))
    decay = np.exp(-2. * x_match)
    columns = jost_solve(black_soliton, np.array([-1., 1.]), side='minus', x_match=x_match)
    expected = np.array([[1j + decay, -1j + decay], [-1j + decay, -1j - decay]]) / (1. + decay)
    assert np.max(np.abs(columns.m1_minus - expected)) < 1e-7
    if x_match == 0.:
        assert np.allclose(columns.m1_minus[0], [0.5 + 0.5j, 0.5 - 0.5j], atol=1e-8)


def test_large_z(default_grid, perturbed_black_soliton):
    """At the ends of the spectral grid, a(z) = 1 - i M / z + O(z^-2) with M = int (1 - |q|^2) dx."""
    q = perturbed_black_soliton(default_grid, 0.1)
    coefficients = scattering_coefficients(q, SpectralGrid(8))
    total_mass = mass(q)
    for index in (0, -1):
        z_end = coefficients.z[index]
        remainder = coefficients.a_values[index] - 1.
        assert abs(abs(remainder) - total_mass / abs(z_end)) < 1e-3
        assert abs((z_end * remainder).imag + total_mass) < 2e-2


def test_reflection_at_unit_points(small_grid):
    """For generic data r(z) tends to -1 as z -> 1 and to 1 as z -> -1."""
    q = GridFunction(small_grid, np.tanh(small_grid.x) + 0.3 * np.exp(-(small_grid.x + 2.)**2))
    coefficients = scattering_coefficients(q, SpectralGrid(delta1=0.005))
    z, r = coefficients.z, coefficients.r_values
    for unit in (1., -1.):
        for side in (-1., 1.):
            nodes = np.nonzero((np.sign(z - unit) == side) & (np.abs(z - unit) < 0.5))[0]
            order = nodes[np.argsort(np.abs(z[nodes] - unit))]
            nearest, farthest = np.abs(r[order[0]] + unit), np.abs(r[order[-1]] + unit)
            assert nearest < 0.2
            assert nearest < farthest


def test_matching_point_independence(default_grid, perturbed_black_soliton):
    """a(z) does not depend on the matching point."""
    q = perturbed_black_soliton(default_grid, 0.1)
    grid = SpectralGrid(8)
    first = scattering_coefficients(q, grid, x_match=0.)
    second = scattering_coefficients(q, grid, x_match=2.5)
    assert np.allclose(first.a_values, second.a_values, atol=1e-7)


def test_boundary_condition():
    """A potential that does not reach the background at the ends is rejected."""
    grid = SpatialGrid.symmetric(10., 256)
    with pytest.raises(BoundaryConditionError):
        JostIntegrator(GridFunction(grid, np.tanh(grid.x) + 0.5))


def test_coefficients_dict(small_grid, perturbed_black_soliton):
    """The coefficients survive a serialisation to dict."""
    q = perturbed_black_soliton(small_grid, 0.05)
    coefficients = scattering_coefficients(q, SpectralGrid(4))
    restored = ScatteringCoefficients.from_dict(coefficients.to_dict())
    assert restored.grid == coefficients.grid
    assert np.array_equal(restored.a_values, coefficients.a_values)
    assert np.array_equal(restored.r_values, coefficients.r_values)
    assert restored.q_minus == coefficients.q_minus
