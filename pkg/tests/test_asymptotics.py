"""Tests of the long-time asymptotic formulas."""
import numpy as np
import pytest

from dark_soliton_lab.asymptotics import (
    AsymptoticPredictor, T_eval, check_phase_regions, default_rho, leading_order, partition_and_phase,
    phase_aperture, sample_phase_regions, validate_rho
)
from dark_soliton_lab.core import SpectralGrid
from dark_soliton_lab.exceptions import ConfigurationError, PoleProximityError
from dark_soliton_lab.nsoliton import nsoliton_eval, soliton_centres
from dark_soliton_lab.spectrum import ScatteringData, compute_scattering_data


@pytest.fixture(scope='module')
def reflectionless_data(two_soliton_spec):
    """The scattering data of the 2-soliton (r = 0)."""
    return ScatteringData.reflectionless(two_soliton_spec.discrete, SpectralGrid(8))


@pytest.fixture(scope='module')
def radiating_data(small_grid, perturbed_black_soliton):
    """The scattering data of tanh(x) + 0.1 exp(-x^2), which has one soliton and radiation."""
    return compute_scattering_data(perturbed_black_soliton(small_grid, 0.1), grid=SpectralGrid(48))


def test_rho():
    """The default window half-width and its validation."""
    assert default_rho(np.array([1j])) == 0.1
    assert default_rho(np.exp(1j * np.array([np.pi / 3, 2 * np.pi / 3]))) == 0.1
    poles = np.exp(1j * np.array([1.5, 1.55]))
    assert np.isclose(default_rho(poles), (poles[0].real - poles[1].real) / 2.)

    validate_rho(0.1, np.array([1j]))
    for rho in (0., -1., None):
        with pytest.raises(ConfigurationError):
            validate_rho(rho, np.array([1j]))
    with pytest.raises(ConfigurationError):
        validate_rho(0.2, poles)


def test_partition(reflectionless_data):
    """Delta, Nabla, the critical index and the phase at a few values of xi."""
    data = partition_and_phase(reflectionless_data, 0.)
    assert data.delta == (0,)
    assert data.nabla == (1,)
    assert data.j0 == -1
    assert np.isclose(data.alpha_xi, 2. * np.pi / 3)
    assert np.isclose(data.t_inf, np.exp(-1j * np.pi / 3))

    assert partition_and_phase(reflectionless_data, 0.45).j0 == 0
    assert partition_and_phase(reflectionless_data, -0.55).j0 == 1
    assert partition_and_phase(reflectionless_data, -0.9).delta == (0, 1)
    assert partition_and_phase(reflectionless_data, 0.9).delta == ()

    serialised = data.to_dict()
    assert serialised['schema_version'] == 1
    assert serialised['delta'] == [0]
    assert len(serialised['x_shifts']) == 2

    with pytest.raises(ConfigurationError):
        partition_and_phase(reflectionless_data, 0., rho=0.6)


def test_reflectionless_predictor(reflectionless_data, two_soliton_spec):
    """Without radiation the couplings are unchanged and the predictor is the exact N-soliton."""
    predictor = AsymptoticPredictor(reflectionless_data)
    assert predictor.log_moment == 0
    assert np.allclose(predictor.c_tilde(), two_soliton_spec.couplings)
    assert np.allclose(predictor.x_shifts(), soliton_centres(two_soliton_spec, 1))
    x = np.linspace(-30., 30., 61)
    assert np.allclose(predictor.predictor(x, 10.), nsoliton_eval(two_soliton_spec, x, 10.))


def test_t_function_reflectionless(reflectionless_data):
    """For r = 0, T is the Blaschke product over Delta and tends to prod conj(z_k)."""
    predictor = AsymptoticPredictor(reflectionless_data)
    poles = reflectionless_data.discrete.poles
    z = 0.3 + 2.1j
    expected = (z - poles[0]) / (z * poles[0] - 1.)
    assert np.isclose(T_eval(reflectionless_data, 0., z), expected)
    assert np.isclose(predictor.t_function(1e6j, xi=0.), predictor.t_inf(0.), atol=1e-5)
    assert np.isclose(predictor.t_function(z, xi=0.9), 1.)

    with pytest.raises(PoleProximityError):
        predictor.t_function(np.conj(poles[0]), xi=0.)
    with pytest.raises(ValueError):
        predictor.t_function(0.5, xi=0.)


def test_regional_form(reflectionless_data, two_soliton_spec):
    """The regional leading order matches the 2-soliton at large time, plateaus included."""
    predictor = AsymptoticPredictor(reflectionless_data)
    t = 40.
    x = np.linspace(-1.6 * t, 1.6 * t, 321)
    soliton_form, regional_form = predictor.predict_field(x, t)
    exact = nsoliton_eval(two_soliton_spec, x, t)
    assert np.max(np.abs(soliton_form - exact)) < 1e-10
    assert np.max(np.abs(regional_form - exact)) < 1e-4

    # Between the solitons, the plateau is exp(i alpha(xi))
    asymptotic_data = partition_and_phase(reflectionless_data, 0.)
    plateau = leading_order(asymptotic_data, reflectionless_data, 0., t)
    assert np.isclose(plateau, np.exp(1j * asymptotic_data.alpha_xi))


def test_seam_gap(reflectionless_data):
    """At |xi - Re z_j0| = rho the regional form jumps by ~exp(-2 Im z_j0 (2 rho t - |x_j0|)), decaying in t."""
    predictor = AsymptoticPredictor(reflectionless_data)
    rho = predictor.rho
    poles = reflectionless_data.discrete.poles

    def seam_gap(t):
        """Return the largest jump of the regional form across the window edges at time t."""
        gaps = []
        for pole in poles:
            for seam in (pole.real - rho, pole.real + rho):
                inner = seam + np.sign(pole.real - seam) * 1e-9
                outer = seam - np.sign(pole.real - seam) * 1e-9
                inside = predictor.leading_order(2. * inner * t, t)
                gaps.append(abs(inside - predictor.leading_order(2. * outer * t, t)))
        return max(gaps)

    early, late = seam_gap(20.), seam_gap(40.)
    assert early > 1e-2
    assert late < 1e-3
    decay = 2. * np.max(poles.imag) * 2. * rho * 20.
    assert abs(np.log(late / early) + decay) < 0.5


def test_t_jump(radiating_data):
    """Across (0, inf), T_+ / T_- = 1 / (1 - |r|^2)."""
    predictor = AsymptoticPredictor(radiating_data)
    z = radiating_data.grid.z
    log_weight = radiating_data.coefficients.log_weight()
    for s_value in (0.3, 0.6, 2.5):
        ratio = predictor.t_function(s_value + 1e-4j, xi=-0.5) / predictor.t_function(s_value - 1e-4j, xi=-0.5)
        assert abs(ratio - np.exp(-np.interp(s_value, z, log_weight))) < 1e-3


@pytest.mark.parametrize('xi', [-0.5, 0.5])
def test_t_symmetries(radiating_data, xi):
    """conj(T(conj z)) = 1 / T(z) = T(1 / z) off the real axis, and |T| = 1 on the negative real axis."""
    predictor = AsymptoticPredictor(radiating_data)
    for z in (0.5 + 0.7j, -1.3 + 0.4j, 2j):
        value = predictor.t_function(z, xi=xi)
        assert abs(np.conj(predictor.t_function(np.conj(z), xi=xi)) - 1. / value) < 1e-12
        assert abs(predictor.t_function(1. / z, xi=xi) - 1. / value) < 1e-12
    for s_value in (-0.3, -1.7, -5.):
        assert abs(abs(predictor.t_function(s_value, xi=xi)) - 1.) < 1e-12


def test_t_large_z(radiating_data):
    """z (T(z) / T(inf) - 1) tends to -(sum_Delta 2 i Im z_k - (1 / 2 pi i) int_0^inf L ds)."""
    predictor = AsymptoticPredictor(radiating_data)
    xi = -0.5
    poles = radiating_data.discrete.poles[list(predictor.delta_set(xi))]
    integral = radiating_data.quadrature.integrate(lambda s: np.ones_like(s)).real
    expected = -(np.sum(2j * poles.imag) - integral / (2j * np.pi))

    values = {}
    for modulus in (50., 100.):
        z = 1j * modulus
        values[modulus] = z * (predictor.t_function(z, xi=xi) / predictor.t_inf(xi) - 1.)
        assert abs(values[modulus] - expected) < 0.1
    # The remainder is O(1/z): remove it by Richardson extrapolation
    assert abs(2. * values[100.] - values[50.] - expected) < 1e-3


def test_radiating_couplings(radiating_data):
    """With radiation the modified couplings keep the admissible phase c = i z |c|."""
    predictor = AsymptoticPredictor(radiating_data)
    assert predictor.log_moment < 0
    pole = radiating_data.discrete.poles[0]
    ratio = predictor.c_tilde()[0] / (1j * pole)
    assert ratio.real > 0
    assert abs(ratio.imag) < 1e-8 * abs(ratio)
    spec = predictor.modified_spec()
    assert spec.size == 1
    assert np.allclose(spec.poles, radiating_data.discrete.poles)


@pytest.mark.parametrize('xi', [0., 0.25, 0.5, 0.75, -0.6])
def test_phase_regions(xi):
    """Re Phi satisfies the sector sign bounds at random points of the four sectors."""
    samples = sample_phase_regions(xi, 1000, seed=0)
    assert len(samples) == 1000
    assert np.allclose(samples, sample_phase_regions(xi, 1000, seed=0))
    report = check_phase_regions(xi, samples, t=1.)
    assert report.checked == 1000
    assert report.outside == 0
    assert report.violations == 0
    assert report.worst_margin >= 0 or np.isclose(report.worst_margin, 0., atol=1e-10)


def test_phase_aperture():
    """The aperture shrinks when |xi| grows, and the bound is only available for |xi| < 1."""
    assert phase_aperture(0.) == np.pi / 4
    assert phase_aperture(0.75) < phase_aperture(0.5) <= np.pi / 4
    assert np.isclose(phase_aperture(0.75), np.arccos(1.5 / 1.75))
    with pytest.raises(ValueError):
        check_phase_regions(1., np.array([1. + 1j]))
    # A point on the positive imaginary axis is outside all sectors
    assert check_phase_regions(0., np.array([2j])).outside == 1
