"""Closed-form long-time asymptotics: the T-function, the partition of the poles, the acquired phase alpha(xi),
the modified couplings, the phase shifts, the regional leading-order solution and the full predictor.

Conventions: Delta(xi) = {j : Re z_j > xi} and Nabla(xi) its complement; L(s) = log(1 - |r(s)|^2).

    T(z) = prod_{k in Delta} (z - z_k) / (z z_k - 1) exp(-(1 / 2 pi i) int_0^inf L(s) (1 / (s - z) - 1 / (2 s)) ds)

so that T(inf)^-2 = exp(i alpha(xi)) with alpha(xi) = (1 / 2 pi) int_0^inf L(s) / s ds + 2 sum_{k in Delta} arg z_k.
"""
from collections import namedtuple
import logging

import numpy as np

from .core import phase_phi
from .exceptions import ConfigurationError, PoleProximityError
from .nsoliton import SolitonSpec, nsoliton_eval, one_soliton, pair_factor
from .spectrum import DiscreteSpectrum, circle_derivative

LOGGER = logging.getLogger(__name__)

SCHEMA_VERSION = 1
POLE_PROXIMITY = 1e-8
# Tolerated imaginary part of the (real) exponent of the modified couplings
PHASE_NOISE_WARNING = 1e-4
DEFAULT_RHO_CAP = 0.1

PhaseRegionReport = namedtuple('PhaseRegionReport', ['checked', 'violations', 'outside', 'worst_margin'])


def default_rho(poles):
    """Return half the minimal gap between the Re z_k, capped at 0.1 (0.1 for fewer than two poles)."""
    real_parts = np.sort(np.real(poles))
    if len(real_parts) < 2:
        return DEFAULT_RHO_CAP
    return float(min(DEFAULT_RHO_CAP, np.min(np.diff(real_parts)) / 2.))


def validate_rho(rho, poles):
    """Raise ConfigurationError unless the windows |Re z - Re z_k| < rho are pairwise disjoint and rho > 0."""
    if rho is None or not rho > 0:
        raise ConfigurationError('rho must be positive, got {}'.format(rho))
    real_parts = np.sort(np.real(poles))
    if len(real_parts) > 1 and rho > np.min(np.diff(real_parts)) / 2.:
        raise ConfigurationError(
            'rho={} is too large: the windows around Re z_k must be disjoint (max {})'.format(
                rho,
                np.min(np.diff(real_parts)) / 2.
            )
        )


class AsymptoticData:
    """The xi-dependent quantities entering the asymptotic formulas."""

    def __init__(self, xi, nabla, delta, j0, rho, alpha_xi, c_tilde, x_shifts, t_inf):  # pylint: disable=too-many-arguments
        self.xi = float(xi)
        self.nabla = tuple(int(index) for index in nabla)
        self.delta = tuple(int(index) for index in delta)
        self.j0 = int(j0)
        self.rho = float(rho)
        self.alpha_xi = float(alpha_xi)
        self.c_tilde = np.asarray(c_tilde, dtype=complex)
        self.x_shifts = np.asarray(x_shifts, dtype=float)
        self.t_inf = complex(t_inf)

    def to_dict(self):
        """Return the JSON interchange representation."""
        return {
            'schema_version': SCHEMA_VERSION,
            'xi': self.xi,
            'nabla': list(self.nabla),
            'delta': list(self.delta),
            'j0': self.j0,
            'rho': self.rho,
            'alpha': self.alpha_xi,
            'c_tilde_re': self.c_tilde.real.tolist(),
            'c_tilde_im': self.c_tilde.imag.tolist(),
            'x_shifts': self.x_shifts.tolist(),
            'T_inf': [self.t_inf.real, self.t_inf.imag],
        }

    def __repr__(self):
        return 'AsymptoticData(xi={}, delta={}, j0={}, alpha={:.6g})'.format(
            self.xi, self.delta, self.j0, self.alpha_xi
        )


class AsymptoticPredictor:
    """Asymptotic formulas for given scattering data.

    The quantities that do not depend on xi (the moment of L, the modified couplings) are computed once.
    """

    def __init__(self, data, rho=None):
        """Prepare the predictor.

        :param data: a :py:class:`~dark_soliton_lab.spectrum.ScatteringData`
        :param rho: half-width of the windows around the critical lines; default from :py:func:`default_rho`
        """
        self._data = data
        self._poles = data.discrete.poles
        self._rho = default_rho(self._poles) if rho is None else rho
        validate_rho(self._rho, self._poles)
        self._moment = data.quadrature.log_moment()
        self._c_tilde = None
        self._cache = {}

    @property
    def data(self):
        """The scattering data."""
        return self._data

    @property
    def rho(self):
        """The window half-width."""
        return self._rho

    @property
    def log_moment(self):
        """int_0^inf L(s) / s ds."""
        return self._moment

    def delta_set(self, xi):
        """Return the indices j with Re z_j > xi."""
        return tuple(int(j) for j in np.nonzero(self._poles.real > xi)[0])

    def critical_index(self, xi):
        """Return j0 with |Re z_j0 - xi| < rho, or -1."""
        close = np.nonzero(np.abs(self._poles.real - xi) < self._rho)[0]
        return int(close[0]) if len(close) else -1

    def alpha(self, xi):
        """Return the acquired phase alpha(xi)."""
        delta = self.delta_set(xi)
        return self._moment / (2. * np.pi) + 2. * float(np.sum(self._data.discrete.thetas[list(delta)]))

    def t_inf(self, xi):
        """Return T(inf) = prod_{Delta} conj(z_k) exp((1 / 4 pi i) int_0^inf L / s ds)."""
        delta = list(self.delta_set(xi))
        return complex(np.prod(np.conj(self._poles[delta])) * np.exp(self._moment / (4j * np.pi)))

    def t_function(self, z, xi=None, delta=None):
        """Return T(z) for the partition at xi (or for an explicit Delta set).

        :raise PoleProximityError: if z is within 1e-8 of a pole conj(z_k), k in Delta
        :raise ValueError: if z lies on the positive real axis
        """
        z = complex(z)
        if z.imag == 0 and z.real >= 0:
            raise ValueError('T is not defined on [0, inf): got z={}'.format(z))
        delta = self.delta_set(xi) if delta is None else delta
        product = 1. + 0j
        for k in delta:
            pole = self._poles[k]
            if abs(z - np.conj(pole)) < POLE_PROXIMITY:
                raise PoleProximityError('z={} is too close to the pole {} of T'.format(z, np.conj(pole)))
            product *= (z - pole) / (z * pole - 1.)
        integral = self._data.quadrature.cauchy(z, 'positive') - self._moment / 2.
        return product * np.exp(-integral / (2j * np.pi))

    def t_derivative(self, z, delta, step=1e-3):
        """Return T'(z) at a point of the unit circle, by the 4th-order stencil along the circle."""
        theta = float(np.angle(z))
        return complex(
            circle_derivative(lambda values: np.array([self.t_function(v, delta=delta) for v in values]), theta, step)
        )

    def c_tilde(self):
        """Return the modified couplings c_j exp(-(1 / i pi) int_0^inf L (1 / (s - z_j) - 1 / (2 s)) ds).

        The exponent is real; the quadrature phase noise is projected out, so that c~_j = i z_j |c~_j|.
        """
        if self._c_tilde is None:
            couplings = self._data.discrete.couplings
            values = np.empty(len(couplings), dtype=complex)
            for index, (pole, coupling) in enumerate(zip(self._poles, couplings)):
                integral = self._data.quadrature.cauchy(pole, 'positive') - self._moment / 2.
                exponent = -integral / (1j * np.pi)
                if abs(exponent.imag) > PHASE_NOISE_WARNING:
                    LOGGER.warning('Modified coupling %d: exponent has imaginary part %.2e', index, exponent.imag)
                values[index] = coupling * np.exp(exponent.real)
            self._c_tilde = values
        return self._c_tilde

    def x_shifts(self):
        """Return the phase shifts x_k of the solitons as t -> +inf.

        x_k = (1 / 2 Im z_k) [log(|c_k| / (2 Im z_k) prod_{l < k} |(z_k - z_l) / (z_k z_l - 1)|^2)
        - (Im z_k / pi) int_0^inf L(s) / |s - z_k|^2 ds]
        """
        abs_couplings = self._data.discrete.abs_couplings
        shifts = np.empty(len(self._poles))
        for k, pole in enumerate(self._poles):
            product = np.prod([pair_factor(pole, self._poles[l]) for l in range(k)])
            radiation = self._data.quadrature.poisson(pole) / np.pi
            shifts[k] = (np.log(abs_couplings[k] / (2. * pole.imag) * product) - radiation) / (2. * pole.imag)
        return shifts

    def modified_spec(self):
        """Return the :py:class:`~dark_soliton_lab.nsoliton.SolitonSpec` with poles z_j and couplings c~_j."""
        if not len(self._poles):
            return SolitonSpec(DiscreteSpectrum.empty())
        return SolitonSpec(DiscreteSpectrum(self._data.discrete.thetas, self.c_tilde()))

    def partition_and_phase(self, xi):
        """Return the :py:class:`AsymptoticData` at xi."""
        delta = self.delta_set(xi)
        nabla = tuple(j for j in range(len(self._poles)) if j not in delta)
        return AsymptoticData(
            xi=xi,
            nabla=nabla,
            delta=delta,
            j0=self.critical_index(xi),
            rho=self._rho,
            alpha_xi=self.alpha(xi),
            c_tilde=self.c_tilde(),
            x_shifts=self.x_shifts(),
            t_inf=self.t_inf(xi)
        )

    def _regional_parameters(self, delta, j0):
        """Return (T(inf)^-2, x_j0, carrier) for a region, cached by (Delta, j0)."""
        key = (delta, j0)
        if key not in self._cache:
            t_inf = complex(np.prod(np.conj(self._poles[list(delta)])) * np.exp(self._moment / (4j * np.pi)))
            prefactor = t_inf**-2
            if j0 < 0:
                self._cache[key] = (prefactor, None, None)
            else:
                pole = self._poles[j0]
                coupling = abs(self._data.discrete.couplings[j0])
                if j0 in delta:
                    derivative = self.t_derivative(pole, delta)
                    shift = np.log(2. * pole.imag * coupling * abs(derivative)**2) / (2. * pole.imag)
                    carrier = np.conj(pole)
                else:
                    value = self.t_function(pole, delta=delta)
                    shift = np.log(coupling * abs(value)**2 / (2. * pole.imag)) / (2. * pole.imag)
                    carrier = pole
                self._cache[key] = (prefactor, shift, carrier)
        return self._cache[key]

    def leading_order(self, x, t):
        """Return the regional leading-order value of q at (x, t), t > 0.

        Away from all the critical lines this is the plateau exp(i alpha(xi)); within rho of Re z_j0 it is the
        phase-rotated dark soliton -T(inf)^-2 i w (i Re z_j0 + Im z_j0 tanh(Im z_j0 (x - 2 Re z_j0 t - x_j0))),
        with w = z_j0 if j0 is in Nabla and w = conj(z_j0) if j0 is in Delta.
        """
        xi = x / (2. * t)
        delta, j0 = self.delta_set(xi), self.critical_index(xi)
        prefactor, shift, carrier = self._regional_parameters(delta, j0)
        if j0 < 0:
            return prefactor
        pole = self._poles[j0]
        phase = pole.imag * (x - 2. * pole.real * t - shift)
        return -prefactor * 1j * carrier * (1j * pole.real + pole.imag * np.tanh(phase))

    def predictor(self, x, t):
        """Return exp(i alpha(xi)) prod_{Delta(xi)} conj(z_k)^2 q^(sol),N(x, t; {z_j, c~_j}) (vectorised over x).

        The product normalises the N-soliton to the background at xi; the result equals
        exp(i alpha(1)) q^(sol),N(x, t; {z_j, c~_j}).
        """
        x = np.asarray(x, dtype=float)
        solitons = nsoliton_eval(self.modified_spec(), x, t)
        return np.exp(1j * self._moment / (2. * np.pi)) * solitons

    def predict_field(self, x, t):
        """Return both predictor forms on an array of positions: (N-soliton form, regional form)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        regional = np.array([self.leading_order(x_value, t) for x_value in x], dtype=complex)
        return self.predictor(x, t), regional


def T_eval(data, xi, z, rho=None):  # pylint: disable=invalid-name
    """Return T(z) for the scattering data and the partition at xi (see :py:meth:`AsymptoticPredictor.t_function`)."""
    return AsymptoticPredictor(data, rho=rho).t_function(z, xi=xi)


def partition_and_phase(data, xi, rho=None):
    """Return the :py:class:`AsymptoticData` of the scattering data at xi.

    :raise ConfigurationError: if rho does not keep the windows around the Re z_k disjoint
    """
    return AsymptoticPredictor(data, rho=rho).partition_and_phase(xi)


def leading_order(asymptotic_data, data, x, t):
    """Return the regional leading-order value at (x, t), for the rho used to build ``asymptotic_data``."""
    return AsymptoticPredictor(data, rho=asymptotic_data.rho).leading_order(x, t)


def phase_aperture(xi, theta0=np.pi / 4):
    """Return the aperture phi(xi) = min(theta0, arccos(2 |xi| / (1 + |xi|))) of the sectors Omega_1..4."""
    return min(theta0, float(np.arccos(2. * abs(xi) / (1. + abs(xi)))))


def sample_phase_regions(xi, count, seed=0, theta0=np.pi / 4, radius_range=(0.1, 10.)):
    """Draw ``count`` reproducible random points in the four sectors Omega_1..4 at xi."""
    generator = np.random.default_rng(seed)
    aperture = phase_aperture(xi, theta0)
    radius = np.exp(generator.uniform(np.log(radius_range[0]), np.log(radius_range[1]), count))
    angle = generator.uniform(0., aperture, count)
    sector = generator.integers(0, 4, count)
    # Omega_1: (0, phi), Omega_2: (pi - phi, pi), Omega_3: (-pi, -pi + phi), Omega_4: (-phi, 0)
    angle = np.choose(sector, [angle, np.pi - angle, -np.pi + angle, -angle])
    return radius * np.exp(1j * angle)


def check_phase_regions(xi, samples, t=1., theta0=np.pi / 4):
    """Check the sign bound of Re Phi(z; 2 xi t, t) on the sectors Omega_1..4.

    Re Phi >= (t / 4)(1 - |xi|) F(|z|)^2 |sin 2 theta| on Omega_1 and Omega_3, Re Phi <= -(same) on Omega_2 and
    Omega_4, with F(s) = s + 1/s. Points outside the four sectors are counted in ``outside`` and not checked.

    :return: a :py:class:`PhaseRegionReport`
    """
    if not abs(xi) < 1:
        raise ValueError('The phase bound requires |xi| < 1, got {}'.format(xi))
    samples = np.atleast_1d(np.asarray(samples, dtype=complex))
    aperture = phase_aperture(xi, theta0)
    angle = np.angle(samples)
    modulus = np.abs(samples)
    real_phase = phase_phi(samples, 2. * xi * t, t).real
    bound = t / 4. * (1. - abs(xi)) * (modulus + 1. / modulus)**2 * np.abs(np.sin(2. * angle))
    tolerance = 1e-12 * (1. + np.abs(real_phase))

    upper = ((angle >= 0) & (angle < aperture)) | (angle <= -np.pi + aperture)
    lower = ((angle > np.pi - aperture)) | ((angle < 0) & (angle > -aperture))
    margin = np.full(len(samples), np.inf)
    margin[upper] = real_phase[upper] - bound[upper]
    margin[lower] = -bound[lower] - real_phase[lower]
    checked = upper | lower
    violations = int(np.sum(margin[checked] < -tolerance[checked]))
    return PhaseRegionReport(
        checked=int(np.sum(checked)),
        violations=violations,
        outside=int(len(samples) - np.sum(checked)),
        worst_margin=float(np.min(margin[checked])) if np.any(checked) else float('nan')
    )
