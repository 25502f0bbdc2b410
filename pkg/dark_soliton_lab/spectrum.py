"""Discrete spectrum on the unit circle, norming constants, trace formula and theta-condition checks."""
from collections import namedtuple
import logging

import numpy as np
from scipy import integrate, optimize

from .core import SpectralGrid
from .exceptions import InconsistentNormingConstant, InvalidSolitonSpec, ZeroNotFound
from .forward_scattering import JostIntegrator, ScatteringCoefficients, scattering_coefficients, wronskian
from .quadrature import SpectralQuadrature

LOGGER = logging.getLogger(__name__)

SCHEMA_VERSION = 1

CircleZeros = namedtuple('CircleZeros', ['thetas', 'residuals', 'boundary_suspect'])
NormingConstant = namedtuple(
    'NormingConstant', ['c', 'c_connection', 'c_integral', 'gamma', 'a_prime', 'relative_gap', 'sign_condition']
)

# Agreement between the two norming-constant formulas
NORMING_WARNING_GAP = 1e-4
NORMING_ERROR_GAP = 5e-3
# Relative tolerance on the reality condition c = i z |c|
ADMISSIBILITY_TOLERANCE = 1e-6


def circle_derivative(function, theta, step=1e-3):
    """Return d f / d z at z = exp(i theta) for f analytic near the circle, via a 4th-order stencil in theta.

    :param function: vectorised callable of complex z
    """
    offsets = np.array([-2., -1., 1., 2.]) * step
    values = function(np.exp(1j * (theta + offsets)))
    d_theta = (values[0] - 8. * values[1] + 8. * values[2] - values[3]) / (12. * step)
    return d_theta / (1j * np.exp(1j * theta))


class DiscreteSpectrum:
    """Poles z_k = exp(i theta_k) on the upper unit circle with couplings c_k = i z_k |c_k|.

    The poles are ordered by decreasing real part (i.e. increasing theta).
    """

    def __init__(self, thetas, couplings):
        """Validate and store the data.

        :param thetas: angles in (0, pi), pairwise distinct
        :param couplings: the complex couplings, each satisfying c = i z |c|
        :raise InvalidSolitonSpec: if the data are not admissible
        """
        thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
        couplings = np.atleast_1d(np.asarray(couplings, dtype=complex))
        if thetas.shape != couplings.shape or thetas.ndim != 1:
            raise InvalidSolitonSpec('Expected as many couplings as poles, got {} and {}'.format(
                thetas.shape, couplings.shape))
        if np.any(thetas <= 0) or np.any(thetas >= np.pi):
            raise InvalidSolitonSpec('Pole angles must lie in (0, pi), got {}'.format(thetas.tolist()))
        order = np.argsort(thetas)
        thetas, couplings = thetas[order], couplings[order]
        if np.any(np.diff(thetas) <= 1e-12):
            raise InvalidSolitonSpec('Poles must be pairwise distinct, got {}'.format(thetas.tolist()))
        poles = np.exp(1j * thetas)
        ratio = couplings / (1j * poles)
        if np.any(ratio.real <= 0) or np.any(np.abs(ratio.imag) > ADMISSIBILITY_TOLERANCE * np.abs(ratio)):
            raise InvalidSolitonSpec(
                'Couplings must satisfy c = i z |c| (admissibility), got c/(i z) = {}'.format(ratio.tolist())
            )
        self._thetas = thetas
        self._couplings = couplings
        for array in (self._thetas, self._couplings):
            array.setflags(write=False)

    @classmethod
    def from_abs_couplings(cls, thetas, abs_couplings):
        """Build the spectrum from the angles and the moduli |c_k| (the phases follow from admissibility)."""
        thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
        return cls(thetas, 1j * np.exp(1j * thetas) * np.atleast_1d(np.asarray(abs_couplings, dtype=float)))

    @classmethod
    def from_centres(cls, thetas, centres=None):
        """Build the spectrum whose isolated solitons would be centred at ``centres`` at t = 0.

        |c_k| = 2 Im z_k exp(2 Im z_k x_k), so that a single soliton is centred at x_k.
        """
        thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
        centres = np.zeros_like(thetas) if centres is None else np.atleast_1d(np.asarray(centres, dtype=float))
        imag = np.sin(thetas)
        return cls.from_abs_couplings(thetas, 2. * imag * np.exp(2. * imag * centres))

    @classmethod
    def empty(cls):
        """Return the empty spectrum."""
        return cls(np.zeros(0), np.zeros(0))

    @property
    def thetas(self):
        """The pole angles, increasing."""
        return self._thetas

    @property
    def poles(self):
        """The poles z_k = exp(i theta_k)."""
        return np.exp(1j * self._thetas)

    @property
    def couplings(self):
        """The couplings c_k."""
        return self._couplings

    @property
    def abs_couplings(self):
        """The moduli |c_k|."""
        return np.abs(self._couplings)

    @property
    def size(self):
        """The number of poles N."""
        return len(self._thetas)

    @property
    def pole_product(self):
        """The product of z_k^2, i.e. a(0) for reflectionless data."""
        return complex(np.prod(self.poles**2))

    def to_dict(self):
        """Return a JSON-serialisable representation."""
        return {
            'thetas': self._thetas.tolist(),
            'c_re': self._couplings.real.tolist(),
            'c_im': self._couplings.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        """Inverse of :py:meth:`to_dict`."""
        return cls(data['thetas'], np.array(data['c_re']) + 1j * np.array(data['c_im']))

    def __len__(self):
        return self.size

    def __repr__(self):
        return 'DiscreteSpectrum(thetas={}, |c|={})'.format(self._thetas.tolist(), self.abs_couplings.tolist())


class ScatteringData:
    """Reflection coefficient samples plus the discrete spectrum."""

    def __init__(self, coefficients, discrete, boundary_suspect=()):
        self._coefficients = coefficients
        self._discrete = discrete
        self._boundary_suspect = tuple(boundary_suspect)
        self._quadrature = None

    @classmethod
    def reflectionless(cls, discrete, grid=None):
        """Return the scattering data of the pure N-soliton with the given discrete spectrum."""
        grid = SpectralGrid() if grid is None else grid
        z = grid.z.astype(complex)
        a_values = np.ones_like(z)
        for pole in discrete.poles:
            a_values *= (z - pole) / (z - np.conj(pole))
        coefficients = ScatteringCoefficients.reflectionless(grid, a_values, q_minus=discrete.pole_product)
        return cls(coefficients, discrete)

    @property
    def coefficients(self):
        """The :py:class:`~dark_soliton_lab.forward_scattering.ScatteringCoefficients`."""
        return self._coefficients

    @property
    def discrete(self):
        """The :py:class:`DiscreteSpectrum`."""
        return self._discrete

    @property
    def grid(self):
        """The spectral grid."""
        return self._coefficients.grid

    @property
    def q_minus(self):
        """The left background value."""
        return self._coefficients.q_minus

    @property
    def boundary_suspect(self):
        """Angles of zero candidates adjacent to the excluded windows around +-1."""
        return self._boundary_suspect

    @property
    def quadrature(self):
        """The (cached) :py:class:`~dark_soliton_lab.quadrature.SpectralQuadrature` of log(1 - |r|^2)."""
        if self._quadrature is None:
            self._quadrature = SpectralQuadrature(self.grid, self._coefficients.log_weight())
        return self._quadrature

    def to_dict(self):
        """Return the JSON interchange representation."""
        coefficients = self._coefficients
        data = {
            'schema_version': SCHEMA_VERSION,
            'grid': self.grid.to_dict(),
            'z': self.grid.z.tolist(),
            'r_re': coefficients.r_values.real.tolist(),
            'r_im': coefficients.r_values.imag.tolist(),
            'a_re': coefficients.a_values.real.tolist(),
            'a_im': coefficients.a_values.imag.tolist(),
            'q_minus': [self.q_minus.real, self.q_minus.imag],
            'boundary_suspect': list(self._boundary_suspect),
        }
        data.update(self._discrete.to_dict())
        return data

    @classmethod
    def from_dict(cls, data):
        """Inverse of :py:meth:`to_dict`."""
        if data.get('schema_version') != SCHEMA_VERSION:
            raise ValueError('Unsupported scattering data schema version: {}'.format(data.get('schema_version')))
        grid = SpectralGrid.from_dict(data['grid'])
        a_values = np.array(data['a_re']) + 1j * np.array(data['a_im'])
        r_values = np.array(data['r_re']) + 1j * np.array(data['r_im'])
        coefficients = ScatteringCoefficients(grid, a_values, r_values * a_values, q_minus=complex(*data['q_minus']))
        return cls(coefficients, DiscreteSpectrum.from_dict(data), data.get('boundary_suspect', ()))


def _rotated_wronskian(integrator, theta):
    """Return the real function of theta whose sign changes are the zeros of a on the circle.

    On the circle a(z) is q_minus^(1/2) times a real function, and a(z) 2 sin(theta) = W(z) exp(i theta) / i.
    """
    theta = np.asarray(theta, dtype=float)
    rotation = np.exp(-0.5j * np.angle(integrator.q_minus))
    z = np.exp(1j * theta)
    values = wronskian(None, z, integrator=integrator) * z / 1j * rotation
    return values.real


def find_circle_zeros(q, n_scan=256, edge=0.02, integrator=None, xtol=1e-13):
    """Return all the zeros of a(z) on the upper unit circle, as angles in (0, pi).

    The circle is scanned on ``n_scan`` uniform angles in [edge, pi - edge]; sign changes of the rotated
    Wronskian bracket the zeros, which are then refined by the secant method (with a bracketing fallback).

    :param q: the potential (a GridFunction)
    :param n_scan: number of scan points, at least 64
    :param edge: half-width in angle of the excluded neighbourhoods of z = 1 and z = -1
    :return: a :py:class:`CircleZeros` namedtuple; zeros found in the first or last scan interval are also listed
        in ``boundary_suspect``
    """
    if n_scan < 64:
        raise ValueError('At least 64 scan points are required, got {}'.format(n_scan))
    if integrator is None:
        integrator = JostIntegrator(q)
    scan = np.linspace(edge, np.pi - edge, n_scan)
    values = _rotated_wronskian(integrator, scan)

    def target(theta):
        return float(_rotated_wronskian(integrator, np.array([theta]))[0])

    brackets = np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]
    LOGGER.debug('Circle scan with %d points: %d sign changes', n_scan, len(brackets))

    thetas, suspect = [], []
    for index in brackets:
        lower, upper = scan[index], scan[index + 1]
        root = None
        try:
            result = optimize.root_scalar(target, method='secant', x0=lower, x1=upper, xtol=xtol, maxiter=50)
            if result.converged and lower <= result.root <= upper:
                root = result.root
        except (ArithmeticError, ValueError):
            root = None
        if root is None:
            try:
                root = optimize.brentq(target, lower, upper, xtol=xtol)
            except (RuntimeError, ValueError) as exception:
                raise ZeroNotFound('Refinement failed in [{}, {}]: {}'.format(lower, upper, exception))
        thetas.append(root)
        if index in (0, n_scan - 2):
            suspect.append(root)
            LOGGER.warning('Zero at theta=%.6g is adjacent to an excluded window around z=+-1', root)

    thetas = np.array(thetas)
    residuals = np.array([]) if not len(thetas) else np.abs(
        wronskian(None, np.exp(1j * thetas), integrator=integrator) / (1. - np.exp(-2j * thetas))
    )
    LOGGER.info('Found %d zero(s) of a on the unit circle', len(thetas))
    return CircleZeros(thetas=thetas, residuals=residuals, boundary_suspect=tuple(suspect))


def norming_constant(q, theta, integrator=None, derivative_step=1e-3):
    """Return the norming constant c_k at the zero z_k = exp(i theta), computed in two independent ways.

    The connection coefficient gamma (psi_1^- = gamma psi_2^+) divided by a'(z_k), and the closed form
    2 i z_k / int |psi_2^+(z_k; x)|^2 dx. The returned ``c`` is the closed form projected on the ray i z_k R_+.

    :raise InconsistentNormingConstant: if the two values differ by more than 5e-3 (relative), or if the closed
        form violates the reality condition
    """
    if integrator is None:
        integrator = JostIntegrator(q)
    grid = integrator.potential.grid
    z = np.exp(1j * theta)
    sin_theta = np.sin(theta)

    _, left_paths = integrator.integrate(z, 'minus', which=('m1',), record=True)
    _, right_paths = integrator.integrate(z, 'plus', which=('m2',), record=True)
    m_left = left_paths['m1'][:, 0, :]
    m_right = right_paths['m2'][:, 0, :]
    x_match = integrator.x_match
    x_left = x_match - grid.h * np.arange(len(m_left))[::-1]
    x_right = x_match + grid.h * np.arange(len(m_right))

    # psi_1^- = m_1 exp(-i zeta x), psi_2^+ = m_2 exp(i zeta x), with zeta = i sin(theta) on the circle
    psi_left = m_left * np.exp(sin_theta * x_left)[:, None]
    psi_right = m_right * np.exp(-sin_theta * x_right)[:, None]

    gamma = np.vdot(psi_right[0], psi_left[-1]) / np.vdot(psi_right[0], psi_right[0])
    norm_right = integrate.simpson(np.sum(np.abs(psi_right)**2, axis=1), x=x_right)
    norm_left = integrate.simpson(np.sum(np.abs(psi_left)**2, axis=1), x=x_left) / abs(gamma)**2
    c_integral = 2j * z / (norm_left + norm_right)

    a_prime = circle_derivative(
        lambda values: wronskian(None, values, integrator=integrator) / (1. - values**-2), theta, derivative_step
    )
    c_connection = gamma / a_prime
    relative_gap = abs(c_connection - c_integral) / abs(c_integral)

    ratio = c_integral / (1j * z)
    if ratio.real <= 0:
        raise InconsistentNormingConstant('The closed form violates c = i z |c|: c/(i z) = {}'.format(ratio))
    if relative_gap > NORMING_ERROR_GAP:
        raise InconsistentNormingConstant(
            'Norming constants disagree at theta={}: {} (connection) vs {} (closed form)'.format(
                theta, c_connection, c_integral
            )
        )
    if relative_gap > NORMING_WARNING_GAP:
        LOGGER.warning('Norming constants at theta=%.6g agree only to %.2e', theta, relative_gap)

    # da/dlambda = a'(z) / lambda'(z), with lambda'(z) = (1 - z^-2) / 2
    da_dlambda = a_prime / ((1. - z**-2) / 2.)
    sign_condition = bool(np.sign((-1j * gamma).real) == -np.sign((-1j * da_dlambda).real))
    return NormingConstant(
        c=1j * z * abs(ratio),
        c_connection=complex(c_connection),
        c_integral=complex(c_integral),
        gamma=complex(gamma),
        a_prime=complex(a_prime),
        relative_gap=float(relative_gap),
        sign_condition=sign_condition
    )


def compute_scattering_data(q, grid=None, n_scan=256, edge=None, x_match=0.):
    """Run the full forward transform: coefficients on the spectral grid, circle zeros and norming constants.

    :param q: the potential
    :param grid: the spectral grid (default: :py:class:`~dark_soliton_lab.core.SpectralGrid` defaults)
    :param n_scan: number of scan points on the circle
    :param edge: excluded angle around z = +-1 on the circle (default: the grid delta1)
    """
    grid = SpectralGrid() if grid is None else grid
    integrator = JostIntegrator(q, x_match=x_match)
    coefficients = scattering_coefficients(q, grid, integrator=integrator)
    zeros = find_circle_zeros(q, n_scan=n_scan, edge=grid.delta1 if edge is None else edge, integrator=integrator)
    couplings = [norming_constant(q, theta, integrator=integrator).c for theta in zeros.thetas]
    discrete = DiscreteSpectrum(zeros.thetas, couplings) if len(couplings) else DiscreteSpectrum.empty()
    return ScatteringData(coefficients, discrete, boundary_suspect=zeros.boundary_suspect)


def afactor(data, z):
    """Return a(z) from the trace formula: Blaschke product over the poles times the outer factor."""
    z = complex(z)
    blaschke = np.prod([(z - pole) / (z - np.conj(pole)) for pole in data.discrete.poles])
    return blaschke * np.exp(-data.quadrature.cauchy(z, domain='real') / (2j * np.pi))


def trace_formula_check(data, q, points=(2j, 1. + 1j), integrator=None):
    """Return the maximal relative residual between the trace formula and a(z) from the Jost solutions.

    :param data: the :py:class:`ScatteringData` of q
    :param q: the potential
    :param points: points of the upper half-plane
    """
    points = np.asarray(points, dtype=complex)
    if integrator is None:
        integrator = JostIntegrator(q)
    direct = wronskian(None, points, integrator=integrator) / (1. - points**-2)
    factored = np.array([afactor(data, point) for point in points])
    return float(np.max(np.abs(factored - direct) / np.abs(direct)))


def theta_condition_residual(data):
    """Return |prod z_k^2 - q_minus exp((1 / 2 pi i) int_R L(s) / s ds)|."""
    moment = data.quadrature.integrate(lambda s: 1. / s, domain='real').real
    return abs(data.discrete.pole_product - data.q_minus * np.exp(moment / (2j * np.pi)))


def mass(q):
    """Return the mass functional M = int (1 - |q|^2) dx of a grid function (periodic trapezoid)."""
    return float(np.sum(1. - np.abs(q.values)**2) * q.grid.h)


def mass_trace_check(data, q):
    """Return |M(q) - (2 sum Im z_k + (1 / 2 pi) int_R L(s) ds)|.

    The right-hand side is the 1/z coefficient of a(z) = 1 - i M / z + O(z^-2).
    """
    predicted = 2. * np.sum(data.discrete.poles.imag) + data.quadrature.integrate(
        lambda s: np.ones_like(s), domain='real'
    ).real / (2. * np.pi)
    return abs(mass(q) - predicted)

