"""Jost solutions of the Zakharov-Shabat system and the scattering coefficients a(z), b(z), r(z).

The Jost solutions are written as psi_1 = m_1 exp(-i zeta x) and psi_2 = m_2 exp(i zeta x), so that the
normalised columns satisfy

    m_1' = [[-i/z, i conj(q)], [-i q, i z]] m_1,        m_2' = [[-i z, i conj(q)], [-i q, i/z]] m_2,

and tend to the columns of the boundary matrices at x -> -infinity (``minus``) or x -> +infinity (``plus``).
They are integrated with the classical fourth-order Runge-Kutta scheme, vectorised over the spectral
parameter, on a spectrally refined copy of the potential.
"""
from collections import namedtuple
import logging

import numpy as np

from .core import SpectralGrid, spectral_zeta
from .exceptions import BoundaryConditionError, NumericError, SingularParameterError

LOGGER = logging.getLogger(__name__)

JostColumns = namedtuple('JostColumns', ['z', 'x_match', 'm1_minus', 'm2_minus', 'm1_plus', 'm2_plus'])

# Target for |z| * step (or |1/z| * step) in the Runge-Kutta sweeps
DEFAULT_STEP_SCALE = 0.025
MAX_REFINEMENT = 128


def _next_power_of_two(value):
    """Return the smallest power of two >= value (and >= 1)."""
    return 1 << max(0, int(np.ceil(np.log2(max(value, 1.)))))


def _column_coefficients(z, which):
    """Return the diagonal coefficients of the normalised system for the columns in ``which``."""
    inv_z = 1. / z
    diagonal = {'m1': (-1j * inv_z, 1j * z), 'm2': (-1j * z, 1j * inv_z)}
    d11 = np.stack([diagonal[name][0] for name in which])
    d22 = np.stack([diagonal[name][1] for name in which])
    return d11, d22


def _boundary_columns(z, which, q_boundary):
    """Return the boundary values (first and second components) of the columns in ``which``.

    Column 1 of the boundary matrix is (1, q_b / z), column 2 is (conj(q_b) / z, 1).
    """
    ones = np.ones_like(z)
    values = {'m1': (ones, q_boundary / z), 'm2': (np.conj(q_boundary) / z, ones)}
    first = np.stack([values[name][0] for name in which])
    second = np.stack([values[name][1] for name in which])
    return first, second


class JostIntegrator:
    """Integrate the normalised Jost columns of a fixed potential.

    The refined potentials are cached, so that repeated sweeps (e.g. during zero refinement) only pay for the
    Runge-Kutta integration.
    """

    def __init__(self, q, x_match=0., boundary_tolerance=1e-8, step_scale=DEFAULT_STEP_SCALE):
        """Prepare the integrator.

        :param q: a :py:class:`~dark_soliton_lab.core.GridFunction` with q -> 1 at the right end and |q| -> 1 at
            the left end
        :param x_match: the matching point (snapped to the closest grid point)
        :param boundary_tolerance: allowed deviation from the background at the grid ends
        :param step_scale: target value of max(|z|, 1/|z|) times the Runge-Kutta step
        """
        right_gap = abs(q.right_value - 1.)
        left_gap = abs(abs(q.left_value) - 1.)
        if right_gap > boundary_tolerance or left_gap > boundary_tolerance:
            raise BoundaryConditionError(
                'The potential does not reach the background at the grid ends: |q(x_max) - 1| = {:.3e}, '
                '||q(x_min)| - 1| = {:.3e} (tolerance {:.1e})'.format(right_gap, left_gap, boundary_tolerance)
            )
        self._q = q
        self._q_minus = q.q_minus
        self._match_index = q.grid.index_of(x_match)
        self._step_scale = step_scale
        self._refined = {}

    @property
    def potential(self):
        """The potential being integrated."""
        return self._q

    @property
    def q_minus(self):
        """The unimodular left background value."""
        return self._q_minus

    @property
    def x_match(self):
        """The actual matching point (a grid point)."""
        return float(self._q.grid.x[self._match_index])

    def refinement_factor(self, z):
        """Return the refinement factor used for the (scalar) spectral parameter z."""
        stiffness = max(abs(z), 1. / abs(z), 1.)
        target = 2. * self._q.grid.h * stiffness / self._step_scale
        return min(max(_next_power_of_two(target), 2), MAX_REFINEMENT)

    def _get_refined(self, factor):
        """Return the (cached) refined potential."""
        if factor not in self._refined:
            self._refined[factor] = self._q.refine(factor)[1]
        return self._refined[factor]

    def _sweep(self, z, which, side, factor, record):  # pylint: disable=too-many-locals
        """Integrate with a fixed refinement factor; z is a 1D array."""
        q_fine = self._get_refined(factor)
        n_fine = len(q_fine) - 1
        match_fine = self._match_index * factor
        d11, d22 = _column_coefficients(z, which)

        if side == 'minus':
            first, second = _boundary_columns(z, which, self._q_minus)
            indices = range(0, match_fine, 2)
            sign = 1
        else:
            first, second = _boundary_columns(z, which, 1. + 0j)
            indices = range(n_fine, match_fine, -2)
            sign = -1

        step = sign * 2. * self._q.grid.h / factor
        half = step / 2.
        record_every = factor // 2
        trajectory = []

        def rhs(q_value, u_value, w_value):
            return (d11 * u_value + 1j * np.conj(q_value) * w_value, -1j * q_value * u_value + d22 * w_value)

        u_val, w_val = first, second
        for counter, index in enumerate(indices):
            if record and counter % record_every == 0:
                trajectory.append((u_val, w_val))
            q_start, q_mid, q_end = q_fine[index], q_fine[index + sign], q_fine[index + 2 * sign]
            ku1, kw1 = rhs(q_start, u_val, w_val)
            ku2, kw2 = rhs(q_mid, u_val + half * ku1, w_val + half * kw1)
            ku3, kw3 = rhs(q_mid, u_val + half * ku2, w_val + half * kw2)
            ku4, kw4 = rhs(q_end, u_val + step * ku3, w_val + step * kw3)
            u_val = u_val + step / 6. * (ku1 + 2. * ku2 + 2. * ku3 + ku4)
            w_val = w_val + step / 6. * (kw1 + 2. * kw2 + 2. * kw3 + kw4)
        if record:
            trajectory.append((u_val, w_val))

        if not (np.all(np.isfinite(u_val)) and np.all(np.isfinite(w_val))):
            raise NumericError('Non-finite Jost columns on the {} side (refinement {})'.format(side, factor))

        columns = np.stack([u_val, w_val], axis=-1)  # shape (len(which), nz, 2)
        if not record:
            return columns, None
        path = np.stack([np.stack([u_path, w_path], axis=-1) for u_path, w_path in trajectory])
        if side == 'plus':
            path = path[::-1]
        return columns, path

    def integrate(self, z, side, which=('m1', 'm2'), record=False):
        """Integrate the requested columns from one end of the box to the matching point.

        :param z: complex scalar or 1D array of spectral parameters
        :param side: 'minus' (from the left end) or 'plus' (from the right end)
        :param which: the columns to integrate, a tuple with 'm1' and/or 'm2'
        :param record: if True, also return the columns at every coarse grid point between the end and the
            matching point (ordered by increasing x)
        :return: a dict mapping each column name to an array of shape (nz, 2); if ``record``, a second dict
            mapping each column name to an array of shape (n_points, nz, 2)
        """
        if side not in ('minus', 'plus'):
            raise ValueError("side must be 'minus' or 'plus', got '{}'".format(side))
        z_array = np.atleast_1d(np.asarray(z, dtype=complex))
        factors = np.array([self.refinement_factor(value) for value in z_array])
        result = {name: np.empty((len(z_array), 2), dtype=complex) for name in which}
        paths = {}
        for factor in np.unique(factors):
            mask = factors == factor
            LOGGER.debug('Jost sweep (%s): %d nodes with refinement %d', side, mask.sum(), factor)
            columns, path = self._sweep(z_array[mask], which, side, int(factor), record)
            for position, name in enumerate(which):
                result[name][mask] = columns[position]
                if record:
                    if name not in paths:
                        paths[name] = np.empty((path.shape[0], len(z_array), 2), dtype=complex)
                    paths[name][:, mask] = path[:, position]
        if record:
            return result, paths
        return result


def _check_modulus(z, delta0):
    """Raise if any |z| is below delta0."""
    modulus = np.abs(np.asarray(z))
    if np.any(modulus < delta0):
        raise SingularParameterError('|z| must be at least {}, got min |z| = {}'.format(delta0, modulus.min()))


def _det(col1, col2):
    """Row-wise determinant of two arrays of 2-vectors."""
    return col1[..., 0] * col2[..., 1] - col1[..., 1] * col2[..., 0]


def jost_solve(q, z, side='both', x_match=0., delta0=0.05, integrator=None):
    """Return the normalised Jost columns of q at the matching point.

    Columns whose integration is unstable for non-real z (m2 from the left, m1 from the right) are only
    computed when all the requested z are real; otherwise they are None.

    :param q: the potential (a GridFunction)
    :param z: complex scalar or 1D array
    :param side: 'minus', 'plus' or 'both'
    :param x_match: the matching point
    :param delta0: minimal allowed |z|
    :param integrator: an optional pre-built :py:class:`JostIntegrator` for q (x_match is then ignored)
    :return: a :py:class:`JostColumns` namedtuple; each column is an array of shape (nz, 2), or (2,) for scalar z
    """
    _check_modulus(z, delta0)
    if side not in ('minus', 'plus', 'both'):
        raise ValueError("side must be 'minus', 'plus' or 'both', got '{}'".format(side))
    if integrator is None:
        integrator = JostIntegrator(q, x_match=x_match)
    scalar = np.ndim(z) == 0
    is_real = bool(np.all(np.imag(z) == 0))

    columns = {'m1_minus': None, 'm2_minus': None, 'm1_plus': None, 'm2_plus': None}
    if side in ('minus', 'both'):
        result = integrator.integrate(z, 'minus', which=('m1', 'm2') if is_real else ('m1',))
        columns['m1_minus'] = result['m1']
        columns['m2_minus'] = result.get('m2')
    if side in ('plus', 'both'):
        result = integrator.integrate(z, 'plus', which=('m1', 'm2') if is_real else ('m2',))
        columns['m1_plus'] = result.get('m1')
        columns['m2_plus'] = result['m2']

    if scalar:
        columns = {key: (None if value is None else value[0]) for key, value in columns.items()}
    return JostColumns(z=z, x_match=integrator.x_match, **columns)


def wronskian(q, z, integrator=None, delta0=0.05):
    """Return W(z) = det[psi_1^-(z), psi_2^+(z)], for any complex z (vectorised).

    This is the numerator of a(z); it is x-independent and regular at z = +-1.
    """
    _check_modulus(z, delta0)
    if integrator is None:
        integrator = JostIntegrator(q)
    left = integrator.integrate(z, 'minus', which=('m1',))['m1']
    right = integrator.integrate(z, 'plus', which=('m2',))['m2']
    result = _det(left, right)
    return result[0] if np.ndim(z) == 0 else result


def a_extend(q, z, integrator=None, delta0=0.05):
    """Return a(z) = det[psi_1^-, psi_2^+] / (1 - z^-2) for z in the closed upper half-plane (vectorised).

    :raise ValueError: if Im z < 0
    """
    if np.any(np.imag(z) < 0):
        raise ValueError('a(z) is only defined in the upper half-plane, got z={}'.format(z))
    return wronskian(q, z, integrator=integrator, delta0=delta0) / (1. - np.asarray(z)**-2)


class ScatteringCoefficients:
    """The scattering coefficients a, b, r sampled on a :py:class:`~dark_soliton_lab.core.SpectralGrid`."""

    def __init__(self, grid, a_values, b_values, q_minus=-1., det_minus=None, det_plus=None):
        self._grid = grid
        self._a = np.array(a_values, dtype=complex)
        self._b = np.array(b_values, dtype=complex)
        self._r = self._b / self._a
        self._q_minus = complex(q_minus)
        self._det_minus = det_minus
        self._det_plus = det_plus
        for array in (self._a, self._b, self._r):
            array.setflags(write=False)

    @classmethod
    def reflectionless(cls, grid, a_values, q_minus=-1.):
        """Build coefficients with b = 0."""
        return cls(grid, a_values, np.zeros(grid.size, dtype=complex), q_minus=q_minus)

    @property
    def grid(self):
        """The spectral grid."""
        return self._grid

    @property
    def z(self):
        """The spectral nodes."""
        return self._grid.z

    @property
    def a_values(self):
        """Samples of a(z)."""
        return self._a

    @property
    def b_values(self):
        """Samples of b(z)."""
        return self._b

    @property
    def r_values(self):
        """Samples of r(z) = b(z) / a(z)."""
        return self._r

    @property
    def q_minus(self):
        """The left background value of the potential."""
        return self._q_minus

    def unitarity_defect(self):
        """Return max over the nodes of ||a|^2 - |b|^2 - 1|."""
        return float(np.max(np.abs(np.abs(self._a)**2 - np.abs(self._b)**2 - 1.)))

    def symmetry_defect(self):
        """Return the maximal violation of r(1/z) = conj(r(z)) and a(1/z) = q_minus conj(a(z)) on paired nodes."""
        pair = self._grid.reciprocal_index
        r_defect = np.max(np.abs(self._r[pair] - np.conj(self._r)))
        a_defect = np.max(np.abs(self._a[pair] - self._q_minus * np.conj(self._a)))
        return float(max(r_defect, a_defect))

    def determinant_defect(self):
        """Return the maximal relative violation of det[m1, m2] = 1 - z^-2 on both sides (if available)."""
        if self._det_minus is None or self._det_plus is None:
            return None
        expected = 1. - self.z**-2
        defect = np.maximum(np.abs(self._det_minus - expected), np.abs(self._det_plus - expected)) / np.abs(expected)
        return float(np.max(defect))

    def log_weight(self):
        """Return log(1 - |r|^2) on the nodes."""
        return np.log1p(-np.abs(self._r)**2)

    def to_dict(self):
        """Return a JSON-serialisable representation (r only, as used by the interchange format)."""
        return {
            'grid': self._grid.to_dict(),
            'z': self.z.tolist(),
            'a_re': self._a.real.tolist(),
            'a_im': self._a.imag.tolist(),
            'b_re': self._b.real.tolist(),
            'b_im': self._b.imag.tolist(),
            'q_minus': [self._q_minus.real, self._q_minus.imag],
        }

    @classmethod
    def from_dict(cls, data):
        """Inverse of :py:meth:`to_dict`."""
        grid = SpectralGrid.from_dict(data['grid'])
        a_values = np.array(data['a_re']) + 1j * np.array(data['a_im'])
        b_values = np.array(data['b_re']) + 1j * np.array(data['b_im'])
        return cls(grid, a_values, b_values, q_minus=complex(*data['q_minus']))


def scattering_coefficients(q, grid, x_match=0., integrator=None):
    """Compute a, b and r on the nodes of a spectral grid.

    :param q: the potential (a GridFunction)
    :param grid: a :py:class:`~dark_soliton_lab.core.SpectralGrid`
    :return: a :py:class:`ScatteringCoefficients` instance
    :raise NumericError: if a(z) vanishes (numerically) on a real node
    """
    if integrator is None:
        integrator = JostIntegrator(q, x_match=x_match)
    z = grid.z.astype(complex)
    left = integrator.integrate(z, 'minus')
    right = integrator.integrate(z, 'plus')
    x_m = integrator.x_match
    denominator = 1. - z**-2
    a_values = _det(left['m1'], right['m2']) / denominator
    b_values = _det(right['m1'], left['m1']) * np.exp(-2j * spectral_zeta(z) * x_m) / denominator
    if np.any(np.abs(a_values) < 1e-12):
        raise NumericError('a(z) vanishes on a real node, which signals a numerical failure')
    LOGGER.info('Computed scattering coefficients on %d nodes', grid.size)
    return ScatteringCoefficients(
        grid,
        a_values,
        b_values,
        q_minus=integrator.q_minus,
        det_minus=_det(left['m1'], left['m2']),
        det_plus=_det(right['m1'], right['m2'])
    )
