"""Exact N-dark-soliton solutions from reflectionless scattering data.

With c_k(x, t) = c_k exp(Phi(z_k; x, t)) and Z_jk = conj(z_j) / (conj(z_j) - z_k), the residues beta_k of the
reflectionless Riemann-Hilbert problem solve (I - C Z) beta = C 1 and q = 1 + sum_k beta_k. Since c_k = i z_k |c_k|
and Phi is real on the circle, the system can be rewritten as (I + Y) beta_hat = b with the Hermitian positive
definite matrix Y_jk = |c_j c_k|^(1/2) / (conj(y_j) + y_k), y_k = -i z_k, which is what is solved here, in log space.
"""
from collections import namedtuple
import logging

import numpy as np
from scipy import linalg

from .core import circle_phase
from .exceptions import InvalidSolitonSpec
from .spectrum import DiscreteSpectrum

LOGGER = logging.getLogger(__name__)

SCHEMA_VERSION = 1
# Log-weights are clipped to this range before exponentiation
LOG_WEIGHT_CLIP = 600.

SolitonLinearSystem = namedtuple(
    'SolitonLinearSystem', ['size', 'c_tx', 'z_matrix', 'y_matrix', 'rhs', 'log_weights']
)


class SolitonSpec:
    """Reflectionless scattering data: a :py:class:`~dark_soliton_lab.spectrum.DiscreteSpectrum` with r = 0."""

    def __init__(self, discrete, require_background=False):
        """Store the data.

        :param discrete: the poles and couplings
        :param require_background: if True, require prod z_k^2 = -1, i.e. q -> -1 at the left end
        """
        if require_background and abs(discrete.pole_product + 1.) > 1e-10:
            raise InvalidSolitonSpec(
                'The boundary condition q(-inf) = -1 requires prod z_k^2 = -1, got {}'.format(discrete.pole_product)
            )
        self._discrete = discrete

    @classmethod
    def from_thetas(cls, thetas, abs_couplings=None, centres=None, require_background=False):
        """Build a spec from pole angles and either the coupling moduli or the isolated-soliton centres."""
        if abs_couplings is not None and centres is not None:
            raise ValueError('Specify either abs_couplings or centres, not both')
        if abs_couplings is not None:
            discrete = DiscreteSpectrum.from_abs_couplings(thetas, abs_couplings)
        else:
            discrete = DiscreteSpectrum.from_centres(thetas, centres)
        return cls(discrete, require_background=require_background)

    @property
    def discrete(self):
        """The discrete spectrum."""
        return self._discrete

    @property
    def poles(self):
        """The poles z_k."""
        return self._discrete.poles

    @property
    def couplings(self):
        """The couplings c_k."""
        return self._discrete.couplings

    @property
    def size(self):
        """The number of solitons N."""
        return self._discrete.size

    @property
    def q_minus(self):
        """The left background value prod z_k^2."""
        return self._discrete.pole_product

    def to_dict(self):
        """Return the JSON interchange representation (the discrete spectrum, r omitted)."""
        data = {'schema_version': SCHEMA_VERSION}
        data.update(self._discrete.to_dict())
        return data

    @classmethod
    def from_dict(cls, data):
        """Inverse of :py:meth:`to_dict`."""
        if data.get('schema_version') != SCHEMA_VERSION:
            raise ValueError('Unsupported soliton spec schema version: {}'.format(data.get('schema_version')))
        return cls(DiscreteSpectrum.from_dict(data))

    def __repr__(self):
        return 'SolitonSpec({!r})'.format(self._discrete)


def _log_weights(spec, x, t):
    """Return log|c_k| + Phi(z_k; x, t), the log-magnitudes of c_k(x, t)."""
    return np.log(spec.discrete.abs_couplings) + circle_phase(spec.discrete.thetas, x, t)


def linear_system(spec, x, t):
    """Return both forms of the linear system at a point (x, t), as a :py:class:`SolitonLinearSystem`.

    ``c_tx`` and ``z_matrix`` give the raw form (I - C Z) beta = C 1; ``y_matrix`` and ``rhs`` the Hermitian form.
    """
    poles = spec.poles
    log_weights = np.clip(_log_weights(spec, x, t), -LOG_WEIGHT_CLIP, LOG_WEIGHT_CLIP)
    y_values = -1j * poles
    cauchy = 1. / (np.conj(y_values)[:, None] + y_values[None, :])
    half = np.exp(log_weights / 2.)
    y_matrix = np.exp((log_weights[:, None] + log_weights[None, :]) / 2.) * cauchy
    conj_poles = np.conj(poles)
    return SolitonLinearSystem(
        size=spec.size,
        c_tx=np.diag(1j * poles * np.exp(log_weights)),
        z_matrix=conj_poles[:, None] / (conj_poles[:, None] - poles[None, :]),
        y_matrix=y_matrix,
        rhs=1j * poles * half,
        log_weights=log_weights
    )


def residues(spec, x, t):
    """Return the vector beta(x, t), solving the Hermitian form with a Cholesky factorisation.

    :raise InvalidSolitonSpec: if I + Y is not positive definite
    """
    if spec.size == 0:
        return np.zeros(0, dtype=complex)
    system = linear_system(spec, x, t)
    matrix = np.eye(spec.size) + system.y_matrix
    try:
        factor = linalg.cho_factor(matrix, lower=True)
    except linalg.LinAlgError:
        raise InvalidSolitonSpec('I + Y is not positive definite at x={}, t={}'.format(x, t))
    beta_hat = linalg.cho_solve(factor, system.rhs)
    return np.exp(system.log_weights / 2.) * beta_hat


def nsoliton_eval(spec, x, t):
    """Return q^(sol),N(x, t) = 1 + sum_k beta_k (vectorised over x).

    :param spec: a :py:class:`SolitonSpec`
    :param x: a position or an array of positions
    :param t: the time
    """
    x_array = np.atleast_1d(np.asarray(x, dtype=float))
    values = np.array([1. + np.sum(residues(spec, x_value, t)) for x_value in x_array], dtype=complex)
    return values[0] if np.ndim(x) == 0 else values


def nsoliton_raw(spec, x, t):
    """Return 1 + sum beta_k from the raw system (I - C Z) beta = C 1 (ill-conditioned for large |Phi|)."""
    if spec.size == 0:
        return 1. + 0j
    system = linear_system(spec, x, t)
    matrix = np.eye(spec.size) - system.c_tx @ system.z_matrix
    beta = np.linalg.solve(matrix, np.diag(system.c_tx))
    return complex(1. + np.sum(beta))


def nsoliton_cramer(spec, x, t):
    """Return q^(sol),N(x, t) from the bordered-determinant (Cramer) formula.

    q = 1 - det(I - (C Z)_1) / det(I - C Z), with (C Z)_1 the (N+1)x(N+1) matrix bordered by the column c_k(x, t)
    and the row of ones. Only usable where the determinants do not overflow.
    """
    if spec.size == 0:
        return 1. + 0j
    system = linear_system(spec, x, t)
    size = spec.size
    product = system.c_tx @ system.z_matrix
    bordered = np.zeros((size + 1, size + 1), dtype=complex)
    bordered[:size, :size] = product
    bordered[:size, size] = np.diag(system.c_tx)
    bordered[size, :] = 1.
    numerator = np.linalg.det(np.eye(size + 1) - bordered)
    denominator = np.linalg.det(np.eye(size) - product)
    return complex(1. - numerator / denominator)


def one_soliton(x, t, z0, x0=0.):
    """Return the dark soliton -i z0 (i Re z0 + Im z0 tanh(Im z0 (x - x0 - 2 Re z0 t))) (vectorised).

    It tends to 1 as x -> +inf and to z0^2 as x -> -inf; its dip min |q|^2 = (Re z0)^2 is at x = x0 + 2 Re(z0) t.

    :param z0: a point of the upper unit circle
    """
    z0 = complex(z0)
    if abs(abs(z0) - 1.) > 1e-12 or z0.imag <= 0:
        raise InvalidSolitonSpec('z0 must lie on the upper unit circle, got {}'.format(z0))
    return -1j * z0 * (1j * z0.real + z0.imag * np.tanh(z0.imag * (x - x0 - 2. * z0.real * t)))


def pair_factor(z_k, z_l):
    """Return |(z_k - z_l) / (z_k z_l - 1)|^2, the interaction factor between two poles."""
    return abs((z_k - z_l) / (z_k * z_l - 1.))**2


def soliton_centres(spec, direction=1):
    """Return the asymptotic centres x_k of the solitons of a reflectionless spec as t -> +inf or -inf.

    x_k = (1 / 2 Im z_k) log(|c_k| / (2 Im z_k) prod_l |(z_k - z_l) / (z_k z_l - 1)|^2), where the product runs
    over the solitons to the right of soliton k: l < k for t -> +inf, l > k for t -> -inf.

    :param direction: +1 or -1, the sign of t
    """
    if direction not in (1, -1):
        raise ValueError('direction must be +1 or -1, got {}'.format(direction))
    poles, abs_couplings = spec.poles, spec.discrete.abs_couplings
    centres = np.empty(spec.size)
    for k in range(spec.size):
        others = range(k) if direction == 1 else range(k + 1, spec.size)
        product = np.prod([pair_factor(poles[k], poles[l]) for l in others])
        centres[k] = np.log(abs_couplings[k] / (2. * poles[k].imag) * product) / (2. * poles[k].imag)
    return centres


def collision_shift(spec, index):
    """Return the position shift x_k(t -> +inf) - x_k(t -> -inf) that soliton ``index`` acquires in collisions."""
    return float(soliton_centres(spec, 1)[index] - soliton_centres(spec, -1)[index])


def nsoliton_separation(spec, x_shifts, x, t, alpha=0.):
    """Return e^(i alpha) [1 + sum_k (prod_{j<k} z_j^2)(sol(x - x_k, t; z_k) - 1)] (vectorised over x).

    This is the sum of well-separated one-solitons, each sitting on the background left behind by the faster
    solitons to its right.

    :param x_shifts: the centres x_k (e.g. from :py:func:`soliton_centres` or the asymptotic phase shifts)
    :param alpha: the total acquired phase alpha(1) (zero for reflectionless data)
    """
    if t <= 0:
        raise ValueError('The separated form is a t > 0 asymptotic, got t={}'.format(t))
    x = np.asarray(x, dtype=float)
    total = np.ones_like(x, dtype=complex)
    background_factor = 1. + 0j
    for pole, shift in zip(spec.poles, x_shifts):
        total = total + background_factor * (one_soliton(x, t, pole, shift) - 1.)
        background_factor *= pole**2
    return np.exp(1j * alpha) * total
