"""Shared numeric primitives: spatial and spectral grids, grid functions, the maps lambda and zeta, the phase Phi.

All the classes defined here are immutable after construction: the arrays they expose are read-only views.
"""
import numpy as np
from scipy.interpolate import CubicSpline

from .exceptions import GridError, SpectralDomainError


def _readonly(array):
    """Return a read-only copy of the given array."""
    array = np.array(array)
    array.setflags(write=False)
    return array


def _check_nonzero(z):
    """Raise if any entry of z is exactly zero."""
    if np.any(np.asarray(z) == 0):
        raise SpectralDomainError('The spectral parameter must be non-zero, got z={}'.format(z))


def spectral_lambda(z):
    """Return lambda(z) = (z + 1/z) / 2 (vectorised).

    :param z: a complex number or array, non-zero
    :raise SpectralDomainError: if z == 0
    """
    _check_nonzero(z)
    return (z + 1. / z) / 2.


def spectral_zeta(z):
    """Return zeta(z) = (z - 1/z) / 2 (vectorised).

    :param z: a complex number or array, non-zero
    :raise SpectralDomainError: if z == 0
    """
    _check_nonzero(z)
    return (z - 1. / z) / 2.


def phase_phi(z, x, t):
    """Return the phase Phi(z; x, t) = i x (z - 1/z) - i t (z^2 - 1/z^2).

    It is purely imaginary for real z, and real on the unit circle (see :py:func:`circle_phase`).
    Broadcasting rules of numpy apply to the three arguments.
    """
    _check_nonzero(z)
    return 1j * x * (z - 1. / z) - 1j * t * (z**2 - z**-2)


def circle_phase(theta, x, t):
    """Return the real value of Phi at z = exp(i theta), i.e. -2 sin(theta) (x - 2 t cos(theta))."""
    return -2. * np.sin(theta) * (x - 2. * t * np.cos(theta))


def background(x, q_minus=-1.):
    """Return the smooth background joining q_minus (at -infinity) to 1 (at +infinity).

    For q_minus = -1 this is tanh(x).
    """
    return (1. + q_minus) / 2. + (1. - q_minus) / 2. * np.tanh(x)


def background_second_derivative(x, q_minus=-1.):
    """Return the second derivative in x of :py:func:`background`."""
    sech2 = 1. / np.cosh(x)**2
    return (1. - q_minus) / 2. * (-2. * sech2 * np.tanh(x))


class SpatialGrid:
    """A uniform periodic grid x_j = x_min + j h, j = 0, ..., n-1, with h = (x_max - x_min) / n."""

    __slots__ = ('_x_min', '_x_max', '_n')

    def __init__(self, x_min, x_max, n):
        """Build the grid.

        :param x_min: left end of the box
        :param x_max: right end of the box (not a grid point, by periodicity)
        :param n: number of samples, a power of two
        """
        if not x_min < x_max:
            raise GridError('x_min must be smaller than x_max, got [{}, {}]'.format(x_min, x_max))
        if int(n) != n or n < 2 or (int(n) & (int(n) - 1)):
            raise GridError('The number of samples must be a power of two, got {}'.format(n))
        self._x_min = float(x_min)
        self._x_max = float(x_max)
        self._n = int(n)

    @classmethod
    def symmetric(cls, half_length, n):
        """Return the grid on [-half_length, half_length)."""
        return cls(-half_length, half_length, n)

    @property
    def x_min(self):
        """The left end of the box."""
        return self._x_min

    @property
    def x_max(self):
        """The right end of the box."""
        return self._x_max

    @property
    def n(self):
        """The number of samples."""
        return self._n

    @property
    def h(self):
        """The grid spacing."""
        return (self._x_max - self._x_min) / self._n

    @property
    def length(self):
        """The box length."""
        return self._x_max - self._x_min

    @property
    def x(self):
        """The sample positions."""
        return self._x_min + self.h * np.arange(self._n)

    @property
    def wavenumbers(self):
        """The angular wavenumbers of the discrete Fourier transform on this grid."""
        return 2. * np.pi * np.fft.fftfreq(self._n, d=self.h)

    def index_of(self, x_value):
        """Return the index of the sample closest to x_value."""
        index = int(round((x_value - self._x_min) / self.h))
        if index < 0 or index >= self._n:
            raise GridError('Position {} is outside the grid [{}, {})'.format(x_value, self._x_min, self._x_max))
        return index

    def to_dict(self):
        """Return a JSON-serialisable representation."""
        return {'x_min': self._x_min, 'x_max': self._x_max, 'n': self._n}

    @classmethod
    def from_dict(cls, data):
        """Inverse of :py:meth:`to_dict`."""
        return cls(data['x_min'], data['x_max'], data['n'])

    def __eq__(self, other):
        if not isinstance(other, SpatialGrid):
            return NotImplemented
        return (self._x_min, self._x_max, self._n) == (other.x_min, other.x_max, other.n)

    def __hash__(self):
        return hash((self._x_min, self._x_max, self._n))

    def __repr__(self):
        return 'SpatialGrid({}, {}, {})'.format(self._x_min, self._x_max, self._n)


class GridFunction:
    """Complex samples of a field (q or v = q - background) on a :py:class:`SpatialGrid`."""

    __slots__ = ('_grid', '_values')

    def __init__(self, grid, values):
        values = np.asarray(values, dtype=complex)
        if values.shape != (grid.n,):
            raise GridError('Expected {} samples, got an array of shape {}'.format(grid.n, values.shape))
        self._grid = grid
        self._values = _readonly(values)

    @classmethod
    def from_function(cls, grid, function):
        """Sample a vectorised function of x on the grid."""
        return cls(grid, function(grid.x))

    @property
    def grid(self):
        """The underlying spatial grid."""
        return self._grid

    @property
    def values(self):
        """The (read-only) complex samples."""
        return self._values

    @property
    def left_value(self):
        """The sample at the left end of the box."""
        return complex(self._values[0])

    @property
    def right_value(self):
        """The sample at the last grid point (closest to the right end of the box)."""
        return complex(self._values[-1])

    @property
    def q_minus(self):
        """The unimodular left background value, read from the left end of the box."""
        left = self.left_value
        if left == 0:
            return -1. + 0j
        return left / abs(left)

    def with_values(self, values):
        """Return a new grid function on the same grid."""
        return GridFunction(self._grid, values)

    def perturbed(self, other, eps):
        """Return self + eps * other, for another grid function on the same grid."""
        if other.grid != self._grid:
            raise GridError('Cannot combine grid functions on different grids')
        return GridFunction(self._grid, self._values + eps * other.values)

    def refine(self, factor):
        """Return the potential on a grid finer by ``factor``, closed at the right end.

        The deviation from the smooth background is interpolated spectrally (zero padding), the background
        itself is evaluated exactly. The returned arrays have ``n * factor + 1`` entries, the last one sitting
        at ``x_max`` (obtained by periodicity of the deviation).

        :param factor: a positive power of two
        :return: a tuple ``(x_fine, q_fine)``
        """
        factor = int(factor)
        if factor < 1 or (factor & (factor - 1)):
            raise GridError('The refinement factor must be a power of two, got {}'.format(factor))
        grid = self._grid
        q_minus = self.q_minus
        x_fine = grid.x_min + (grid.h / factor) * np.arange(grid.n * factor + 1)
        deviation = self._values - background(grid.x, q_minus)
        if factor == 1:
            fine_deviation = deviation
        else:
            spectrum = np.fft.fft(deviation)
            n_coarse = grid.n
            half = n_coarse // 2
            padded = np.zeros(n_coarse * factor, dtype=complex)
            padded[:half] = spectrum[:half]
            padded[-half + 1:] = spectrum[-half + 1:]
            # The Nyquist coefficient is split evenly between the two new frequencies
            padded[half] = spectrum[half] / 2.
            padded[-half] = spectrum[half] / 2.
            fine_deviation = np.fft.ifft(padded) * factor
        fine_deviation = np.append(fine_deviation, fine_deviation[0])
        return x_fine, fine_deviation + background(x_fine, q_minus)

    def padded(self, half_length):
        """Return the potential extended by its background to a box containing [-half_length, half_length].

        The box grows about its centre by the smallest power of two that suffices, so the spacing is kept, the
        number of samples stays a power of two and the original samples are samples of the result.

        :param half_length: the half-width the new box must cover
        """
        grid = self._grid
        centre = (grid.x_min + grid.x_max) / 2.
        half = (grid.x_max - grid.x_min) / 2.
        reach = max(half_length - centre, half_length + centre)
        factor = 1
        while factor * half < reach:
            factor *= 2
        if factor == 1:
            return self
        new_grid = SpatialGrid(centre - factor * half, centre + factor * half, grid.n * factor)
        values = np.asarray(background(new_grid.x, self.q_minus), dtype=complex)
        offset = (factor - 1) * grid.n // 2
        values[offset:offset + grid.n] = self._values
        return GridFunction(new_grid, values)

    def interpolate(self, x_values):
        """Interpolate the samples at arbitrary positions inside the box with cubic splines."""
        x_values = np.asarray(x_values, dtype=float)
        real = CubicSpline(self._grid.x, self._values.real)(x_values)
        imag = CubicSpline(self._grid.x, self._values.imag)(x_values)
        return real + 1j * imag

    def sup_distance(self, other):
        """Return max |self - other| over the grid."""
        other_values = other.values if isinstance(other, GridFunction) else np.asarray(other)
        return float(np.max(np.abs(self._values - other_values)))

    def __repr__(self):
        return 'GridFunction({!r}, <{} samples>)'.format(self._grid, self._grid.n)


class SpectralGrid:
    """Real spectral nodes, logarithmically spaced and closed under z -> 1/z and z -> -z.

    On each of the four runs (-1/delta0, -1-), (-1+, -delta0), (delta0, 1-), (1+, 1/delta0) there are
    ``z_nodes`` samples, uniform in log|z|. The exclusion windows are (-delta0, delta0) and
    (+-1 - delta1, +-1 + delta1).
    """

    __slots__ = ('_z_nodes', '_delta0', '_delta1', '_z', '_log_nodes')

    def __init__(self, z_nodes=48, delta0=0.05, delta1=0.02):
        """Build the spectral grid.

        :param z_nodes: number of nodes per run (four runs in total)
        :param delta0: half-width of the excluded window around 0
        :param delta1: half-width of the excluded windows around -1 and 1
        """
        if z_nodes < 3:
            raise GridError('At least 3 nodes per run are needed, got {}'.format(z_nodes))
        if not 0 < delta0 < 0.5 or not 0 < delta1 < 0.5:
            raise GridError('Exclusion widths must lie in (0, 0.5), got {} and {}'.format(delta0, delta1))
        u_first = -np.log1p(-delta1)
        u_last = -np.log(delta0)
        if not u_first < u_last:
            raise GridError('Exclusion windows overlap: delta0={}, delta1={}'.format(delta0, delta1))
        self._z_nodes = int(z_nodes)
        self._delta0 = float(delta0)
        self._delta1 = float(delta1)
        log_nodes = np.linspace(u_first, u_last, self._z_nodes)
        positive = np.concatenate([np.exp(-log_nodes[::-1]), np.exp(log_nodes)])
        self._z = _readonly(np.concatenate([-positive[::-1], positive]))
        self._log_nodes = _readonly(log_nodes)

    @property
    def z_nodes(self):
        """Number of nodes per run."""
        return self._z_nodes

    @property
    def delta0(self):
        """Half-width of the excluded window around 0."""
        return self._delta0

    @property
    def delta1(self):
        """Half-width of the excluded windows around -1 and 1."""
        return self._delta1

    @property
    def z(self):
        """All the nodes, sorted."""
        return self._z

    @property
    def size(self):
        """Total number of nodes."""
        return 4 * self._z_nodes

    @property
    def positive_slice(self):
        """Slice selecting the positive nodes in :py:attr:`z`."""
        return slice(2 * self._z_nodes, 4 * self._z_nodes)

    @property
    def runs(self):
        """The four slices of contiguous nodes between exclusion windows, from left to right."""
        m = self._z_nodes
        return tuple(slice(i * m, (i + 1) * m) for i in range(4))

    @property
    def reciprocal_index(self):
        """Index array ``p`` such that ``z[p[i]] == 1 / z[i]`` up to rounding."""
        m2 = 2 * self._z_nodes
        index = np.arange(2 * m2)
        return np.where(index < m2, m2 - 1 - index, 3 * m2 - 1 - index)

    def to_dict(self):
        """Return a JSON-serialisable representation."""
        return {'z_nodes': self._z_nodes, 'delta0': self._delta0, 'delta1': self._delta1}

    @classmethod
    def from_dict(cls, data):
        """Inverse of :py:meth:`to_dict`."""
        return cls(data['z_nodes'], data['delta0'], data['delta1'])

    def __eq__(self, other):
        if not isinstance(other, SpectralGrid):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash((self._z_nodes, self._delta0, self._delta1))

    def __repr__(self):
        return 'SpectralGrid(z_nodes={}, delta0={}, delta1={})'.format(self._z_nodes, self._delta0, self._delta1)
