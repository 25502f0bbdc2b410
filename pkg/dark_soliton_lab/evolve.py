"""Direct numerical evolution of the defocusing NLS i q_t + q_xx - 2(|q|^2 - 1) q = 0 with finite-density data.

The field is split as q = B + v, with B(x) the fixed smooth background joining the left value q_- to 1, so that v
decays at both ends of the box and can be treated with Fourier methods. v solves

    i v_t + v_xx = 2(|q|^2 - 1) q - B''

which is integrated by Strang splitting: half a step of the pointwise sub-flow i v_t = 2(|q|^2 - 1) q - B''
(classical RK4 at each node), a full exact spectral step of i v_t + v_xx = 0, and another pointwise half step.
"""
from collections import namedtuple
import logging

import numpy as np

from .core import GridFunction, background, background_second_derivative
from .exceptions import BlowUpError, BoundaryLeakError
from .spectrum import mass

LOGGER = logging.getLogger(__name__)

DEFAULT_DT = 2e-3
MAX_DT = 1e-2
DEFAULT_BOUNDARY_TOLERANCE = 1e-6
# Number of samples at each end of the box checked for boundary leaks
BOUNDARY_SAMPLES = 4
# Steps between two boundary and NaN checks
CHECK_EVERY = 10
MASS_DRIFT_WARNING = 1e-6

MassSample = namedtuple('MassSample', ['t', 'mass'])


class EvolutionState:
    """The state of a simulation: the deviation v from the background at time t, plus the precomputed samples."""

    __slots__ = ('_grid', '_v', '_t', '_dt', '_q_minus', '_background', '_background_dxx', '_propagator',
                 '_boundary_tolerance')

    def __init__(self, grid, v, t, dt, q_minus=-1., boundary_tolerance=DEFAULT_BOUNDARY_TOLERANCE):  # pylint: disable=too-many-arguments
        if not 0 < dt <= MAX_DT:
            raise ValueError('The time step must be in (0, {}], got {}'.format(MAX_DT, dt))
        self._grid = grid
        self._v = np.asarray(v, dtype=complex)
        self._t = float(t)
        self._dt = float(dt)
        self._q_minus = complex(q_minus)
        self._background = background(grid.x, self._q_minus)
        self._background_dxx = background_second_derivative(grid.x, self._q_minus)
        self._propagator = np.exp(-1j * grid.wavenumbers**2 * self._dt)
        self._boundary_tolerance = boundary_tolerance

    @classmethod
    def initial(cls, q0, dt=DEFAULT_DT, t=0., boundary_tolerance=DEFAULT_BOUNDARY_TOLERANCE):
        """Return the state of the initial datum q0 (a :py:class:`~dark_soliton_lab.core.GridFunction`)."""
        q_minus = q0.q_minus
        v = q0.values - background(q0.grid.x, q_minus)
        state = cls(q0.grid, v, t, dt, q_minus=q_minus, boundary_tolerance=boundary_tolerance)
        state.check()
        return state

    @property
    def grid(self):
        """The spatial grid."""
        return self._grid

    @property
    def v(self):
        """The deviation from the background."""
        return self._v

    @property
    def t(self):
        """The current time."""
        return self._t

    @property
    def dt(self):
        """The time step."""
        return self._dt

    @property
    def q_minus(self):
        """The left background value."""
        return self._q_minus

    @property
    def boundary_tolerance(self):
        """Maximal allowed |v| at the ends of the box."""
        return self._boundary_tolerance

    @property
    def field(self):
        """The full field q = B + v as a :py:class:`~dark_soliton_lab.core.GridFunction`."""
        return GridFunction(self._grid, self._background + self._v)

    def _replace(self, v, t):
        """Return a state at time t with deviation v sharing the precomputed samples."""
        new = EvolutionState.__new__(EvolutionState)
        for name in self.__slots__:
            setattr(new, name, getattr(self, name))
        new._v = v  # pylint: disable=protected-access
        new._t = t  # pylint: disable=protected-access
        return new

    def _pointwise_rhs(self, v):
        """Return dv/dt of the pointwise sub-flow."""
        q = self._background + v
        return -1j * (2. * (np.abs(q)**2 - 1.) * q - self._background_dxx)

    def _pointwise_step(self, v, dt):
        """Advance the pointwise sub-flow by dt with RK4."""
        k1 = self._pointwise_rhs(v)
        k2 = self._pointwise_rhs(v + dt / 2. * k1)
        k3 = self._pointwise_rhs(v + dt / 2. * k2)
        k4 = self._pointwise_rhs(v + dt * k3)
        return v + dt / 6. * (k1 + 2. * k2 + 2. * k3 + k4)

    def advance(self, check=True):
        """Return the state one Strang step later."""
        v = self._pointwise_step(self._v, self._dt / 2.)
        v = np.fft.ifft(self._propagator * np.fft.fft(v))
        v = self._pointwise_step(v, self._dt / 2.)
        new = self._replace(v, self._t + self._dt)
        if check:
            new.check()
        return new

    def boundary_magnitude(self):
        """Return max |v| over the first and last samples of the box."""
        return float(max(np.max(np.abs(self._v[:BOUNDARY_SAMPLES])), np.max(np.abs(self._v[-BOUNDARY_SAMPLES:]))))

    def check(self):
        """Raise if the state contains NaNs or if v does not vanish at the ends of the box.

        :raise BlowUpError: on non-finite samples
        :raise BoundaryLeakError: if the boundary magnitude exceeds the tolerance
        """
        if not np.all(np.isfinite(self._v)):
            raise BlowUpError('Non-finite values in the solution at t={}'.format(self._t))
        magnitude = self.boundary_magnitude()
        if magnitude > self._boundary_tolerance:
            raise BoundaryLeakError(
                'The solution reached the ends of the box at t={}: |v| = {:.3e} > {:.1e}'.format(
                    self._t, magnitude, self._boundary_tolerance
                )
            )


def step(state):
    """Advance an :py:class:`EvolutionState` by one time step (Strang splitting)."""
    return state.advance()


def energy(q):
    """Return E = int (|q_x|^2 + (|q|^2 - 1)^2) dx, with a spectral derivative of the deviation from the background.

    :param q: a :py:class:`~dark_soliton_lab.core.GridFunction`
    """
    grid = q.grid
    q_minus = q.q_minus
    deviation = q.values - background(grid.x, q_minus)
    derivative = np.fft.ifft(1j * grid.wavenumbers * np.fft.fft(deviation))
    derivative += (1. - q_minus) / 2. / np.cosh(grid.x)**2
    return float(np.sum(np.abs(derivative)**2 + (np.abs(q.values)**2 - 1.)**2) * grid.h)


class Evolution:
    """Drive a simulation from an initial datum, recording the mass along the way."""

    def __init__(self, q0, dt=DEFAULT_DT, boundary_tolerance=DEFAULT_BOUNDARY_TOLERANCE):
        """Prepare the simulation.

        :param q0: the initial datum (a :py:class:`~dark_soliton_lab.core.GridFunction`)
        :param dt: the nominal time step; it is reduced so that every requested time is hit exactly
        :param boundary_tolerance: maximal allowed |q - B| at the ends of the box
        """
        self._q0 = q0
        self._dt = dt
        self._state = EvolutionState.initial(q0, dt=dt, boundary_tolerance=boundary_tolerance)
        self._mass_trace = [MassSample(0., mass(q0))]

    @property
    def state(self):
        """The current :py:class:`EvolutionState`."""
        return self._state

    @property
    def t(self):
        """The current time."""
        return self._state.t

    @property
    def mass_trace(self):
        """The recorded (t, M(t)) samples."""
        return list(self._mass_trace)

    def relative_mass_drift(self):
        """Return max_t |M(t) - M(0)| / |M(0)| over the recorded samples."""
        initial = self._mass_trace[0].mass
        scale = abs(initial) if initial != 0 else 1.
        return max(abs(sample.mass - initial) for sample in self._mass_trace) / scale

    def advance_to(self, t_final, snapshot_every=None, on_snapshot=None):
        """Advance the simulation to t_final and return q(., t_final).

        :param t_final: the target time, not smaller than the current time
        :param snapshot_every: if given, call ``on_snapshot(index, t, q)`` every this many time units
            (and at t_final)
        :param on_snapshot: the snapshot callback
        """
        current = self._state.t
        if t_final < current:
            raise ValueError('Cannot evolve backwards: t_final={} < t={}'.format(t_final, current))
        if t_final - current <= 1e-12:
            return self._state.field
        steps = int(np.ceil((t_final - current) / self._dt - 1e-9))
        dt = (t_final - current) / steps
        if abs(dt - self._state.dt) > 1e-15:
            LOGGER.debug('Adjusted the time step to %.6g to reach t=%.6g', dt, t_final)
            self._state = EvolutionState(
                self._state.grid,
                self._state.v,
                current,
                dt,
                q_minus=self._state.q_minus,
                boundary_tolerance=self._state.boundary_tolerance
            )

        snapshot_steps = None
        if snapshot_every:
            snapshot_steps = max(1, int(round(snapshot_every / dt)))
        snapshot_index = 0
        for index in range(1, steps + 1):
            self._state = self._state.advance(check=index % CHECK_EVERY == 0 or index == steps)
            if snapshot_steps and (index % snapshot_steps == 0 or index == steps):
                field = self._state.field
                self._mass_trace.append(MassSample(self._state.t, mass(field)))
                if on_snapshot is not None:
                    on_snapshot(snapshot_index, self._state.t, field)
                snapshot_index += 1

        # Pin the clock to the requested time, free of accumulated rounding
        self._state = self._state._replace(self._state.v, float(t_final))  # pylint: disable=protected-access
        field = self._state.field
        if not snapshot_steps:
            self._mass_trace.append(MassSample(self._state.t, mass(field)))
        drift = self.relative_mass_drift()
        if drift > MASS_DRIFT_WARNING * max(t_final, 1.):
            LOGGER.warning('Relative mass drift %.2e up to t=%.6g', drift, t_final)
        LOGGER.info('Evolved to t=%.6g in %d steps', t_final, steps)
        return field


def evolve_to(q0, t_final, dt=DEFAULT_DT, snapshot_every=None, on_snapshot=None,
              boundary_tolerance=DEFAULT_BOUNDARY_TOLERANCE):  # pylint: disable=too-many-arguments
    """Return q(., t_final) for the initial datum q0.

    :param q0: a :py:class:`~dark_soliton_lab.core.GridFunction`
    :param t_final: the final time, t_final >= 0
    :param dt: the time step, at most 1e-2
    :raise BlowUpError: on non-finite values
    :raise BoundaryLeakError: if the solution reaches the ends of the box
    """
    if t_final < 0:
        raise ValueError('t_final must be non-negative, got {}'.format(t_final))
    if t_final == 0:
        return q0
    return Evolution(q0, dt=dt, boundary_tolerance=boundary_tolerance).advance_to(
        t_final, snapshot_every=snapshot_every, on_snapshot=on_snapshot
    )
