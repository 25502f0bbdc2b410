"""Quadrature of L(s) = log(1 - |r(s)|^2) against smooth or Cauchy-type kernels on (0, inf) or on the real line.

L is only known on the nodes of a :py:class:`~dark_soliton_lab.core.SpectralGrid`. Between nodes of the same run
the composite trapezoidal rule in log|s| is used; the excluded windows around +-1, where L generically has a
logarithmic singularity, are bridged with a fitted model A log|s -+ 1| + B integrated with the algebraic-logarithmic
weights of QUADPACK; the tails towards 0 and infinity use the power laws L ~ s^4 and L ~ s^-4.
"""
import logging

import numpy as np
from scipy import integrate

LOGGER = logging.getLogger(__name__)

# Below this fitted log-coefficient on both sides of a window, L is treated as bounded there
BOUNDED_FIT_THRESHOLD = 0.25
FIT_NODES = 3
TAIL_POWER = 4
# Cauchy integrals with |Im z| below this value use singularity subtraction
SUBTRACTION_THRESHOLD = 0.5


def _quad_complex(function, lower, upper, **kwargs):
    """Integrate a complex function with scipy.integrate.quad (real and imaginary parts separately)."""
    kwargs.setdefault('limit', 200)
    real = integrate.quad(lambda s: np.real(function(s)), lower, upper, **kwargs)[0]
    imag = integrate.quad(lambda s: np.imag(function(s)), lower, upper, **kwargs)[0]
    return real + 1j * imag


class SpectralQuadrature:
    """Integrals of log(1 - |r|^2) sampled on a spectral grid."""

    def __init__(self, grid, log_weight):
        """Store the samples.

        :param grid: a :py:class:`~dark_soliton_lab.core.SpectralGrid`
        :param log_weight: the real values of L(s) = log(1 - |r(s)|^2) on ``grid.z``
        """
        log_weight = np.asarray(log_weight, dtype=float)
        if log_weight.shape != grid.z.shape:
            raise ValueError('Expected {} samples of L, got {}'.format(grid.z.shape, log_weight.shape))
        self._grid = grid
        self._weight = log_weight
        self._reflectionless = bool(np.max(np.abs(log_weight)) < 1e-300)
        self._window_models = {}

    @property
    def grid(self):
        """The spectral grid."""
        return self._grid

    @property
    def log_weight(self):
        """The samples of L."""
        return self._weight

    @property
    def is_reflectionless(self):
        """True if L vanishes identically."""
        return self._reflectionless

    def _runs(self, domain):
        """Return the node runs (slices) of the domain."""
        runs = self._grid.runs
        return runs[2:] if domain == 'positive' else runs

    def _run_integral(self, run, kernel):
        """Trapezoidal rule in log|s| over one run of nodes."""
        nodes = self._grid.z[run]
        values = self._weight[run] * kernel(nodes) * np.abs(nodes)
        return np.sign(nodes[0]) * integrate.trapezoid(values, np.log(np.abs(nodes)))

    def window_model(self, center):
        """Return the fitted model of L around ``center`` (+1 or -1).

        :return: a dict with the window edges, the coefficients (A, B) on each side and a ``bounded`` flag
        """
        if center in self._window_models:
            return self._window_models[center]
        runs = self._grid.runs
        left_run, right_run = (runs[2], runs[3]) if center > 0 else (runs[0], runs[1])
        z = self._grid.z
        left_nodes, right_nodes = z[left_run][-FIT_NODES:], z[right_run][:FIT_NODES]
        left_fit = np.polyfit(np.log(np.abs(left_nodes - center)), self._weight[left_run][-FIT_NODES:], 1)
        right_fit = np.polyfit(np.log(np.abs(right_nodes - center)), self._weight[right_run][:FIT_NODES], 1)
        model = {
            'center': center,
            'left_edge': left_nodes[-1],
            'right_edge': right_nodes[0],
            'left_values': self._weight[left_run][-1],
            'right_values': self._weight[right_run][0],
            'left_fit': tuple(left_fit),
            'right_fit': tuple(right_fit),
            'bounded': left_fit[0] < BOUNDED_FIT_THRESHOLD and right_fit[0] < BOUNDED_FIT_THRESHOLD,
        }
        if model['bounded']:
            LOGGER.debug('L is bounded around z=%s, using linear interpolation across the window', center)
        self._window_models[center] = model
        return model

    def _window_integral(self, center, kernel):
        """Integral across the excluded window around ``center``."""
        model = self.window_model(center)
        left_edge, right_edge = model['left_edge'], model['right_edge']
        if model['bounded']:
            slope = (model['right_values'] - model['left_values']) / (right_edge - left_edge)

            def linear(s):
                return (model['left_values'] + slope * (s - left_edge)) * kernel(s)

            return _quad_complex(linear, left_edge, right_edge, points=[center])

        total = 0j
        for (lower, upper), (coeff_log, coeff_const), weight in (
            ((left_edge, center), model['left_fit'], 'alg-logb'),
            ((center, right_edge), model['right_fit'], 'alg-loga'),
        ):
            log_part = _quad_complex(kernel, lower, upper, weight=weight, wvar=(0, 0))
            plain_part = _quad_complex(kernel, lower, upper)
            total += coeff_log * log_part + coeff_const * plain_part
        return total

    def _tail_integrals(self, domain, kernel):
        """Integrals over (0, s_min), (s_max, inf) and, for the real line, their mirror images."""
        z = self._grid.z
        runs = self._grid.runs
        pieces = [
            (runs[2], 0, 0., 'zero'),
            (runs[3], -1, np.inf, 'infinity'),
        ]
        if domain == 'real':
            pieces += [
                (runs[1], -1, 0., 'zero'),
                (runs[0], 0, -np.inf, 'infinity'),
            ]
        total = 0j
        for run, position, end, kind in pieces:
            anchor = z[run][position]
            anchor_value = self._weight[run][position]
            power = TAIL_POWER if kind == 'zero' else -TAIL_POWER

            def tail(s, anchor=anchor, anchor_value=anchor_value, power=power):
                return anchor_value * (s / anchor)**power * kernel(s)

            lower, upper = sorted((anchor, end))
            total += _quad_complex(tail, lower, upper)
        return total

    def integrate(self, kernel, domain='positive'):
        """Return the integral of L(s) K(s) over (0, inf) (``domain='positive'``) or the real line (``'real'``).

        :param kernel: a vectorised callable of real s, possibly complex-valued, smooth on the integration domain
        """
        if domain not in ('positive', 'real'):
            raise ValueError("domain must be 'positive' or 'real', got '{}'".format(domain))
        if self._reflectionless:
            return 0j
        total = sum(self._run_integral(run, kernel) for run in self._runs(domain))
        centers = (1.,) if domain == 'positive' else (-1., 1.)
        total += sum(self._window_integral(center, kernel) for center in centers)
        total += self._tail_integrals(domain, kernel)
        return complex(total)

    def cauchy(self, z, domain='positive'):
        """Return the Cauchy integral of L(s) / (s - z) over the domain.

        For z close to the real axis, inside a run of nodes, the value of L at Re z is subtracted and its
        contribution integrated exactly with principal logarithms, which gives the boundary value from the side
        of the sign of Im z.
        """
        if self._reflectionless:
            return 0j
        z = complex(z)
        target = None
        if abs(z.imag) < SUBTRACTION_THRESHOLD:
            for run in self._runs(domain):
                nodes = self._grid.z[run]
                if nodes[0] <= z.real <= nodes[-1]:
                    target = run
                    break
        if target is None:
            return self.integrate(lambda s: 1. / (s - z), domain)

        total = 0j
        for run in self._runs(domain):
            if run != target:
                total += self._run_integral(run, lambda s: 1. / (s - z))
        nodes = self._grid.z[target]
        weights = self._weight[target]
        reference = np.interp(z.real, nodes, weights)
        values = (weights - reference) / (nodes - z) * np.abs(nodes)
        total += np.sign(nodes[0]) * integrate.trapezoid(values, np.log(np.abs(nodes)))
        total += reference * (np.log(nodes[-1] - z) - np.log(nodes[0] - z))

        centers = (1.,) if domain == 'positive' else (-1., 1.)
        total += sum(self._window_integral(center, lambda s: 1. / (s - z)) for center in centers)
        total += self._tail_integrals(domain, lambda s: 1. / (s - z))
        return complex(total)

    def log_moment(self):
        """Return the integral of L(s) / s over (0, inf)."""
        return self.integrate(lambda s: 1. / s, 'positive').real

    def poisson(self, z):
        """Return the integral of L(s) Im(z) / |s - z|^2 over (0, inf), for z off the positive axis."""
        z = complex(z)
        return self.integrate(lambda s: z.imag / np.abs(s - z)**2, 'positive').real
