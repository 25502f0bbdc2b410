"""A numerical laboratory for dark solitons of the defocusing nonlinear Schroedinger equation.

It computes the forward scattering transform of finite-density data, synthesises exact N-soliton solutions,
evaluates the closed-form long-time asymptotics and checks them against a direct split-step solver.
"""
__version__ = '0.1.0'

# pylint: disable=wrong-import-position
from .core import GridFunction, SpatialGrid, SpectralGrid
from .nsoliton import SolitonSpec, nsoliton_eval
from .spectrum import DiscreteSpectrum, ScatteringData, compute_scattering_data
from .asymptotics import AsymptoticPredictor
from .evolve import evolve_to

__all__ = (
    'GridFunction', 'SpatialGrid', 'SpectralGrid', 'SolitonSpec', 'nsoliton_eval', 'DiscreteSpectrum',
    'ScatteringData', 'compute_scattering_data', 'AsymptoticPredictor', 'evolve_to'
)
