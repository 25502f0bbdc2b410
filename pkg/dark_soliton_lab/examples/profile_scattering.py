#!/usr/bin/env python
"""A profiling script for the forward scattering transform of a perturbed black soliton.

It times the Jost sweeps over the spectral grid and the circle scan, and can be used to check that the memory
used by the Runge-Kutta sweeps stays bounded when the number of spectral nodes grows."""
import time

import click
import numpy as np
import psutil

from memory_profiler import memory_usage, profile

from dark_soliton_lab.core import GridFunction, SpatialGrid, SpectralGrid
from dark_soliton_lab.forward_scattering import JostIntegrator, scattering_coefficients
from dark_soliton_lab.spectrum import find_circle_zeros, norming_constant


def get_memory():
    """Return the resident, virtual and unique memory of the current process, in bytes."""
    full_info = psutil.Process().memory_full_info()
    return {key: getattr(full_info, key) for key in ('rss', 'vms', 'uss')}


def print_memory_delta(start_mem, end_mem):
    """Report the change of each memory counter in MB."""
    for key, end_value in end_mem.items():
        delta = end_value - start_mem[key]
        click.echo('{}: {:.2f} MB -> {:.2f} MB (delta {:+.2f} MB)'.format(key, start_mem[key] / 1024.**2,
                                                                      end_value / 1024.**2, delta / 1024.**2))


def main_run(q, spectral_grid, n_scan):
    """Main function run, possibly to be profiled."""
    integrator = JostIntegrator(q)

    start = time.time()
    coefficients = scattering_coefficients(q, spectral_grid, integrator=integrator)
    click.echo('Time for the Jost sweeps on {} spectral nodes: {:.4} s'.format(spectral_grid.size, time.time() - start))
    click.echo('Unitarity defect: {:.3e}'.format(coefficients.unitarity_defect()))

    start = time.time()
    zeros = find_circle_zeros(q, n_scan=n_scan, integrator=integrator)
    click.echo('Time for the circle scan ({} points): {:.4} s'.format(n_scan, time.time() - start))

    for theta in zeros.thetas:
        constant = norming_constant(q, theta, integrator=integrator)
        click.echo('- theta = {:.12f}, c = {:.10g} (the two formulas agree to {:.2e})'.format(
            theta, constant.c, constant.relative_gap))

    assert len(zeros.thetas) >= 1, 'The perturbed black soliton must keep at least one soliton'
    click.echo('All tests passed')


@click.command()
@click.option('-L', '--half-length', default=40., help='Half-length of the box.')
@click.option('-n', '--num-samples', default=2048, help='Number of grid samples (power of two).')
@click.option('-z', '--z-nodes', default=48, help='Spectral nodes per run.')
@click.option('-s', '--n-scan', default=256, help='Number of scan points on the circle.')
@click.option('-e', '--eps', default=0.05, help='Amplitude of the Gaussian perturbation of tanh(x).')
@click.option('-m', '--check-memory-measurement', is_flag=True, help='Perform various additional memory measurements.')
@click.option('-l', '--with-line-profiler', is_flag=True, help='When profiling memory, also run a line profiler.')
@click.help_option('-h', '--help')
def main(half_length, num_samples, z_nodes, n_scan, eps, check_memory_measurement, with_line_profiler):  # pylint: disable=too-many-arguments
    """Testing performance and memory of the forward scattering transform."""
    start_mem = get_memory()

    grid = SpatialGrid.symmetric(half_length, num_samples)
    q = GridFunction(grid, np.tanh(grid.x) + eps * np.exp(-grid.x**2))
    spectral_grid = SpectralGrid(z_nodes)

    function = profile(main_run) if with_line_profiler else main_run
    if check_memory_measurement:
        interval = 0.01  # seconds
        samples = memory_usage((function, (q, spectral_grid, n_scan), {}), interval=interval)
        assert samples, 'The run was too fast to sample its memory every {} s'.format(interval)
        click.echo('Peak memory of the sweeps: {:.3f} MB ({} samples every {} s)'.format(max(samples), len(samples),
                                                                                  interval))
    else:
        function(q=q, spectral_grid=spectral_grid, n_scan=n_scan)

    print_memory_delta(start_mem, get_memory())


if __name__ == '__main__':
    main()  # pylint: disable=no-value-for-parameter
