#!/usr/bin/env python
"""A walk through the laboratory: synthesise a 2-soliton, scatter it, evolve it and compare with the exact
solution and with the asymptotic predictor, with timings. Outputs are written into a run folder."""
import time

import click
import numpy as np
from profilehooks import profile

from dark_soliton_lab.asymptotics import AsymptoticPredictor
from dark_soliton_lab.core import GridFunction, SpatialGrid, SpectralGrid
from dark_soliton_lab.evolve import Evolution
from dark_soliton_lab.nsoliton import SolitonSpec, nsoliton_eval
from dark_soliton_lab.runfolder import RunFolder
from dark_soliton_lab.spectrum import compute_scattering_data


@click.command(context_settings=dict(show_default=True))
@click.option('-t', '--t-final', default=2., help='Final time of the evolution.')
@click.option('-L', '--half-length', default=40., help='Half-length of the box.')
@click.option('-n', '--num-samples', default=1024, help='Number of grid samples (power of two).')
@click.option('-d', '--dt', default=5e-3, help='Time step.')
@click.option(
    '-p', '--path', default='/tmp/test-dark-soliton-lab', help='The path of the run folder that will be created.'
)
@click.option('-c', '--clear', is_flag=True, help='Clear the run folder before starting.')
@click.option(
    '-P', '--profile-file', default=None, help='Run the evolution with profiling and output results onto this file.'
)
@click.help_option('-h', '--help')
def main(t_final, half_length, num_samples, dt, path, clear, profile_file):  # pylint: disable=too-many-arguments,too-many-locals
    """Testing the main pipelines of the laboratory, with timing."""
    folder = RunFolder(path)
    click.echo('Initialising the run folder...')
    folder.init_folder(clear=clear, command='example')

    grid = SpatialGrid.symmetric(half_length, num_samples)
    spec = SolitonSpec.from_thetas([np.pi / 3, 2 * np.pi / 3], centres=[-3., 3.])
    q0 = GridFunction(grid, nsoliton_eval(spec, grid.x, 0.))

    start = time.time()
    data = compute_scattering_data(q0, grid=SpectralGrid(32))
    click.echo('Time to compute the scattering data: {:.4} s'.format(time.time() - start))
    for pole, expected in zip(data.discrete.poles, spec.poles):
        click.echo('- pole {:.10f} (exact {:.10f})'.format(pole, expected))
    folder.add_json('scattering.json', data.to_dict())

    evolution = Evolution(q0, dt=dt)
    if profile_file is not None:
        advance = profile(sort='cumtime', filename=profile_file, stdout=False)(evolution.advance_to)
    else:
        advance = evolution.advance_to
    start = time.time()
    field = advance(t_final)
    click.echo('Time to evolve to t={}: {:.4} s'.format(t_final, time.time() - start))
    if profile_file is not None:
        click.echo("You can check the profiling results running 'snakeviz {}'".format(profile_file))

    exact = nsoliton_eval(spec, grid.x, t_final)
    click.echo('Sup-norm distance from the exact 2-soliton: {:.3e}'.format(field.sup_distance(exact)))
    click.echo('Relative mass drift: {:.3e}'.format(evolution.relative_mass_drift()))

    predicted = AsymptoticPredictor(data).predictor(grid.x, t_final)
    click.echo('Sup-norm distance from the asymptotic predictor: {:.3e}'.format(np.max(np.abs(field.values - predicted))))
    folder.add_csv('q.csv', ('x', 'q_re', 'q_im', 'abs2'),
                   [grid.x, field.values.real, field.values.imag, np.abs(field.values)**2])

    for name, hashkey, size, _ in folder.list_artifacts():
        click.echo('- {:20s}: {} ({} bytes)'.format(name, hashkey, size))
    folder.close()
    click.echo('Done.')


if __name__ == '__main__':
    main()  # pylint: disable=no-value-for-parameter
