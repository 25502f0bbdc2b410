"""Command-line front end: ``dark-soliton-lab [-v|--quiet] {scatter,synthesize,evolve,predict,experiment} ...``.

Every command resolves a :py:class:`~dark_soliton_lab.config.RunConfig` (defaults < ``--config`` file < flags),
runs the corresponding pipeline and, if ``--out`` is given, writes its data files into a
:py:class:`~dark_soliton_lab.runfolder.RunFolder`. Exit status: 0 on success, 1 if an experiment fails, 2 on
configuration errors and missing files, 3 on other errors of the package.
"""
import functools
import json
import logging
import time

import click
import numpy as np

from . import __version__
from .asymptotics import AsymptoticPredictor
from .config import RunConfig, parse_real_list
from .evolve import Evolution, energy
from .exceptions import ConfigurationError, DarkSolitonLabError
from .experiments import (
    appendixC_zero, coeffevo_check, phase_regions_check, verify_theorem1, verify_theorem2
)
from .nsoliton import SolitonSpec, nsoliton_eval
from .runfolder import RunFolder
from .spectrum import compute_scattering_data, theta_condition_residual

LOGGER = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_CONFIGURATION = 2
EXIT_ERROR = 3


def _parse_params(items):
    """Parse ``KEY=VALUE`` items; values are read as JSON when possible (numbers, lists), else as strings."""
    params = {}
    for item in items:
        key, separator, value = item.partition('=')
        if not separator or not key:
            raise click.BadParameter('expected KEY=VALUE, got {!r}'.format(item))
        try:
            params[key] = json.loads(value)
        except ValueError:
            params[key] = value
    return params


def _potential_override(base, name, params, path):
    """Return the potential description resulting from the flags, or None if no flag was given."""
    if path is not None:
        return {'file': path}
    if name is None and not params:
        return None
    if name is None or name == base.get('name'):
        merged = dict(base.get('params', {}))
        merged.update(params)
        return {'name': base.get('name') if name is None else name, 'params': merged}
    return {'name': name, 'params': params}


def common_options(function):
    """Add the options shared by all the commands."""
    options = [
        click.option('--config', 'config_file', type=click.Path(), help='JSON configuration file.'),
        click.option('--out', type=click.Path(file_okay=False), help='Output directory of the run.'),
        click.option('--overwrite', is_flag=True, help='Clear the output directory if it is not empty.'),
        click.option('--potential', 'potential_name', help='Builtin potential name.'),
        click.option('--param', 'potential_params', multiple=True, help='Potential parameter KEY=VALUE.'),
        click.option('--potential-file', type=click.Path(), help='CSV file with columns x, q_re, q_im.'),
        click.option('--grid-L', 'grid_length', type=float, help='Half-length L of the box [-L, L).'),
        click.option('--grid-n', 'grid_n', type=int, help='Number of samples (power of two).'),
        click.option('--dt', type=float, help='Time step of the evolution.'),
        click.option('--z-nodes', type=int, help='Spectral nodes per run.'),
        click.option('--delta0', type=float, help='Excluded radius around z=0.'),
        click.option('--delta1', type=float, help='Excluded half-width around z=+-1.'),
        click.option('--rho', type=float, help='Half-width of the windows around the critical lines.'),
    ]
    for option in reversed(options):
        function = option(function)
    return function


def _resolve_config(command, options, overrides):
    """Build the configuration of a command from the --config file, the common options and the overrides."""
    config = RunConfig.from_file(options['config_file']) if options.get('config_file') else RunConfig()
    potential = _potential_override(
        config['potential'], options.get('potential_name'), _parse_params(options.get('potential_params', ())),
        options.get('potential_file')
    )
    flags = {
        'command': command,
        'out': options.get('out'),
        'potential': potential,
        'grid.L': options.get('grid_length'),
        'grid.n': options.get('grid_n'),
        'evolution.dt': options.get('dt'),
        'spectral.z_nodes': options.get('z_nodes'),
        'spectral.delta0': options.get('delta0'),
        'spectral.delta1': options.get('delta1'),
        'asymptotics.rho': options.get('rho'),
    }
    flags.update(overrides)
    return config.with_overrides(flags)


def _execute(config, overwrite=False):
    """Run the configuration and map the errors to exit statuses."""
    try:
        return run(config, overwrite=overwrite)
    except (ConfigurationError, FileNotFoundError, FileExistsError) as exc:
        click.echo('Error: {}'.format(exc), err=True)
        return EXIT_CONFIGURATION
    except DarkSolitonLabError as exc:
        click.echo('Error ({}): {}'.format(exc.__class__.__name__, exc), err=True)
        return EXIT_ERROR


def _command(function):
    """Turn a pipeline-specific function returning overrides into a command that runs and exits."""

    @functools.wraps(function)
    def wrapper(**kwargs):
        try:
            overrides = function(**kwargs)
            config = _resolve_config(function.__name__, kwargs, overrides)
        except (ConfigurationError, FileNotFoundError) as exc:
            click.echo('Error: {}'.format(exc), err=True)
            raise click.exceptions.Exit(EXIT_CONFIGURATION)
        status = _execute(config, overwrite=kwargs.get('overwrite', False))
        raise click.exceptions.Exit(status)

    return wrapper


@click.group(context_settings=dict(show_default=True))
@click.option('-v', '--verbose', count=True, help='Increase the log level (repeatable).')
@click.option('-q', '--quiet', is_flag=True, help='Only log errors.')
@click.version_option(__version__)
@click.help_option('-h', '--help')
def cli(verbose, quiet):
    """Numerical laboratory for dark solitons of the defocusing NLS on a nonzero background."""
    if quiet:
        level = logging.ERROR
    else:
        level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


@cli.command()
@common_options
@click.help_option('-h', '--help')
@_command
def scatter(**kwargs):  # pylint: disable=unused-argument
    """Compute the scattering data of a potential."""
    return {}


@cli.command()
@common_options
@click.option('--poles', help="Pole angles, e.g. 'pi/3,2pi/3'.")
@click.option('--couplings', help='Coupling moduli |c_k|, comma separated.')
@click.option('--centres', help='Soliton centres at t=0 (instead of the couplings), comma separated.')
@click.option('--t', 't_value', type=float, help='Time at which q is evaluated.')
@click.help_option('-h', '--help')
@_command
def synthesize(poles, couplings, centres, t_value, **kwargs):  # pylint: disable=unused-argument
    """Evaluate an exact N-soliton on the grid."""
    return {
        'synthesis.poles': poles,
        'synthesis.couplings': couplings,
        'synthesis.centres': centres,
        'synthesis.t': t_value,
    }


@cli.command()
@common_options
@click.option('--t-final', type=float, help='Final time.')
@click.option('--snapshot-every', type=float, help='Time between two snapshots.')
@click.help_option('-h', '--help')
@_command
def evolve(t_final, snapshot_every, **kwargs):  # pylint: disable=unused-argument
    """Evolve a potential with the split-step solver."""
    return {'evolution.t_final': t_final, 'evolution.snapshot_every': snapshot_every}


@cli.command()
@common_options
@click.option('--t', 't_value', type=float, help='Time of the prediction.')
@click.option('--xi-max', type=float, help='Largest |x / 2t| sampled.')
@click.option('--n-x', type=int, help='Number of sampled positions.')
@click.help_option('-h', '--help')
@_command
def predict(t_value, xi_max, n_x, **kwargs):  # pylint: disable=unused-argument
    """Evaluate the long-time asymptotic predictor of a potential."""
    return {'asymptotics.t': t_value, 'asymptotics.xi_max': xi_max, 'asymptotics.n_x': n_x}


@cli.command()
@click.argument('name', type=click.Choice(['theorem1', 'theorem2', 'appendixC', 'coeffevo', 'phaseregions']))
@common_options
@click.option('--eps', help='Perturbation sizes, comma separated.')
@click.option('--t-list', help='Times of the long-time comparison, comma separated.')
@click.option('--xi-list', help='Rays x / 2t, comma separated.')
@click.option('--t-final', type=float, help='Evolution time of the coeffevo experiment.')
@click.option('--seed', type=int, help='Seed of the random sampling.')
@click.option('--samples', type=int, help='Number of random samples.')
@click.option('--sign', type=click.Choice(['1', '-1']), help='Zero near +1 or -1 (appendixC).')
@click.option('--perturbation', help='Builtin perturbation name (e.g. gaussian, compact-bump).')
@click.option('--perturbation-param', multiple=True, help='Perturbation parameter KEY=VALUE.')
@click.help_option('-h', '--help')
@_command
def experiment(name, eps, t_list, xi_list, t_final, seed, samples, sign, perturbation, perturbation_param, **kwargs):  # pylint: disable=too-many-arguments,unused-argument
    """Run one of the verification experiments."""
    overrides = {
        'experiment.name': name,
        'experiment.eps': parse_real_list(eps) if eps else None,
        'experiment.t_list': parse_real_list(t_list) if t_list else None,
        'experiment.xi_list': parse_real_list(xi_list) if xi_list else None,
        'evolution.t_final': t_final,
        'experiment.seed': seed,
        'experiment.samples': samples,
        'experiment.sign': int(sign) if sign else None,
    }
    params = _parse_params(perturbation_param)
    if perturbation or params:
        overrides['experiment.perturbation'] = {'name': perturbation or 'gaussian', 'params': params}
    return overrides


def _open_folder(config, overwrite):
    """Return the initialised :py:class:`RunFolder` of the run, or None if no output directory was given."""
    if config['out'] is None:
        return None
    folder = RunFolder(config['out'])
    folder.init_folder(clear=overwrite, command=config.command, config=config.to_dict())
    return folder


def _field_columns(x, values):
    return [x, values.real, values.imag, np.abs(values)**2]


def run_scatter(config, folder):
    """Forward scattering: coefficients on the spectral grid, zeros and norming constants."""
    q = config.potential.sample(config.spatial_grid)
    data = compute_scattering_data(q, grid=config.spectral_grid, n_scan=config['spectral']['n_scan'])
    coefficients = data.coefficients
    click.echo('Found {} zero(s) of a on the circle'.format(data.discrete.size))
    for theta, coupling in zip(data.discrete.thetas, data.discrete.couplings):
        click.echo('- theta = {:.12f}, c = {:.10g}'.format(theta, coupling))
    click.echo('Unitarity defect: {:.3e}'.format(coefficients.unitarity_defect()))
    click.echo('Theta-condition residual: {:.3e}'.format(theta_condition_residual(data)))
    if folder is not None:
        folder.add_json('scattering.json', data.to_dict())
        folder.add_csv(
            'coefficients.csv', ('z', 'a_re', 'a_im', 'b_re', 'b_im', 'r_re', 'r_im'), [
                coefficients.z, coefficients.a_values.real, coefficients.a_values.imag, coefficients.b_values.real,
                coefficients.b_values.imag, coefficients.r_values.real, coefficients.r_values.imag
            ]
        )
    return 0


def _synthesis_spec(config):
    """Return the :py:class:`SolitonSpec` of the synthesis section (or of a soliton potential)."""
    synthesis = config['synthesis']
    if synthesis['poles'] is None:
        return config.potential.soliton_spec()
    if synthesis['couplings'] is not None:
        return SolitonSpec.from_thetas(synthesis['poles'], abs_couplings=synthesis['couplings'])
    centres = synthesis['centres'] if synthesis['centres'] is not None else [0.] * len(synthesis['poles'])
    return SolitonSpec.from_thetas(synthesis['poles'], centres=centres)


def run_synthesize(config, folder):
    """Evaluate an exact N-soliton on the grid."""
    try:
        spec = _synthesis_spec(config)
    except ValueError as exc:
        raise ConfigurationError(str(exc))
    grid = config.spatial_grid
    t = config['synthesis']['t']
    values = nsoliton_eval(spec, grid.x, t)
    click.echo('Synthesized a {}-soliton at t={} (q(-L) = {:.6f})'.format(spec.size, t, values[0]))
    if folder is not None:
        folder.add_csv('q.csv', ('x', 'q_re', 'q_im', 'abs2'), _field_columns(grid.x, values))
    return 0


def run_evolve(config, folder):
    """Evolve the potential, writing snapshots and the mass trace."""
    q0 = config.potential.sample(config.spatial_grid)
    settings = config['evolution']
    evolution = Evolution(q0, dt=settings['dt'], boundary_tolerance=settings['boundary_tolerance'])

    def write_snapshot(index, t, field):  # pylint: disable=unused-argument
        if folder is not None:
            folder.add_csv('snapshot_{}.csv'.format(index), ('x', 'q_re', 'q_im', 'abs2'),
                           _field_columns(field.grid.x, field.values))

    field = evolution.advance_to(settings['t_final'], snapshot_every=settings['snapshot_every'],
                                 on_snapshot=write_snapshot)
    if not settings['snapshot_every']:
        write_snapshot(0, evolution.t, field)
    click.echo('Evolved to t={} (relative mass drift {:.3e}, energy {:.10g})'.format(
        evolution.t, evolution.relative_mass_drift(), energy(field)))
    if folder is not None:
        trace = evolution.mass_trace
        folder.add_csv('mass.csv', ('t', 'mass'), [[sample.t for sample in trace], [sample.mass for sample in trace]])
    return 0


def _region_representatives(poles, xi_max):
    """Return one xi per region of the partition in [-xi_max, xi_max], plus the critical lines."""
    real_parts = np.sort(np.real(poles))
    inside = real_parts[np.abs(real_parts) < xi_max]
    edges = np.concatenate([[-xi_max], inside, [xi_max]])
    return np.sort(np.concatenate([(edges[:-1] + edges[1:]) / 2., inside]))


def run_predict(config, folder):
    """Evaluate both forms of the asymptotic predictor at a fixed time."""
    q = config.potential.sample(config.spatial_grid)
    data = compute_scattering_data(q, grid=config.spectral_grid, n_scan=config['spectral']['n_scan'])
    settings = config['asymptotics']
    predictor = AsymptoticPredictor(data, rho=settings['rho'])
    t, xi_max = settings['t'], settings['xi_max']
    x = np.linspace(-2. * xi_max * t, 2. * xi_max * t, settings['n_x'])
    soliton_form, regional_form = predictor.predict_field(x, t)
    click.echo('Predicted q at t={} on {} positions ({} soliton(s), rho={:.4g})'.format(
        t, len(x), data.discrete.size, predictor.rho))
    click.echo('Max gap between the two predictor forms: {:.3e}'.format(np.max(np.abs(soliton_form - regional_form))))
    if folder is not None:
        folder.add_csv(
            'prediction.csv', ('x', 'xi', 'q_re', 'q_im', 'regional_re', 'regional_im'),
            [x, x / (2. * t), soliton_form.real, soliton_form.imag, regional_form.real, regional_form.imag]
        )
        regions = [predictor.partition_and_phase(xi).to_dict() for xi in _region_representatives(data.discrete.poles,
                                                                                                  xi_max)]
        folder.add_json('asymptotics.json', {'schema_version': 1, 't': t, 'regions': regions})
    return 0


def _run_experiment_report(config):
    """Dispatch the experiment of the configuration and return its report."""
    settings = config['experiment']
    name = settings['name']
    if name is None:
        raise ConfigurationError('No experiment name given')
    grid = config.spatial_grid
    eps_list = config.eps_list
    if name == 'phaseregions':
        xi_list = settings['xi_list'] or (0., 0.25, 0.5, 0.75)
        return phase_regions_check(xi_list, count=settings['samples'], seed=settings['seed'])

    perturbation = config.perturbation.sample(grid)
    if name == 'theorem2':
        return verify_theorem2(config.potential.soliton_spec(), perturbation, eps_list,
                               n_scan=config['spectral']['n_scan'])
    if name == 'appendixC':
        return appendixC_zero(perturbation, eps_list, sign=settings['sign'])

    if not eps_list:
        raise ConfigurationError("Experiment '{}' needs one perturbation size".format(name))
    q0 = config.potential.sample(grid).perturbed(perturbation, eps_list[0])
    if name == 'theorem1':
        return verify_theorem1(q0, xi_list=settings['xi_list'], t_list=settings['t_list'],
                               dt=config['evolution']['dt'], spectral_grid=config.spectral_grid,
                               rho=config['asymptotics']['rho'])
    return coeffevo_check(q0, config['evolution']['t_final'], dt=config['evolution']['dt'],
                          spectral_grid=config.spectral_grid)


def run_experiment(config, folder):
    """Run an experiment; return 0 if it passes and 1 otherwise."""
    report = _run_experiment_report(config)
    click.echo('Experiment {}: {} (fitted slope {:.4g}, {:.1f} s)'.format(
        report.name, 'PASS' if report.passed else 'FAIL', report.fitted_slope, report.runtime))
    for row in report.table:
        click.echo('  ' + ', '.join('{}={}'.format(column, value) for column, value in zip(report.columns, row)))
    if folder is not None:
        folder.add_json('report.json', report.to_dict())
        folder.add_csv('table.csv', report.columns, [list(column) for column in zip(*report.table)]
                       if report.table else [[] for _ in report.columns])
    return 0 if report.passed else EXIT_FAILED


PIPELINES = {
    'scatter': run_scatter,
    'synthesize': run_synthesize,
    'evolve': run_evolve,
    'predict': run_predict,
    'experiment': run_experiment,
}


def run(config, overwrite=False):
    """Execute the pipeline of a validated configuration and return the exit status.

    :param config: a :py:class:`~dark_soliton_lab.config.RunConfig` with a command
    :param overwrite: clear the output directory if it is not empty
    """
    if config.command not in PIPELINES:
        raise ConfigurationError('No command to run (got {!r})'.format(config.command))
    start = time.time()
    folder = _open_folder(config, overwrite)
    try:
        status = PIPELINES[config.command](config, folder)
        if folder is not None:
            folder.update_manifest(runtime=time.time() - start, status=status)
    finally:
        if folder is not None:
            folder.close()
    LOGGER.info('%s finished with status %d in %.2f s', config.command, status, time.time() - start)
    return status


def main():
    """Entry point of the console script."""
    cli()  # pylint: disable=no-value-for-parameter

