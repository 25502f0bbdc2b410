"""Tests of the command-line front end."""
import json
import os

from click.testing import CliRunner
import pytest

from dark_soliton_lab import __version__, cli as cli_module
from dark_soliton_lab.cli import cli
from dark_soliton_lab.experiments import ExperimentReport
from dark_soliton_lab.runfolder import RunFolder

SMALL_GRID = ['--grid-L', '20', '--grid-n', '512']


def invoke(*args):
    """Run the command line and return the click result."""
    runner = CliRunner()
    return runner.invoke(cli, [str(arg) for arg in args])


def read_csv_header(path):
    """Return the header fields and the number of data lines of a CSV file."""
    with open(path) as fhandle:
        lines = fhandle.read().splitlines()
    return lines[0].split(','), len(lines) - 1


def test_version():
    """The version option prints the package version."""
    result = invoke('--version')
    assert result.exit_code == 0
    assert __version__ in result.output


def test_help():
    """Every command has a help page."""
    for command in ['scatter', 'synthesize', 'evolve', 'predict', 'experiment']:
        result = invoke(command, '-h')
        assert result.exit_code == 0, result.output
        assert '--config' in result.output


def test_synthesize(temp_dir):
    """The synthesized 2-soliton is written with its manifest."""
    out = os.path.join(temp_dir, 'run')
    result = invoke('synthesize', '--poles', 'pi/3,2pi/3', '--centres', '-3,3', '--out', out, *SMALL_GRID)
    assert result.exit_code == 0, result.output
    assert 'Synthesized a 2-soliton' in result.output

    header, rows = read_csv_header(os.path.join(out, 'q.csv'))
    assert header == ['x', 'q_re', 'q_im', 'abs2']
    assert rows == 512

    with RunFolder(out) as folder:
        manifest = folder.get_manifest()
        assert manifest['command'] == 'synthesize'
        assert manifest['status'] == 0
        assert manifest['config']['synthesis']['centres'] == [-3., 3.]
        assert manifest['versions']['dark_soliton_lab'] == __version__
        assert [artifact[0] for artifact in folder.list_artifacts()] == ['q.csv']


def test_scatter(temp_dir):
    """The black soliton has a single zero at z = i."""
    out = os.path.join(temp_dir, 'run')
    result = invoke('scatter', '--out', out, '--z-nodes', 4, *SMALL_GRID)
    assert result.exit_code == 0, result.output
    assert 'Found 1 zero(s)' in result.output

    with open(os.path.join(out, 'scattering.json')) as fhandle:
        data = json.load(fhandle)
    assert data['schema_version'] == 1
    header, rows = read_csv_header(os.path.join(out, 'coefficients.csv'))
    assert header == ['z', 'a_re', 'a_im', 'b_re', 'b_im', 'r_re', 'r_im']
    assert rows == 16


def test_predict(temp_dir):
    """The prediction of a pure soliton is written for both forms."""
    out = os.path.join(temp_dir, 'run')
    result = invoke('predict', '--out', out, '--z-nodes', 4, '--t', 5, '--n-x', 11, *SMALL_GRID)
    assert result.exit_code == 0, result.output

    header, rows = read_csv_header(os.path.join(out, 'prediction.csv'))
    assert header == ['x', 'xi', 'q_re', 'q_im', 'regional_re', 'regional_im']
    assert rows == 11
    with open(os.path.join(out, 'asymptotics.json')) as fhandle:
        data = json.load(fhandle)
    assert data['t'] == 5.
    assert data['regions']


def test_evolve(temp_dir):
    """Snapshots and the mass trace are written."""
    out = os.path.join(temp_dir, 'run')
    result = invoke(
        'evolve', '--out', out, '--t-final', 0.1, '--snapshot-every', 0.05, '--dt', 5e-3, '--potential',
        'tanh+gaussian', '--param', 'A=0.1', *SMALL_GRID
    )
    assert result.exit_code == 0, result.output
    assert os.path.exists(os.path.join(out, 'snapshot_0.csv'))
    assert os.path.exists(os.path.join(out, 'snapshot_1.csv'))
    header, rows = read_csv_header(os.path.join(out, 'mass.csv'))
    assert header == ['t', 'mass']
    assert rows == 3


def test_phaseregions(temp_dir):
    """The phase-region experiment passes and writes its report."""
    out = os.path.join(temp_dir, 'run')
    result = invoke('experiment', 'phaseregions', '--samples', 100, '--xi-list', '0,0.5', '--out', out)
    assert result.exit_code == 0, result.output
    assert 'PASS' in result.output

    with open(os.path.join(out, 'report.json')) as fhandle:
        report = json.load(fhandle)
    assert report['name'] == 'phaseregions'
    assert report['pass'] is True
    assert report['fitted_slope'] is None
    header, rows = read_csv_header(os.path.join(out, 'table.csv'))
    assert header == report['columns']
    assert rows == 2


def test_failed_experiment(monkeypatch):
    """A failing experiment exits with status 1."""

    def failing_check(xi_list, count, seed):  # pylint: disable=unused-argument
        return ExperimentReport('phaseregions', ('xi', 'violations'), [(0., 3)], None, False, 0.)

    monkeypatch.setattr(cli_module, 'phase_regions_check', failing_check)
    result = invoke('experiment', 'phaseregions')
    assert result.exit_code == 1
    assert 'FAIL' in result.output


def test_config_file(temp_dir):
    """Flags take precedence over the configuration file."""
    config_path = os.path.join(temp_dir, 'config.json')
    with open(config_path, 'w') as fhandle:
        json.dump({'grid': {'L': 20., 'n': 256}, 'synthesis': {'poles': 'pi/2', 'couplings': [2.]}}, fhandle)
    out = os.path.join(temp_dir, 'run')
    result = invoke('synthesize', '--config', config_path, '--grid-n', 512, '--out', out)
    assert result.exit_code == 0, result.output
    _, rows = read_csv_header(os.path.join(out, 'q.csv'))
    assert rows == 512


@pytest.mark.parametrize(
    'args', [
        ['scatter', '--potential', 'square'],
        ['scatter', '--grid-n', 1000],
        ['scatter', '--config', 'missing-config.json'],
        ['synthesize', '--poles', 'pi/3', '--couplings', '1', '--centres', '0'],
        ['synthesize', '--poles', '4', '--centres', '0'],
        ['evolve', '--dt', 0.1],
        ['evolve', '--param', 'A'],
        ['predict', '--xi-max', 1.5],
        ['experiment', 'phaseregions', '--xi-list', '0,2'],
        ['experiment', 'theorem3'],
    ]
)
def test_configuration_errors(args):
    """Invalid options exit with status 2."""
    result = invoke(*args)
    assert result.exit_code == 2, result.output


def test_existing_output(temp_dir):
    """A non-empty output directory is only reused with --overwrite."""
    out = os.path.join(temp_dir, 'run')
    os.makedirs(out)
    with open(os.path.join(out, 'other.txt'), 'w') as fhandle:
        fhandle.write('something')

    result = invoke('synthesize', '--out', out, *SMALL_GRID)
    assert result.exit_code == 2
    assert os.path.exists(os.path.join(out, 'other.txt'))

    result = invoke('synthesize', '--out', out, '--overwrite', *SMALL_GRID)
    assert result.exit_code == 0, result.output
    assert not os.path.exists(os.path.join(out, 'other.txt'))
    assert os.path.exists(os.path.join(out, 'q.csv'))


def test_boundary_leak():
    """A datum that does not match the background at the ends of the box exits with status 3."""
    result = invoke('evolve', '--potential', 'tanh+gaussian', '--param', 'A=0.5', '--param', 'x0=19', *SMALL_GRID)
    assert result.exit_code == 3
    assert 'BoundaryLeakError' in result.output
