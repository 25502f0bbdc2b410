"""Test of the run folder: manifest, artifact index and data files."""
import hashlib
import json
import os

import pytest

from dark_soliton_lab import __version__
from dark_soliton_lab.runfolder import RunFolder


@pytest.fixture(scope='function')
def run_folder(temp_dir):
    """Return an initialised run folder, closed at the end of the test."""
    folder = RunFolder(os.path.join(temp_dir, 'run'))
    folder.init_folder(command='scatter', config={'grid': {'L': 40., 'n': 2048}})
    yield folder
    folder.close()


def test_init_folder(temp_dir):
    """Initialising creates the manifest, the index and the sandbox."""
    path = os.path.join(temp_dir, 'run')
    folder = RunFolder(path)
    assert not folder.is_initialised
    folder.init_folder(command='evolve', config={'dt': 0.002})
    assert folder.is_initialised
    assert folder.get_folder() == os.path.realpath(path)
    assert sorted(os.listdir(path)) == ['manifest.json', 'runs.idx', 'sandbox']

    manifest = folder.get_manifest()
    assert manifest['manifest_version'] == 1
    assert manifest['command'] == 'evolve'
    assert manifest['config'] == {'dt': 0.002}
    assert manifest['versions']['dark_soliton_lab'] == __version__
    assert set(manifest['versions']) == {'dark_soliton_lab', 'numpy', 'scipy', 'sqlalchemy'}
    assert folder.list_artifacts() == []
    folder.close()


def test_init_existing(temp_dir):
    """An initialised or non-empty folder is only reused with clear=True."""
    path = os.path.join(temp_dir, 'run')
    with RunFolder(path) as folder:
        folder.init_folder()
        folder.add_json('data.json', {'a': 1})
        with pytest.raises(FileExistsError):
            folder.init_folder()
        folder.init_folder(clear=True, command='predict')
        assert folder.list_artifacts() == []
        assert not os.path.exists(folder.get_artifact_path('data.json'))

    other = os.path.join(temp_dir, 'other')
    os.makedirs(other)
    with open(os.path.join(other, 'stray.txt'), 'w') as fhandle:
        fhandle.write('stray')
    with RunFolder(other) as folder:
        with pytest.raises(FileExistsError):
            folder.init_folder()
        assert not folder.is_initialised


def test_missing_index(temp_dir):
    """Listing the artifacts of a folder that was never initialised fails."""
    with RunFolder(os.path.join(temp_dir, 'missing')) as folder:
        with pytest.raises(FileNotFoundError):
            folder.list_artifacts()


def test_artifacts(run_folder):
    """Artifacts are written, indexed with their sha256, and rewritten in place."""
    hashkey = run_folder.add_csv('q.csv', ('x', 'q'), [[0., 1.], [2., 3.]])
    path = run_folder.get_artifact_path('q.csv')
    with open(path, 'rb') as fhandle:
        content = fhandle.read()
    assert content == b'x,q\n0,2\n1,3\n'
    assert hashkey == hashlib.sha256(content).hexdigest()
    assert run_folder.get_hashkey('q.csv') == hashkey

    json_hashkey = run_folder.add_json('report.json', {'pass': True})
    with open(run_folder.get_artifact_path('report.json')) as fhandle:
        assert json.load(fhandle) == {'pass': True}

    assert run_folder.list_artifacts() == [
        ('q.csv', hashkey, len(content), 'csv'),
        ('report.json', json_hashkey, os.path.getsize(run_folder.get_artifact_path('report.json')), 'json'),
    ]

    new_hashkey = run_folder.add_csv('q.csv', ('x', 'q'), [[0.], [5.]])
    assert new_hashkey != hashkey
    assert run_folder.get_hashkey('q.csv') == new_hashkey
    assert len(run_folder.list_artifacts()) == 2

    with pytest.raises(KeyError):
        run_folder.get_hashkey('missing.csv')


@pytest.mark.parametrize('name', ['manifest.json', 'runs.idx', 'sandbox', '../escape.csv', 'sub/q.csv'])
def test_invalid_artifact_name(run_folder, name):
    """Artifacts cannot replace the bookkeeping files or live outside the folder."""
    with pytest.raises(ValueError):
        run_folder.add_json(name, {})


def test_update_manifest(run_folder):
    """Extra entries are added without losing the configuration."""
    run_folder.update_manifest(runtime=1.5, status=0)
    manifest = run_folder.get_manifest()
    assert manifest['runtime'] == 1.5
    assert manifest['status'] == 0
    assert manifest['command'] == 'scatter'
    assert manifest['config'] == {'grid': {'L': 40., 'n': 2048}}


def test_reopen(run_folder):
    """A new instance on the same folder reads the existing index."""
    run_folder.add_json('a.json', [1, 2])
    run_folder.close()
    with RunFolder(run_folder.get_folder()) as folder:
        assert folder.is_initialised
        assert [artifact[0] for artifact in folder.list_artifacts()] == ['a.json']
