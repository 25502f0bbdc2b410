"""
The ``RunFolder`` class: the output directory of a run, with its manifest and an index of the data files written.
"""
import json
import os
import shutil

import numpy as np
import scipy
import sqlalchemy
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker

from .models import Artifact, Base
from .utils import csv_bytes, json_bytes, safe_write

MANIFEST_VERSION = 1


class RunFolder:
    """A folder holding the outputs of one run.

    Its layout is: ``manifest.json`` (configuration and versions), ``runs.idx`` (SQLite index of the data files
    with their sha256), a ``sandbox`` sub-folder for temporary files, and the data files themselves.
    """

    def __init__(self, folder):
        """Create the class that represents the run folder.

        :param folder: the path to the folder (created by :py:meth:`init_folder`)
        """
        self._folder = os.path.realpath(folder)
        self._session = None

    def get_folder(self):
        """Return the path of the run folder."""
        return self._folder

    def close(self):
        """Close the connection to the SQLite index."""
        if self._session is not None:
            self._session.close()
            self._session = None

    def __enter__(self):
        return self

    def __exit__(self, exc_type, value, traceback):
        self.close()

    def _get_sandbox_folder(self):
        """Return the folder where files are written before being moved into place."""
        return os.path.join(self._folder, 'sandbox')

    def _get_manifest_file(self):
        """Return the path of the manifest."""
        return os.path.join(self._folder, 'manifest.json')

    def _get_index_path(self):
        """Return the path of the SQLite index."""
        return os.path.join(self._folder, 'runs.idx')

    def get_artifact_path(self, name):
        """Return the full path of a data file of the run."""
        return os.path.join(self._folder, name)

    def _get_session(self, create=False):
        """Return a (cached) session to the SQLite index.

        :param create: if True, creates the sqlite file and schema
        :raise FileNotFoundError: if the index does not exist and ``create`` is False
        """
        if self._session is not None:
            return self._session
        if not create and not os.path.exists(self._get_index_path()):
            raise FileNotFoundError('The artifact index does not exist in {}'.format(self._folder))

        engine = create_engine('sqlite:///{}'.format(self._get_index_path()))
        if create:
            Base.metadata.create_all(engine)

        # autoflush off, so that pure queries do not lock the DB
        DBSession = sessionmaker(bind=engine, autoflush=False)  # pylint: disable=invalid-name
        self._session = DBSession()
        return self._session

    @property
    def is_initialised(self):
        """Return True if the folder contains a readable manifest, the index and the sandbox."""
        try:
            with open(self._get_manifest_file()) as fhandle:
                json.load(fhandle)
        except (ValueError, OSError):
            return False
        return os.path.exists(self._get_index_path()) and os.path.isdir(self._get_sandbox_folder())

    def init_folder(self, clear=False, command=None, config=None):
        """Initialise the run folder: write the manifest and create an empty index.

        :param clear: if True, delete everything in the folder first
        :param command: the name of the pipeline being run
        :param config: the fully resolved configuration (a JSON-serialisable dict)
        :raise FileExistsError: if the folder is not empty and ``clear`` is False
        """
        if clear:
            self.close()
            if os.path.exists(self._folder):
                shutil.rmtree(self._folder)

        if self.is_initialised:
            raise FileExistsError(
                'The run folder already exists, so you cannot initialise it - '
                'use the clear option if you want to overwrite it'
            )
        os.makedirs(self._folder, exist_ok=True)
        if os.listdir(self._folder):
            raise FileExistsError('There is already some file or folder in {}, I cannot initialise it!'.format(
                self._folder))

        os.makedirs(self._get_sandbox_folder())
        self.write_manifest(command=command, config=config)
        self._get_session(create=True)

    def write_manifest(self, command=None, config=None, **extra):
        """(Re)write the manifest with the configuration, the package versions and any extra entries."""
        from . import __version__  # pylint: disable=cyclic-import
        manifest = {
            'manifest_version': MANIFEST_VERSION,
            'command': command,
            'config': config,
            'versions': {
                'dark_soliton_lab': __version__,
                'numpy': np.__version__,
                'scipy': scipy.__version__,
                'sqlalchemy': sqlalchemy.__version__,
            },
        }
        manifest.update(extra)
        safe_write(self._get_manifest_file(), json_bytes(manifest), self._get_sandbox_folder())

    def get_manifest(self):
        """Return the content of the manifest."""
        with open(self._get_manifest_file()) as fhandle:
            return json.load(fhandle)

    def update_manifest(self, **extra):
        """Add or replace top-level entries of the manifest (e.g. the runtime)."""
        manifest = self.get_manifest()
        manifest.update(extra)
        safe_write(self._get_manifest_file(), json_bytes(manifest), self._get_sandbox_folder())

    def _add_artifact(self, name, content, kind):
        """Write a data file and register it in the index; return its hashkey."""
        if os.path.basename(name) != name or name in ('manifest.json', 'runs.idx', 'sandbox'):
            raise ValueError('Invalid artifact name: {}'.format(name))
        hashkey, size = safe_write(self.get_artifact_path(name), content, self._get_sandbox_folder())
        session = self._get_session()
        artifact = session.query(Artifact).filter(Artifact.name == name).one_or_none()
        if artifact is None:
            session.add(Artifact(name=name, hashkey=hashkey, size=size, kind=kind))
        else:
            artifact.hashkey, artifact.size, artifact.kind = hashkey, size, kind
        session.commit()
        return hashkey

    def add_csv(self, name, header, columns):
        """Write a CSV data file with the given header and columns; return its hashkey."""
        return self._add_artifact(name, csv_bytes(header, columns), 'csv')

    def add_json(self, name, obj):
        """Write a JSON data file (sorted keys); return its hashkey."""
        return self._add_artifact(name, json_bytes(obj), 'json')

    def list_artifacts(self):
        """Return a list of ``(name, hashkey, size, kind)`` tuples, sorted by name."""
        session = self._get_session()
        query = session.query(Artifact.name, Artifact.hashkey, Artifact.size, Artifact.kind).order_by(Artifact.name)
        return [tuple(row) for row in query]

    def get_hashkey(self, name):
        """Return the sha256 of an artifact.

        :raise KeyError: if no artifact with this name was written
        """
        session = self._get_session()
        artifact = session.query(Artifact).filter(Artifact.name == name).one_or_none()
        if artifact is None:
            raise KeyError('No artifact named {}'.format(name))
        return artifact.hashkey
