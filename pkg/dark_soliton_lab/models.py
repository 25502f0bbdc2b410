"""Models for the artifact index of a run folder (SQLite DB)."""
from sqlalchemy import Column, Integer, String

try:
    from sqlalchemy.orm import declarative_base
except ImportError:  # SQLAlchemy < 1.4
    from sqlalchemy.ext.declarative import declarative_base

Base = declarative_base()  # pylint: disable=invalid-name,useless-suppression


class Artifact(Base):  # pylint: disable=too-few-public-methods
    """The only table: one row per data file written in the run folder."""
    __tablename__ = 'db_artifact'

    id = Column(Integer, primary_key=True)  # pylint: disable=invalid-name

    # The run folder relies on the name being unique: rewriting an artifact updates its row
    name = Column(String, nullable=False, unique=True, index=True)
    hashkey = Column(String, nullable=False)
    size = Column(Integer, nullable=False)
    kind = Column(String, nullable=False)  # 'csv' or 'json'
