"""
Pytest configuration and fixtures.
"""

from pathlib import Path

import numpy as np
import pytest

from src.config import RunConfig
from src.sequence_io import SequenceRecord, write_fasta
from src.synthetic import synthetic_records


@pytest.fixture
def rng():
    """Seeded numpy generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def small_records():
    """Forty short reads with a few N and lowercase bases."""
    return synthetic_records(40, mean_length=120, seed=7, n_rate=0.01, lower_rate=0.02)


@pytest.fixture
def write_fasta_file(tmp_path):
    """Factory writing records to a FASTA file under tmp_path."""

    def _write(records, name="reads.fa"):
        path = tmp_path / name
        with open(path, "wb") as f:
            write_fasta(records, f)
        return str(path)

    return _write


@pytest.fixture
def small_fasta(small_records, write_fasta_file):
    """Path of a FASTA file holding small_records."""
    return write_fasta_file(small_records)


@pytest.fixture
def tiny_fasta(tmp_path):
    """Two hand-written records."""
    path = tmp_path / "tiny.fa"
    path.write_bytes(b">a\nACGTACGTTGCAACGTAGGCT\n>b desc\nttgcaNNACGTACGATCGATCGGA\n")
    return str(path)


@pytest.fixture
def run_config(tmp_path):
    """Factory for a small, fully sampled RunConfig."""

    def _config(**overrides):
        values = dict(k=11, m=5, partitions=4, workers=2, sample_fraction=1.0, spill_dir=None)
        values.update(overrides)
        return RunConfig(**values)

    return _config


@pytest.fixture
def out_dir(tmp_path) -> Path:
    """Output directory for pipeline runs."""
    return tmp_path / "out"


@pytest.fixture
def record():
    """Factory for a single SequenceRecord."""

    def _record(bases, record_id="r"):
        return SequenceRecord(record_id, bases.encode("ascii") if isinstance(bases, str) else bases)

    return _record
