"""
Synthetic workloads for tests and the benchmark harness.

This module handles:
- Random DNA with optional ambiguous and soft-masked bases
- Synthetic FASTA files of a target size
- Zipf-ranked and uniform bin-size tables
"""

from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from .sequence_io import SequenceRecord, write_fasta

_ALPHABET = np.frombuffer(b"ACGT", dtype=np.uint8)


def random_dna(
    length: int,
    rng: np.random.Generator,
    n_rate: float = 0.0,
    lower_rate: float = 0.0,
) -> bytes:
    """Uniform random ACGT, with a fraction of N and of lowercase symbols."""
    seq = _ALPHABET[rng.integers(0, 4, size=length)]
    if n_rate > 0:
        seq[rng.random(length) < n_rate] = ord("N")
    if lower_rate > 0:
        lower = rng.random(length) < lower_rate
        seq[lower] = seq[lower] + 32
    return seq.tobytes()


def synthetic_records(
    n: int,
    mean_length: int = 150,
    seed: int = 0,
    n_rate: float = 0.0,
    lower_rate: float = 0.0,
) -> List[SequenceRecord]:
    """``n`` records with lengths drawn around ``mean_length``."""
    rng = np.random.default_rng(seed)
    lengths = rng.integers(max(1, mean_length // 2), mean_length * 3 // 2 + 1, size=n)
    return [
        SequenceRecord(f"r{i}", random_dna(int(length), rng, n_rate, lower_rate))
        for i, length in enumerate(lengths)
    ]


def write_synthetic_fasta(
    path: Union[str, Path],
    target_bytes: int,
    seed: int = 0,
    read_length: int = 150,
    n_rate: float = 0.001,
) -> int:
    """Write fixed-length reads until roughly ``target_bytes`` of bases; returns records."""
    rng = np.random.default_rng(seed)
    n = max(1, target_bytes // read_length)
    written = 0
    with open(path, "wb") as f:
        batch = 10_000
        for start in range(0, n, batch):
            records = [
                SequenceRecord(f"s{i}", random_dna(read_length, rng, n_rate))
                for i in range(start, min(n, start + batch))
            ]
            written += write_fasta(records, f)
    return written


def zipf_bin_sizes(
    n_bins: int,
    exponent: float = 1.0,
    total: float = 1e7,
    seed: Optional[int] = 0,
) -> Dict[int, float]:
    """
    Bin sizes proportional to rank^-exponent, summing to ``total``.

    Ranks are dealt to bin ids through a seeded permutation so that large
    bins are not aligned with any modulus.
    """
    ranks = np.arange(1, n_bins + 1, dtype=float)
    weights = ranks ** (-exponent)
    sizes = np.floor(total * weights / weights.sum())
    sizes[sizes < 1] = 1
    bin_ids = np.random.default_rng(seed).permutation(n_bins)
    return {int(b): float(s) for b, s in zip(bin_ids, sizes)}


def uniform_bin_sizes(n_bins: int, size: float = 1000.0) -> Dict[int, float]:
    return {b: float(size) for b in range(n_bins)}
