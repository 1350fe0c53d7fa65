"""
Brute-force reference counter.

Plain string slicing over each ambiguity-free run; used by ``verify`` and the
test-suite to check the partitioned pipeline.
"""

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .sequence_io import SequenceRecord, fragment

_COMPLEMENT = str.maketrans("ACGT", "TGCA")


def reverse_complement_text(kmer: str) -> str:
    return kmer.translate(_COMPLEMENT)[::-1]


def oracle_counts(
    records: Iterable[SequenceRecord], k: int, canonical: bool = True
) -> Counter:
    """k-mer -> count over every ACGT-only window of the records."""
    counts: Counter = Counter()
    for record in records:
        for frag in fragment(record, k):
            text = frag.bases.decode("ascii")
            for i in range(len(text) - k + 1):
                kmer = text[i : i + k]
                if canonical:
                    kmer = min(kmer, reverse_complement_text(kmer))
                counts[kmer] += 1
    return counts


@dataclass(frozen=True)
class Divergence:
    kmer: str
    observed: int
    expected: int

    def __str__(self) -> str:
        return f"{self.kmer}: observed {self.observed}, expected {self.expected}"


def first_divergence(
    observed: Mapping[str, int], expected: Mapping[str, int]
) -> Optional[Divergence]:
    """Lexicographically first k-mer whose counts differ, or None."""
    for kmer in sorted(set(observed) | set(expected)):
        seen = observed.get(kmer, 0)
        want = expected.get(kmer, 0)
        if seen != want:
            return Divergence(kmer, seen, want)
    return None
