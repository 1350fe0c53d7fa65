"""
Partitioning Module for the superkmer counter.

This module handles:
- Signature -> bin mapping (hashed bins, or one bin per signature)
- Bin -> partition mapping (hash modulo p, or an LPT schedule)
- Sampled bin-size estimation feeding the LPT scheduler
- A brute-force optimal scheduler used to check the LPT bound
"""

import heapq
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Union

from .exceptions import ContractError, SamplingError
from .logger import get_logger
from .sequence_io import SequenceRecord, fragment
from .signature_engine import Signature, extract_superkmers

logger = get_logger(__name__)

BinId = int

GRANULARITIES = ("signature", "bin")
DEFAULT_BINS = 8192
MAX_BRUTEFORCE_JOBS = 12

MASK64 = (1 << 64) - 1


def mix64(x: int) -> int:
    """Fixed 64-bit shift/multiply finalizer."""
    x &= MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & MASK64
    x ^= x >> 31
    return x


def bin_of(signature: Signature, bins: int) -> BinId:
    """Hashed bin of a signature in [0, bins)."""
    if bins < 1:
        raise ContractError(f"number of bins must be >= 1, got {bins}")
    return mix64(signature.value) % bins


def signature_bin(signature: Signature) -> BinId:
    """One bin per signature: the signature's numeric encoding."""
    return signature.value


def default_partition(bin_id: BinId, p: int) -> int:
    """Hash-partitioner fallback: bin modulo p."""
    if p < 1:
        raise ContractError(f"partition count must be >= 1, got {p}")
    return bin_id % p


@dataclass(frozen=True)
class Binner:
    """Signature -> BinId for one granularity mode."""

    granularity: str = "signature"
    bins: int = DEFAULT_BINS

    def __post_init__(self):
        if self.granularity not in GRANULARITIES:
            raise ContractError(f"unknown granularity {self.granularity!r}")
        if self.granularity == "bin" and self.bins < 1:
            raise ContractError(f"number of bins must be >= 1, got {self.bins}")

    def __call__(self, signature: Signature) -> BinId:
        if self.granularity == "signature":
            return signature_bin(signature)
        return bin_of(signature, self.bins)


@dataclass
class SizeEstimate:
    """Estimated k-mer count per bin, scaled up from a sample."""

    sizes: Dict[BinId, float]
    sample_fraction: float
    sampled_records: int = 0
    sampled_kmers: int = 0

    @property
    def total(self) -> float:
        return sum(self.sizes.values())


def _sampled(ordinal: int, fraction: float, seed: int) -> bool:
    if fraction >= 1.0:
        return True
    return mix64(mix64(seed) ^ ordinal) < fraction * 2.0**64


def estimate_bin_sizes(
    records: Iterable[SequenceRecord],
    fraction: float,
    k: int,
    m: int,
    binner: Binner,
    seed: int = 0,
) -> SizeEstimate:
    """
    Estimate per-bin k-mer counts from a record-level sample.

    A record is kept when a seeded hash of its ordinal falls under
    ``fraction``, so the sample does not depend on how the input is sharded.

    Raises:
        SamplingError: If no k-mer falls into the sample
    """
    if not 0.0 < fraction <= 1.0:
        raise ContractError(f"sample fraction must be in (0, 1], got {fraction}")

    counts: Dict[BinId, int] = {}
    n_records = n_kmers = 0
    for ordinal, record in enumerate(records):
        if not _sampled(ordinal, fraction, seed):
            continue
        n_records += 1
        for frag in fragment(record, k):
            for superkmer in extract_superkmers(frag, k, m):
                bin_id = binner(superkmer.signature)
                counts[bin_id] = counts.get(bin_id, 0) + superkmer.kmer_count
                n_kmers += superkmer.kmer_count

    if n_kmers == 0:
        raise SamplingError(
            f"sample of {n_records} records at fraction {fraction} holds no {k}-mers; "
            "raise --sample-fraction"
        )

    logger.info(
        f"Sampled {n_records} records, {n_kmers} k-mers over {len(counts)} bins "
        f"(fraction {fraction})"
    )
    scale = 1.0 / fraction
    return SizeEstimate(
        {bin_id: count * scale for bin_id, count in counts.items()},
        fraction,
        n_records,
        n_kmers,
    )


@dataclass
class PartitionMap:
    """Bin -> partition schedule; unscheduled bins fall back to bin mod p."""

    assignment: Dict[BinId, int]
    p: int
    loads: List[float] = field(default_factory=list)
    sizes: Dict[BinId, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.p < 1:
            raise ContractError(f"partition count must be >= 1, got {self.p}")
        if not self.loads:
            self.loads = [0.0] * self.p

    @classmethod
    def hash_only(cls, p: int) -> "PartitionMap":
        """Empty schedule: every lookup takes the default hash path."""
        return cls({}, p)

    @property
    def makespan(self) -> float:
        return max(self.loads) if self.loads else 0.0

    def covers(self, bin_id: BinId) -> bool:
        return bin_id in self.assignment

    def dump(self, path: Union[str, Path]) -> None:
        """Write one ``bin TAB partition TAB est_size`` line per scheduled bin."""
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"# p={self.p}\n")
            for bin_id in sorted(self.assignment):
                f.write(f"{bin_id}\t{self.assignment[bin_id]}\t{self.sizes.get(bin_id, 0.0):g}\n")

    @classmethod
    def load(cls, path: Union[str, Path], p: Optional[int] = None) -> "PartitionMap":
        assignment: Dict[BinId, int] = {}
        sizes: Dict[BinId, float] = {}
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    if line.startswith("# p=") and p is None:
                        p = int(line[4:])
                    continue
                bin_text, part_text, size_text = line.split("\t")
                assignment[int(bin_text)] = int(part_text)
                sizes[int(bin_text)] = float(size_text)
        if p is None:
            p = max(assignment.values(), default=0) + 1
        loads = [0.0] * p
        for bin_id, part in assignment.items():
            loads[part] += sizes[bin_id]
        return cls(assignment, p, loads, sizes)


def lookup_partition(pmap: PartitionMap, bin_id: BinId) -> int:
    """Scheduled partition of a bin, else ``default_partition(bin, p)``."""
    part = pmap.assignment.get(bin_id)
    if part is None:
        return default_partition(bin_id, pmap.p)
    return part


def lpt_schedule(sizes: Union[SizeEstimate, Mapping[BinId, float]], p: int) -> PartitionMap:
    """
    Longest Processing Time schedule of bins onto p partitions.

    Bins are taken by size descending (ties by bin id); each goes to the
    currently least-loaded partition (ties by partition id).
    """
    if p < 1:
        raise ContractError(f"partition count must be >= 1, got {p}")
    table = sizes.sizes if isinstance(sizes, SizeEstimate) else dict(sizes)
    if not table:
        raise ContractError("LPT needs at least one bin")

    heap = [(0.0, part) for part in range(p)]
    loads = [0.0] * p
    assignment: Dict[BinId, int] = {}
    for bin_id in sorted(table, key=lambda b: (-table[b], b)):
        load, part = heapq.heappop(heap)
        assignment[bin_id] = part
        load += table[bin_id]
        loads[part] = load
        heapq.heappush(heap, (load, part))

    logger.debug(f"LPT scheduled {len(assignment)} bins on {p} partitions, makespan {max(loads):g}")
    return PartitionMap(assignment, p, loads, dict(table))


def lpt_bound(p: int) -> float:
    """Worst-case LPT / optimum makespan ratio on p machines."""
    return 4.0 / 3.0 - 1.0 / (3.0 * p)


def optimal_schedule_bruteforce(sizes: Sequence[float], p: int) -> float:
    """
    Exact minimum makespan by exhaustive assignment.

    Jobs are placed largest first; machines with equal current load are
    interchangeable, so only the first of them is tried.

    Raises:
        ContractError: If more than 12 jobs are given
    """
    if len(sizes) > MAX_BRUTEFORCE_JOBS:
        raise ContractError(f"brute-force scheduling limited to {MAX_BRUTEFORCE_JOBS} jobs")
    if p < 1:
        raise ContractError(f"partition count must be >= 1, got {p}")
    jobs = sorted(sizes, reverse=True)
    if not jobs:
        return 0.0

    lower = max(max(jobs), sum(jobs) / p)
    loads = [0.0] * p
    best = [float(sum(jobs))]

    def place(i: int) -> None:
        if i == len(jobs):
            best[0] = min(best[0], max(loads))
            return
        tried = set()
        for machine in range(p):
            load = loads[machine]
            if load in tried or load + jobs[i] >= best[0]:
                continue
            tried.add(load)
            loads[machine] = load + jobs[i]
            place(i + 1)
            loads[machine] = load
            if best[0] <= lower:
                return

    place(0)
    return best[0]


def partition_loads(
    sizes: Mapping[BinId, float], p: int, assign: Callable[[BinId], int]
) -> List[float]:
    """Per-partition load of a bin-size table under any bin -> partition rule."""
    loads = [0.0] * p
    for bin_id, size in sizes.items():
        loads[assign(bin_id)] += size
    return loads
