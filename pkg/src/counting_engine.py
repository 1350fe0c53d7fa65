"""
Partitioned exact counting (stage 2).

Superkmers of one partition are expanded into k-mers and tallied in an
open-addressing table; because every occurrence of a canonical k-mer lands in
the same partition, no cross-partition merge is needed.
"""

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator, List, Optional, Tuple, Union

from .exceptions import ContractError, CountingMemoryError, OutputError
from .kmer_codec import SYMBOLS_PER_WORD, PackedSeq, mask, text_of, to_codes
from .logger import get_logger
from .partitioning import MASK64, mix64
from .signature_engine import SuperkmerRecord

logger = get_logger(__name__)

OUTPUT_FORMATS = ("tsv", "bin")
FORMAT_SUFFIX = {"tsv": ".tsv", "bin": ".kbin"}
BINARY_MAGIC = b"SKCB"
_HEADER = struct.Struct("<4sII")


def _slot_hash(key: int) -> int:
    h = 0
    while True:
        h = mix64(h ^ (key & MASK64))
        key >>= 64
        if not key:
            return h


class CountTable:
    """
    Open-addressing k-mer -> count map.

    Linear probing over a power-of-two slot array that doubles once the load
    factor would exceed ``max_load``. Keys are integer-packed k-mers.
    """

    def __init__(
        self,
        capacity: int = 1024,
        max_load: float = 0.7,
        max_entries: Optional[int] = None,
    ):
        if not 0.0 < max_load < 1.0:
            raise ContractError(f"load factor must be in (0, 1), got {max_load}")
        size = 1
        while size < capacity:
            size <<= 1
        self.max_load = max_load
        self.max_entries = max_entries
        self._keys: List[Optional[int]] = [None] * size
        self._counts: List[int] = [0] * size
        self._size = 0
        self.total = 0

    @property
    def capacity(self) -> int:
        return len(self._keys)

    def __len__(self) -> int:
        return self._size

    def _find(self, key: int) -> int:
        keys = self._keys
        slot_mask = len(keys) - 1
        slot = _slot_hash(key) & slot_mask
        while True:
            current = keys[slot]
            if current is None or current == key:
                return slot
            slot = (slot + 1) & slot_mask

    def add(self, key: int, count: int = 1) -> None:
        slot = self._find(key)
        if self._keys[slot] is None:
            if (self._size + 1) > self.max_load * self.capacity:
                self._grow()
                slot = self._find(key)
            if self.max_entries is not None and self._size >= self.max_entries:
                raise CountingMemoryError(
                    f"count table exceeded {self.max_entries} distinct k-mers; "
                    "use more partitions (-p) to shrink each partition"
                )
            self._keys[slot] = key
            self._size += 1
        self._counts[slot] += count
        self.total += count

    def get(self, key: int) -> int:
        slot = self._find(key)
        return self._counts[slot] if self._keys[slot] is not None else 0

    def _grow(self) -> None:
        old_keys, old_counts = self._keys, self._counts
        self._keys = [None] * (2 * len(old_keys))
        self._counts = [0] * len(self._keys)
        for key, count in zip(old_keys, old_counts):
            if key is not None:
                slot = self._find(key)
                self._keys[slot] = key
                self._counts[slot] = count
        logger.debug(f"Count table grew to {len(self._keys)} slots ({self._size} keys)")

    def items(self) -> Iterator[Tuple[int, int]]:
        """(key, count) pairs in slot order."""
        for key, count in zip(self._keys, self._counts):
            if key is not None:
                yield key, count


@dataclass(frozen=True)
class KmerCount:
    kmer: PackedSeq
    count: int


@dataclass(frozen=True)
class CountSummary:
    distinct: int
    total: int


def _kmer_values(codes: bytes, k: int, canonical: bool) -> Iterator[int]:
    k_mask = mask(k)
    top = 2 * (k - 1)
    fwd = rc = 0
    for i, c in enumerate(codes):
        fwd = ((fwd << 2) | c) & k_mask
        rc = (rc >> 2) | ((3 - c) << top)
        if i >= k - 1:
            yield (fwd if fwd <= rc else rc) if canonical else fwd


def expand_superkmer(record: SuperkmerRecord, k: int, canonical: bool = True) -> Iterator[PackedSeq]:
    """Yield the superkmer's k-windows in order (canonicalized by default)."""
    if record.seq.length < k:
        raise ContractError(f"superkmer of length {record.seq.length} is shorter than k={k}")
    codes = to_codes(str(record.seq).encode("ascii"))
    for value in _kmer_values(codes, k, canonical):
        yield PackedSeq.from_value(value, k)


def fill_table(
    records: Iterable[SuperkmerRecord],
    k: int,
    canonical: bool = True,
    max_entries: Optional[int] = None,
) -> CountTable:
    table = CountTable(max_entries=max_entries)
    add = table.add
    for record in records:
        codes = to_codes(text_of(record.seq.value, record.seq.length).encode("ascii"))
        for value in _kmer_values(codes, k, canonical):
            add(value)
    return table


def count_partition(
    records: Iterable[SuperkmerRecord],
    k: int,
    canonical: bool = True,
    max_entries: Optional[int] = None,
) -> Iterator[KmerCount]:
    """
    Exact counts of every distinct k-mer in one partition, in table order.

    Raises:
        CountingMemoryError: If the table would exceed ``max_entries``
    """
    table = fill_table(records, k, canonical, max_entries)
    for value, count in table.items():
        yield KmerCount(PackedSeq.from_value(value, k), count)


def sort_counts(counts: Iterable[KmerCount]) -> List[KmerCount]:
    """Lexicographic k-mer order."""
    return sorted(counts, key=lambda kc: kc.kmer.words)


def write_counts(
    counts: Iterable[KmerCount],
    sink: BinaryIO,
    fmt: str = "tsv",
    min_count: int = 1,
    k: Optional[int] = None,
    partition_id: Optional[int] = None,
) -> CountSummary:
    """
    Write counts of at least ``min_count`` as TSV or binary records.

    Binary layout: header ``<4sII`` (magic, k, words per k-mer), then per
    k-mer its packed words and an 8-byte count, all little-endian. ``k`` is
    needed for the binary header.

    Raises:
        OutputError: On any I/O failure, tagged with the partition id
    """
    if fmt not in OUTPUT_FORMATS:
        raise ContractError(f"unknown output format {fmt!r}")
    distinct = total = 0
    try:
        if fmt == "bin":
            if k is None:
                raise ContractError("binary output needs k")
            n_words = -(-k // SYMBOLS_PER_WORD)
            record = struct.Struct(f"<{n_words}QQ")
            sink.write(_HEADER.pack(BINARY_MAGIC, k, n_words))
            for kc in counts:
                if kc.count < min_count:
                    continue
                sink.write(record.pack(*kc.kmer.words, kc.count))
                distinct += 1
                total += kc.count
        else:
            for kc in counts:
                if kc.count < min_count:
                    continue
                sink.write(f"{kc.kmer}\t{kc.count}\n".encode("ascii"))
                distinct += 1
                total += kc.count
    except OSError as e:
        raise OutputError(str(e), partition_id) from e
    return CountSummary(distinct, total)


def read_counts(path: Union[str, Path]) -> Iterator[Tuple[str, int]]:
    """Read back a ``.tsv`` or ``.kbin`` partition file as (kmer, count)."""
    with open(path, "rb") as f:
        head = f.read(_HEADER.size)
        if head[:4] == BINARY_MAGIC:
            _, k, n_words = _HEADER.unpack(head)
            record = struct.Struct(f"<{n_words}QQ")
            while True:
                raw = f.read(record.size)
                if not raw:
                    return
                if len(raw) < record.size:
                    raise OutputError(f"truncated record in {path}")
                *words, count = record.unpack(raw)
                yield str(PackedSeq(tuple(words), k)), count
        else:
            f.seek(0)
            for line in f:
                kmer, count = line.rstrip(b"\n").split(b"\t")
                yield kmer.decode("ascii"), int(count)
