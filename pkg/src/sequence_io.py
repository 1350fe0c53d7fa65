"""
Sequence input for the superkmer counter.

This module handles:
- Streaming FASTA and FASTQ parsing (plain or gzip, files or stdin)
- Format auto-detection from the first byte
- Splitting records into clean ACGT fragments for k-mer extraction
"""

import gzip
import io
import re
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator, Sequence

from .exceptions import ContractError, SequenceParseError
from .logger import get_logger

logger = get_logger(__name__)

GZIP_MAGIC = b"\x1f\x8b"
FORMATS = ("auto", "fasta", "fastq")

_ACGT_RUN = re.compile(rb"[ACGT]+")


@dataclass(frozen=True)
class SequenceRecord:
    """One FASTA/FASTQ record; bases are kept as read (case and N included)."""

    id: str
    bases: bytes


@dataclass(frozen=True)
class FragmentOrigin:
    record_id: str
    offset: int


@dataclass(frozen=True)
class Fragment:
    """Maximal uppercase ACGT run of a record, at least k long."""

    bases: bytes
    origin: FragmentOrigin = FragmentOrigin("", 0)

    def __len__(self) -> int:
        return len(self.bases)


def _record_id(header: bytes) -> str:
    fields = header[1:].split(None, 1)
    return fields[0].decode("utf-8", "replace") if fields else ""


def read_fasta(stream: BinaryIO) -> Iterator[SequenceRecord]:
    """
    Parse FASTA records from a binary stream.

    Sequence lines are concatenated with all whitespace removed. Only the
    current record is held in memory.

    Raises:
        SequenceParseError: If data precedes the first '>' header or a header
            has no identifier
    """
    offset = 0
    header_id = None
    chunks = []

    for line in stream:
        line_offset = offset
        offset += len(line)
        if line.startswith(b">"):
            if header_id is not None:
                yield SequenceRecord(header_id, b"".join(chunks))
            header_id = _record_id(line)
            if not header_id:
                raise SequenceParseError("FASTA header without identifier", offset=line_offset)
            chunks = []
        elif header_id is None:
            if line.strip():
                raise SequenceParseError("expected '>' at start of FASTA record", offset=line_offset)
        else:
            chunks.append(b"".join(line.split()))

    if header_id is not None:
        yield SequenceRecord(header_id, b"".join(chunks))


def read_fastq(stream: BinaryIO) -> Iterator[SequenceRecord]:
    """
    Parse 4-line FASTQ records; quality strings are checked then dropped.

    Raises:
        SequenceParseError: On a truncated record, a bad header or separator,
            or a quality/bases length mismatch
    """
    index = 0
    lines = iter(stream)
    for header in lines:
        if not header.strip():
            continue
        if not header.startswith(b"@"):
            raise SequenceParseError("expected '@' at start of FASTQ record", record_index=index)
        try:
            bases = next(lines).strip()
            separator = next(lines)
            quality = next(lines).strip()
        except StopIteration:
            raise SequenceParseError("truncated FASTQ record", record_index=index) from None
        if not separator.startswith(b"+"):
            raise SequenceParseError("expected '+' separator line", record_index=index)
        if len(quality) != len(bases):
            raise SequenceParseError(
                f"quality length {len(quality)} != bases length {len(bases)}",
                record_index=index,
            )
        record_id = _record_id(header)
        if not record_id:
            raise SequenceParseError("FASTQ header without identifier", record_index=index)
        yield SequenceRecord(record_id, bases)
        index += 1


def fragment(record: SequenceRecord, k: int) -> Iterator[Fragment]:
    """
    Split a record into uppercase ACGT runs of length >= k.

    Any symbol outside ACGT (after uppercasing) breaks a run, so no k-mer spans
    an ambiguous base.
    """
    if k < 1:
        raise ContractError(f"k must be >= 1, got {k}")
    for run in _ACGT_RUN.finditer(record.bases.upper()):
        if run.end() - run.start() >= k:
            yield Fragment(run.group(), FragmentOrigin(record.id, run.start()))


def detect_format(first_byte: bytes) -> str:
    if first_byte == b">":
        return "fasta"
    if first_byte == b"@":
        return "fastq"
    raise SequenceParseError(f"cannot detect sequence format from leading byte {first_byte!r}", offset=0)


@contextmanager
def open_stream(path: str) -> Iterator[io.BufferedReader]:
    """Open a path or '-' (stdin) as a buffered binary stream, unwrapping gzip."""
    if path == "-":
        raw = sys.stdin.buffer
        owned = False
    else:
        raw = open(path, "rb")
        owned = True
    try:
        buffered = raw if isinstance(raw, io.BufferedReader) else io.BufferedReader(raw)
        if buffered.peek(2)[:2] == GZIP_MAGIC:
            with gzip.GzipFile(fileobj=buffered) as gz:
                yield io.BufferedReader(gz)
        else:
            yield buffered
    finally:
        if owned:
            raw.close()


def parse_stream(stream: io.BufferedReader, fmt: str = "auto") -> Iterator[SequenceRecord]:
    """Parse a buffered stream as FASTA or FASTQ, detecting the format if asked."""
    if fmt not in FORMATS:
        raise ContractError(f"unknown input format {fmt!r}")
    if fmt == "auto":
        head = stream.peek(1)[:1]
        if not head:
            return
        fmt = detect_format(head)
    parser = read_fasta if fmt == "fasta" else read_fastq
    yield from parser(stream)


def open_sequences(path: str, fmt: str = "auto") -> Iterator[SequenceRecord]:
    """Stream records from one input path (or '-')."""
    logger.debug(f"Reading {path} (format: {fmt})")
    with open_stream(path) as stream:
        yield from parse_stream(stream, fmt)


def iter_records(paths: Sequence[str], fmt: str = "auto") -> Iterator[SequenceRecord]:
    """Chain records from several inputs in order."""
    for path in paths:
        yield from open_sequences(path, fmt)


def write_fasta(records: Iterable[SequenceRecord], sink: BinaryIO, width: int = 80) -> int:
    """Write records as FASTA with fixed line width; returns the record count."""
    written = 0
    for record in records:
        sink.write(b">" + record.id.encode("utf-8") + b"\n")
        for start in range(0, len(record.bases), width):
            sink.write(record.bases[start : start + width] + b"\n")
        written += 1
    return written
