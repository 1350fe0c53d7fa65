"""
2-bit packed DNA representation.

Symbols map A=00, C=01, G=10, T=11 and are packed most-significant-first into
64-bit words, so numeric comparison of packed words is lexicographic
comparison of the decoded text. Internally a sequence is also available as a
single Python integer (``value``) holding exactly ``2 * length`` bits; the hot
loops of the signature and counting engines work on these integers directly.
"""

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple, Union

from .exceptions import ContractError, EncodingError

WORD_BITS = 64
SYMBOLS_PER_WORD = WORD_BITS // 2
WORD_MASK = (1 << WORD_BITS) - 1

_DIGITS = bytes.maketrans(b"ACGT", b"0123")
_CODES = bytes.maketrans(b"ACGT", b"\x00\x01\x02\x03")
_NOT_ACGT = re.compile(rb"[^ACGT]")
_HEX_TO_BASES = str.maketrans(
    {f"{i:x}": "ACGT"[i >> 2] + "ACGT"[i & 3] for i in range(16)}
)


def _rc_byte(b: int) -> int:
    out = 0
    for _ in range(4):
        out = (out << 2) | (3 - (b & 3))
        b >>= 2
    return out


# Reverse-complements the four symbols held in one byte.
_RC_BYTE = bytes(_rc_byte(b) for b in range(256))


class Strand(Enum):
    """Which strand won a canonical comparison."""

    FORWARD = "forward"
    REVERSE = "reverse"


def _words_from_value(value: int, length: int) -> Tuple[int, ...]:
    n_words = -(-length // SYMBOLS_PER_WORD)
    if n_words == 0:
        return ()
    padded = value << (n_words * WORD_BITS - 2 * length)
    raw = padded.to_bytes(n_words * 8, "big")
    return tuple(int.from_bytes(raw[i : i + 8], "big") for i in range(0, len(raw), 8))


def _value_from_words(words: Tuple[int, ...], length: int) -> int:
    if not words:
        return 0
    raw = b"".join(w.to_bytes(8, "big") for w in words)
    return int.from_bytes(raw, "big") >> (len(words) * WORD_BITS - 2 * length)


@dataclass(frozen=True)
class PackedSeq:
    """
    Immutable 2-bit packed DNA sequence.

    Equality and hashing use only ``(words, length)``; ``value`` is a cached
    view of the same bits.
    """

    words: Tuple[int, ...]
    length: int
    value: int = field(default=-1, compare=False, repr=False)

    def __post_init__(self):
        if self.length < 0:
            raise ContractError(f"negative length {self.length}")
        if len(self.words) != -(-self.length // SYMBOLS_PER_WORD):
            raise ContractError(f"{len(self.words)} words cannot hold {self.length} symbols")
        if self.value < 0:
            object.__setattr__(self, "value", _value_from_words(self.words, self.length))

    @classmethod
    def from_value(cls, value: int, length: int) -> "PackedSeq":
        """Build from an integer holding ``2 * length`` bits."""
        return cls(_words_from_value(value, length), length, value)

    @classmethod
    def empty(cls) -> "PackedSeq":
        return cls((), 0, 0)

    def __len__(self) -> int:
        return self.length

    def __str__(self) -> str:
        return decode(self)


def mask(length: int) -> int:
    """Bit mask covering ``length`` symbols."""
    return (1 << (2 * length)) - 1


def value_of(bases: bytes) -> int:
    """Pack uppercase ACGT bytes into an integer (no validation)."""
    if not bases:
        return 0
    return int(bases.translate(_DIGITS), 4)


def to_codes(bases: bytes) -> bytes:
    """Map uppercase ACGT bytes to symbol codes 0..3."""
    return bases.translate(_CODES)


def text_of(value: int, length: int) -> str:
    """Decode an integer holding ``2 * length`` bits."""
    if length == 0:
        return ""
    if length % 2:
        value <<= 2
    digits = format(value, f"0{(length + 1) // 2}x")
    return digits.translate(_HEX_TO_BASES)[:length]


def rc_value(value: int, length: int) -> int:
    """Reverse complement of an integer-packed sequence."""
    if length == 0:
        return 0
    pad = (-length) % 4
    raw = (value << (2 * pad)).to_bytes((length + pad) // 4, "big")
    return int.from_bytes(raw.translate(_RC_BYTE)[::-1], "big") & mask(length)


def encode(text: Union[str, bytes]) -> PackedSeq:
    """
    Pack an ACGT string.

    Raises:
        EncodingError: If a symbol other than A, C, G or T is present
    """
    bases = text.encode("ascii", "replace") if isinstance(text, str) else bytes(text)
    bad = _NOT_ACGT.search(bases)
    if bad:
        raise EncodingError(f"non-ACGT symbol {chr(bases[bad.start()])!r}", bad.start())
    return PackedSeq.from_value(value_of(bases), len(bases))


def decode(seq: PackedSeq) -> str:
    """Inverse of `encode`."""
    return text_of(seq.value, seq.length)


def reverse_complement(seq: PackedSeq) -> PackedSeq:
    return PackedSeq.from_value(rc_value(seq.value, seq.length), seq.length)


def canonical(seq: PackedSeq) -> Tuple[PackedSeq, Strand]:
    """
    Lexicographic minimum of a sequence and its reverse complement.

    RC-palindromes report the forward strand.
    """
    rc = rc_value(seq.value, seq.length)
    if rc < seq.value:
        return PackedSeq.from_value(rc, seq.length), Strand.REVERSE
    return seq, Strand.FORWARD


def compare(a: PackedSeq, b: PackedSeq) -> int:
    """
    Compare two equal-length sequences: -1, 0 or 1.

    Raises:
        ContractError: If the lengths differ
    """
    if a.length != b.length:
        raise ContractError(f"cannot compare sequences of length {a.length} and {b.length}")
    return (a.words > b.words) - (a.words < b.words)


def subseq(seq: PackedSeq, start: int, length: int) -> PackedSeq:
    """
    Slice ``[start, start + length)``.

    Raises:
        ContractError: If the slice falls outside the sequence
    """
    if start < 0 or length < 0 or start + length > seq.length:
        raise ContractError(
            f"slice [{start}, {start + length}) out of range for length {seq.length}"
        )
    shift = 2 * (seq.length - start - length)
    return PackedSeq.from_value((seq.value >> shift) & mask(length), length)
