"""
Signature computation and superkmer extraction (stage 1).

A signature is the canonical m-mer of minimum rank inside a k-window. Ranks
put every allowed m-mer before every disallowed one (an m-mer is disallowed if
it starts with AAA or ACA, or contains AA anywhere but at its very beginning),
so windows made only of disallowed m-mers still get a signature.

Sliding minimum: the window minimum is kept as (rank, position). A newly
entering m-mer replaces it only if strictly smaller, which keeps the leftmost
position on ties; the full window is rescanned only when the minimum's
position slides out.
"""

from dataclasses import dataclass
from typing import Iterator, List, Tuple

from .exceptions import ContractError
from .kmer_codec import PackedSeq, encode, mask, to_codes, value_of
from .logger import get_logger
from .sequence_io import Fragment

logger = get_logger(__name__)

MAX_M = 31
DEFAULT_M = 10
DISALLOWED_FLAG = 1 << 62

_LOW_BITS = int("01" * 32, 2)


@dataclass(frozen=True)
class Signature:
    """Canonical m-mer with its ordering key."""

    mmer: PackedSeq
    rank: int

    @property
    def value(self) -> int:
        """Numeric 2-bit encoding of the m-mer (no flag bit)."""
        return self.rank & ~DISALLOWED_FLAG

    @property
    def allowed(self) -> bool:
        return not self.rank & DISALLOWED_FLAG

    @classmethod
    def from_rank(cls, rank: int, m: int) -> "Signature":
        return cls(PackedSeq.from_value(rank & ~DISALLOWED_FLAG, m), rank)


@dataclass(frozen=True)
class SuperkmerRecord:
    """Run of consecutive k-mers sharing one signature."""

    signature: Signature
    seq: PackedSeq
    k: int

    @property
    def kmer_count(self) -> int:
        return self.seq.length - self.k + 1


def allowed_value(value: int, m: int) -> bool:
    """Filter rule on an integer-packed m-mer."""
    if m < 3:
        return True
    prefix = value >> (2 * (m - 3))
    if prefix == 0b000000 or prefix == 0b000100:  # AAA, ACA
        return False
    zero = ~value & mask(m)
    is_a = zero & (zero >> 1) & _LOW_BITS & mask(m)
    # bit set at symbol j+1 wherever symbols j and j+1 are both A
    pairs = is_a & (is_a >> 2)
    # drop the pair at positions (0, 1)
    pairs &= ~(1 << (2 * (m - 2)))
    return pairs == 0


def rank_value(value: int, m: int) -> int:
    return value if allowed_value(value, m) else value | DISALLOWED_FLAG


def is_allowed(mmer: PackedSeq) -> bool:
    return allowed_value(mmer.value, mmer.length)


def mmer_rank(mmer: PackedSeq) -> int:
    """
    64-bit ordering key: the packed m-mer, with bit 62 set if disallowed.

    Raises:
        ContractError: If m exceeds 31
    """
    if mmer.length > MAX_M:
        raise ContractError(f"m must be <= {MAX_M}, got {mmer.length}")
    return rank_value(mmer.value, mmer.length)


def canonical_ranks(codes: bytes, m: int) -> List[int]:
    """Rank of the canonical m-mer at every start position of a code string."""
    ranks = []
    fwd = rc = 0
    m_mask = mask(m)
    top = 2 * (m - 1)
    for i, c in enumerate(codes):
        fwd = ((fwd << 2) | c) & m_mask
        rc = (rc >> 2) | ((3 - c) << top)
        if i >= m - 1:
            ranks.append(rank_value(fwd if fwd <= rc else rc, m))
    return ranks


def window_minima(ranks: List[int], span: int) -> Iterator[Tuple[int, int]]:
    """
    Yield (rank, position) of the leftmost minimum for each window of
    ``span`` consecutive ranks, using rescan-on-expiry.
    """
    if len(ranks) < span:
        return
    best_pos = min(range(span), key=ranks.__getitem__)
    best = ranks[best_pos]
    yield best, best_pos
    for end in range(span, len(ranks)):
        start = end - span + 1
        if best_pos < start:
            best_pos = min(range(start, end + 1), key=ranks.__getitem__)
            best = ranks[best_pos]
        elif ranks[end] < best:
            best, best_pos = ranks[end], end
        yield best, best_pos


def signature_of(window: PackedSeq, m: int) -> Tuple[Signature, int]:
    """
    Signature of one k-window and the position of its m-mer.

    Raises:
        ContractError: If m > k or m > 31
    """
    if m > window.length or m > MAX_M or m < 1:
        raise ContractError(f"need 1 <= m <= min(k, {MAX_M}); got m={m}, k={window.length}")
    ranks = canonical_ranks(to_codes(str(window).encode("ascii")), m)
    rank, pos = next(window_minima(ranks, len(ranks)))
    return Signature.from_rank(rank, m), pos


def extract_superkmers(fragment: Fragment, k: int, m: int) -> Iterator[SuperkmerRecord]:
    """
    Split a fragment into superkmers.

    A new superkmer starts whenever a window's signature differs from the
    previous window's; consecutive superkmers overlap by k - 1 symbols.
    """
    bases = fragment.bases
    if m > k or m > MAX_M or m < 1:
        raise ContractError(f"need 1 <= m <= min(k, {MAX_M}); got m={m}, k={k}")
    if len(bases) < k:
        return

    ranks = canonical_ranks(to_codes(bases), m)
    start = 0
    current = None
    disallowed = 0
    for window, (rank, _) in enumerate(window_minima(ranks, k - m + 1)):
        if rank & DISALLOWED_FLAG:
            disallowed += 1
        if current is None:
            current = rank
        elif rank != current:
            yield _superkmer(bases, start, window - 1 + k, current, k, m)
            start, current = window, rank
    yield _superkmer(bases, start, len(bases), current, k, m)
    if disallowed:
        origin = fragment.origin
        logger.warning(
            f"{disallowed} of {len(bases) - k + 1} windows in {origin.record_id or '<unnamed>'}:{origin.offset} "
            f"hold only disallowed {m}-mers"
        )


def _superkmer(bases: bytes, start: int, end: int, rank: int, k: int, m: int) -> SuperkmerRecord:
    chunk = bases[start:end]
    return SuperkmerRecord(
        Signature.from_rank(rank, m),
        PackedSeq.from_value(value_of(chunk), len(chunk)),
        k,
    )


def window_signatures(bases: bytes, k: int, m: int) -> List[Signature]:
    """Signature of every k-window of an ACGT string, computed independently."""
    return [
        signature_of(encode(bases[i : i + k]), m)[0] for i in range(len(bases) - k + 1)
    ]
