"""
Tests for the 2-bit packed DNA codec.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.exceptions import ContractError, EncodingError
from src.kmer_codec import (
    PackedSeq,
    Strand,
    canonical,
    compare,
    decode,
    encode,
    reverse_complement,
    subseq,
)
from src.oracle import reverse_complement_text

dna = st.text(alphabet="ACGT", min_size=0, max_size=200)


class TestEncode:
    """Tests for packing."""

    def test_bit_layout(self):
        seq = encode("ACGT")
        assert seq.length == 4
        assert seq.words[0] >> 56 == 0b00011011

    def test_word_boundary(self):
        seq = encode("A" * 33)
        assert seq.length == 33
        assert len(seq.words) == 2

    def test_full_word(self):
        assert encode("T" * 32).words == (2**64 - 1,)

    def test_bytes_input(self):
        assert encode(b"GATTACA") == encode("GATTACA")

    def test_rejects_other_symbols(self):
        with pytest.raises(EncodingError) as exc:
            encode("ACGNT")
        assert exc.value.position == 3

    def test_lowercase_rejected(self):
        with pytest.raises(EncodingError):
            encode("acgt")

    def test_word_count_checked(self):
        with pytest.raises(ContractError):
            PackedSeq((0, 0), 3)

    @given(dna)
    def test_round_trip(self, text):
        assert decode(encode(text)) == text

    @given(st.text(alphabet="ACGT", min_size=64, max_size=64))
    def test_round_trip_64(self, text):
        seq = encode(text)
        assert len(seq.words) == 2
        assert str(seq) == text


class TestDecode:
    """Tests for unpacking."""

    def test_gattaca(self):
        assert decode(encode("GATTACA")) == "GATTACA"

    def test_empty(self):
        assert decode(PackedSeq.empty()) == ""
        assert encode("") == PackedSeq.empty()


class TestReverseComplement:
    """Tests for reverse complement and canonical form."""

    def test_palindrome(self):
        assert decode(reverse_complement(encode("ACGT"))) == "ACGT"

    def test_complement(self):
        assert decode(reverse_complement(encode("AAAA"))) == "TTTT"

    @given(dna)
    def test_involution(self, text):
        seq = encode(text)
        assert reverse_complement(reverse_complement(seq)) == seq

    @given(dna)
    def test_matches_text(self, text):
        assert decode(reverse_complement(encode(text))) == reverse_complement_text(text)

    def test_canonical_reverse(self):
        seq, strand = canonical(encode("TTTT"))
        assert decode(seq) == "AAAA"
        assert strand is Strand.REVERSE

    def test_canonical_palindrome_forward(self):
        seq, strand = canonical(encode("ACGT"))
        assert decode(seq) == "ACGT"
        assert strand is Strand.FORWARD

    @given(st.text(alphabet="ACGT", min_size=1, max_size=100))
    def test_canonical_is_text_minimum(self, text):
        seq, _ = canonical(encode(text))
        assert decode(seq) == min(text, reverse_complement_text(text))


class TestCompare:
    """Tests for ordering."""

    def test_less(self):
        assert compare(encode("AAAC"), encode("AAAG")) == -1

    def test_equal(self):
        x = encode("GATTACA")
        assert compare(x, x) == 0

    def test_length_mismatch(self):
        with pytest.raises(ContractError):
            compare(encode("AC"), encode("ACG"))

    @settings(max_examples=200)
    @given(st.integers(min_value=1, max_value=80).flatmap(
        lambda n: st.tuples(
            st.text(alphabet="ACGT", min_size=n, max_size=n),
            st.text(alphabet="ACGT", min_size=n, max_size=n),
        )
    ))
    def test_matches_text_order(self, pair):
        a, b = pair
        assert compare(encode(a), encode(b)) == (a > b) - (a < b)


class TestSubseq:
    """Tests for slicing."""

    def test_slice(self):
        assert decode(subseq(encode("ACGTAC"), 1, 4)) == "CGTA"

    def test_identity(self):
        x = encode("GATTACA")
        assert subseq(x, 0, len(x)) == x

    def test_out_of_range(self):
        with pytest.raises(ContractError):
            subseq(encode("ACGT"), 2, 3)

    @given(st.text(alphabet="ACGT", min_size=1, max_size=150), st.data())
    def test_matches_text_slice(self, text, data):
        start = data.draw(st.integers(min_value=0, max_value=len(text)))
        length = data.draw(st.integers(min_value=0, max_value=len(text) - start))
        assert decode(subseq(encode(text), start, length)) == text[start : start + length]
