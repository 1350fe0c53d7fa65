"""
Tests for binning, LPT scheduling and sampled size estimation.
"""

import itertools

import numpy as np
import pytest
from scipy.stats import chisquare

from src.exceptions import ContractError, SamplingError
from src.kmer_codec import encode
from src.metrics import load_balance
from src.partitioning import (
    Binner,
    PartitionMap,
    SizeEstimate,
    bin_of,
    default_partition,
    estimate_bin_sizes,
    lookup_partition,
    lpt_bound,
    lpt_schedule,
    mix64,
    optimal_schedule_bruteforce,
    partition_loads,
    signature_bin,
)
from src.sequence_io import fragment
from src.signature_engine import Signature, extract_superkmers, is_allowed, mmer_rank
from src.synthetic import synthetic_records, zipf_bin_sizes


def sig(text: str) -> Signature:
    mmer = encode(text)
    return Signature(mmer, mmer_rank(mmer))


def exact_sizes(records, k, m, binner):
    sizes = {}
    for record in records:
        for frag in fragment(record, k):
            for sk in extract_superkmers(frag, k, m):
                b = binner(sk.signature)
                sizes[b] = sizes.get(b, 0) + sk.kmer_count
    return sizes


class TestBinning:
    """Tests for signature -> bin maps."""

    def test_mix64_known_values(self):
        assert mix64(0) == 0
        assert mix64(1) == mix64(1 + 2**64)
        assert 0 <= mix64(12345) < 2**64

    def test_bin_of_deterministic(self):
        assert bin_of(sig("ACGTC"), 97) == bin_of(sig("ACGTC"), 97)

    def test_single_bin(self):
        assert {bin_of(sig("".join(p)), 1) for p in itertools.product("ACG", repeat=4)} == {0}

    def test_bin_occupancy_exhaustive_m7(self):
        counts = np.zeros(512)
        for letters in itertools.product("ACGT", repeat=7):
            mmer = encode("".join(letters))
            if is_allowed(mmer):
                counts[bin_of(Signature(mmer, mmer_rank(mmer)), 512)] += 1
        assert counts.max() / counts.mean() < 2.0

    def test_signature_bin_injective(self):
        texts = ["".join(p) for p in itertools.product("ACGT", repeat=5)]
        assert len({signature_bin(sig(t)) for t in texts}) == len(texts)

    def test_signature_granularity_counts_distinct_signatures(self):
        records = synthetic_records(30, mean_length=200, seed=2)
        signatures = set()
        for record in records:
            for frag in fragment(record, 25):
                signatures.update(sk.signature for sk in extract_superkmers(frag, 25, 10))
        bins = exact_sizes(records, 25, 10, Binner("signature"))
        assert len(bins) == len(signatures)

    def test_binner_modes(self):
        s = sig("CGTAC")
        assert Binner("signature")(s) == s.value
        assert Binner("bin", 64)(s) == bin_of(s, 64)
        with pytest.raises(ContractError):
            Binner("nope")


class TestDefaultPartition:
    """Tests for the hash fallback."""

    def test_modulo(self):
        assert default_partition(5, 4) == 1
        assert default_partition(123456, 1) == 0

    def test_invalid_p(self):
        with pytest.raises(ContractError):
            default_partition(3, 0)

    def test_uniform_histogram(self):
        rng = np.random.default_rng(0)
        bins = rng.integers(0, 2**40, size=40_000)
        observed = np.bincount([default_partition(int(b), 16) for b in bins], minlength=16)
        assert chisquare(observed).pvalue > 0.001


class TestLpt:
    """Tests for the LPT scheduler."""

    def test_hand_example(self):
        pmap = lpt_schedule({0: 7, 1: 5, 2: 4, 3: 3, 4: 2}, 2)
        assert pmap.makespan == 11
        assert sorted(pmap.loads) == [10, 11]
        assert pmap.assignment == {0: 0, 1: 1, 2: 1, 3: 0, 4: 1}

    def test_equal_sizes(self):
        pmap = lpt_schedule({b: 3.0 for b in range(12)}, 4)
        assert pmap.loads == [9.0] * 4

    def test_ties_by_bin_then_partition(self):
        pmap = lpt_schedule({9: 1.0, 2: 1.0, 5: 1.0}, 3)
        assert pmap.assignment == {2: 0, 5: 1, 9: 2}

    def test_accepts_estimate(self):
        est = SizeEstimate({1: 4.0, 2: 4.0}, 0.5)
        assert lpt_schedule(est, 2).makespan == 4.0

    def test_contract_errors(self):
        with pytest.raises(ContractError):
            lpt_schedule({}, 2)
        with pytest.raises(ContractError):
            lpt_schedule({1: 1.0}, 0)

    def test_deterministic(self):
        sizes = zipf_bin_sizes(500, seed=4)
        assert lpt_schedule(sizes, 7) == lpt_schedule(sizes, 7)

    def test_zipf_beats_hash(self):
        sizes = zipf_bin_sizes(10_000, 1.0, seed=0)
        p = 32
        lpt_max = lpt_schedule(sizes, p).makespan
        hash_max = max(partition_loads(sizes, p, lambda b: default_partition(b, p)))
        assert lpt_max <= hash_max
        assert load_balance(lpt_schedule(sizes, p).loads)["skew"] <= load_balance(
            partition_loads(sizes, p, lambda b: default_partition(b, p))
        )["skew"]

    def test_list_scheduling_bound(self):
        """Makespan never exceeds the average load plus the largest bin."""
        sizes = zipf_bin_sizes(2_000, 1.2, seed=8)
        for p in (2, 8, 32):
            bound = sum(sizes.values()) / p + max(sizes.values())
            assert lpt_schedule(sizes, p).makespan <= bound + 1e-9


def _check_lpt_bound(sizes, p: int) -> None:
    lpt = lpt_schedule(dict(enumerate(sizes)), p).makespan
    opt = optimal_schedule_bruteforce(sizes, p)
    assert opt <= lpt <= lpt_bound(p) * opt + 1e-9, (sizes, p)


class TestBruteForce:
    """Tests for the exact scheduler and the LPT guarantee."""

    def test_examples(self):
        assert optimal_schedule_bruteforce([7, 5, 4, 3, 2], 2) == 11
        assert optimal_schedule_bruteforce([6], 3) == 6
        assert optimal_schedule_bruteforce([1, 1, 1, 1], 2) == 2
        assert optimal_schedule_bruteforce([], 2) == 0.0

    def test_matches_enumeration(self):
        sizes = [8, 7, 6, 5, 4]
        best = min(
            max(sum(s for s, m in zip(sizes, assign) if m == machine) for machine in range(3))
            for assign in itertools.product(range(3), repeat=len(sizes))
        )
        assert optimal_schedule_bruteforce(sizes, 3) == best

    def test_too_many_jobs(self):
        with pytest.raises(ContractError):
            optimal_schedule_bruteforce([1.0] * 13, 2)

    def test_lpt_bound_random(self):
        rng = np.random.default_rng(2024)
        for n in range(1, 6):
            for p in range(1, 5):
                for _ in range(15):
                    _check_lpt_bound([float(x) for x in rng.integers(1, 30, size=n)], p)

    @pytest.mark.parametrize("p", [2, 3])
    def test_lpt_bound_exhaustive(self, p):
        """Every multiset of up to 8 jobs with sizes 1..9."""
        checked = 0
        for n in range(1, 9):
            for sizes in itertools.combinations_with_replacement(range(1, 10), n):
                _check_lpt_bound([float(s) for s in sizes], p)
                checked += 1
        assert checked == 24_309

    def test_lpt_bound_value(self):
        assert lpt_bound(1) == pytest.approx(1.0)
        assert lpt_bound(2) == pytest.approx(7 / 6)


class TestPartitionMap:
    """Tests for lookups and the text artifact."""

    def test_lookup_scheduled_and_fallback(self):
        pmap = PartitionMap({10: 2}, 4)
        assert lookup_partition(pmap, 10) == 2
        assert lookup_partition(pmap, 7) == 3
        assert pmap.covers(10) and not pmap.covers(7)

    def test_hash_only(self):
        pmap = PartitionMap.hash_only(5)
        assert lookup_partition(pmap, 12) == 2
        assert pmap.makespan == 0.0

    def test_dump_and_load(self, tmp_path):
        pmap = lpt_schedule({3: 5.0, 8: 2.5, 1: 1.0}, 2)
        path = tmp_path / "map.tsv"
        pmap.dump(path)
        assert path.read_text().startswith("# p=2\n")
        loaded = PartitionMap.load(path)
        assert loaded.assignment == pmap.assignment
        assert loaded.p == 2
        assert loaded.loads == pmap.loads

    def test_invalid_p(self):
        with pytest.raises(ContractError):
            PartitionMap({}, 0)


class TestEstimateBinSizes:
    """Tests for sampled size estimation."""

    def test_full_fraction_is_exact(self, small_records):
        binner = Binner("bin", 64)
        est = estimate_bin_sizes(small_records, 1.0, 15, 5, binner)
        assert est.sizes == pytest.approx(exact_sizes(small_records, 15, 5, binner))
        assert est.sampled_records == len(small_records)

    def test_duplicated_input_doubles(self, small_records):
        binner = Binner("signature")
        once = estimate_bin_sizes(small_records, 1.0, 15, 5, binner)
        twice = estimate_bin_sizes(small_records + small_records, 1.0, 15, 5, binner)
        assert twice.sizes == pytest.approx({b: 2 * s for b, s in once.sizes.items()})

    def test_seeded_sample_is_deterministic(self, small_records):
        binner = Binner("bin", 16)
        a = estimate_bin_sizes(small_records, 0.5, 15, 5, binner, seed=3)
        b = estimate_bin_sizes(small_records, 0.5, 15, 5, binner, seed=3)
        assert a == b
        assert 0 < a.sampled_records < len(small_records)

    def test_empty_sample(self, record):
        with pytest.raises(SamplingError, match="sample-fraction"):
            estimate_bin_sizes([record("ACG")], 1.0, 15, 5, Binner())

    def test_bad_fraction(self, small_records):
        with pytest.raises(ContractError):
            estimate_bin_sizes(small_records, 0.0, 15, 5, Binner())

    @pytest.mark.slow
    def test_large_bins_within_fifteen_percent(self):
        records = synthetic_records(8_000, mean_length=150, seed=12)
        binner = Binner("bin", 64)
        exact = exact_sizes(records, 28, 10, binner)
        est = estimate_bin_sizes(records, 0.1, 28, 10, binner, seed=1)
        total = sum(exact.values())
        for b, size in exact.items():
            if size > 0.01 * total:
                assert abs(est.sizes.get(b, 0.0) - size) / size < 0.15
