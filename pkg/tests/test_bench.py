"""
Tests for the partitioner benchmark harness.
"""

import pandas as pd
import pytest

from src.bench import compare_partitioners, run_bench, sampled_comparison, synthetic_sizes
from src.synthetic import uniform_bin_sizes, write_synthetic_fasta, zipf_bin_sizes


class TestSyntheticSizes:
    """Tests for the bin-size generators."""

    def test_zipf(self):
        sizes = zipf_bin_sizes(1000, 1.0, total=1e6, seed=3)
        assert sorted(sizes) == list(range(1000))
        assert min(sizes.values()) >= 1
        assert max(sizes.values()) > 50 * sorted(sizes.values())[500]

    def test_zipf_seeded(self):
        assert zipf_bin_sizes(100, seed=1) == zipf_bin_sizes(100, seed=1)
        assert zipf_bin_sizes(100, seed=1) != zipf_bin_sizes(100, seed=2)

    def test_uniform(self):
        assert synthetic_sizes("uniform", 10, total=100.0) == uniform_bin_sizes(10, 10.0)


class TestComparePartitioners:
    """Tests for paired hash vs LPT runs."""

    def test_zipf_lpt_not_worse(self):
        summary, series = compare_partitioners(zipf_bin_sizes(10_000, 1.0, seed=0), 32)
        rows = summary.set_index("scheme")
        assert rows.loc["lpt", "max_load"] <= rows.loc["hash", "max_load"]
        assert rows.loc["lpt", "makespan_over_lower_bound"] <= 4 / 3
        assert len(series) == 64

    def test_uniform_within_five_percent(self):
        summary, _ = compare_partitioners(uniform_bin_sizes(10_000), 32)
        rows = summary.set_index("scheme")
        assert rows.loc["hash", "max_load"] == pytest.approx(rows.loc["lpt", "max_load"], rel=0.05)

    def test_single_partition(self):
        summary, _ = compare_partitioners(zipf_bin_sizes(500, seed=5), 1)
        assert summary["max_load"].nunique() == 1
        assert (summary["skew"] == 1.0).all()

    def test_empty_bins_ratio(self):
        summary, _ = compare_partitioners(uniform_bin_sizes(8, 0.0), 4)
        assert (summary["makespan_over_lower_bound"] == 1.0).all()
        assert (summary["idle_fraction"] == 0.0).all()


class TestRunBench:
    """Tests for the harness entry point."""

    def test_writes_tables(self, tmp_path):
        tables = run_bench(str(tmp_path), distribution="zipf", n_bins=200, p=8)
        summary = pd.read_csv(tmp_path / "bench_summary.tsv", sep="\t")
        assert summary["scheme"].tolist() == ["hash", "lpt"]
        assert len(pd.read_csv(tmp_path / "bench_loads.tsv", sep="\t")) == 16
        assert set(tables) == {"summary", "loads"}

    def test_sampled_comparison(self, small_fasta, run_config):
        frame = sampled_comparison(run_config(sample_fraction=0.5, granularity="bin", bins=32), [small_fasta])
        assert frame["scheme"].tolist() == ["hash", "lpt@0.5", "lpt@exact"]
        assert frame["max_load"].iloc[2] <= frame["max_load"].iloc[0]

    def test_corpus_run(self, tmp_path, run_config):
        tables = run_bench(str(tmp_path), n_bins=50, p=4, corpus_mb=0.02, config=run_config(k=21, m=7))
        assert {"sampled", "throughput"} <= set(tables)
        rate = tables["throughput"].iloc[0]
        assert rate["kmers"] > 0
        assert "extract_mb_per_s" in tables["throughput"].columns
        assert (tmp_path / "bench_throughput.tsv").exists()

    @pytest.mark.slow
    @pytest.mark.parametrize("granularity", ["signature", "bin"])
    def test_one_percent_sample_close_to_hash(self, tmp_path, run_config, granularity):
        """A 1% sample schedules within 5% of hash skew on a 10^7 k-mer corpus."""
        path = tmp_path / "corpus.fa"
        write_synthetic_fasta(path, 13_000_000)
        config = run_config(k=28, m=10, partitions=32, sample_fraction=0.01, granularity=granularity, bins=8192)
        rows = sampled_comparison(config, [str(path)]).set_index("scheme")
        assert rows.loc["hash", "mean_load"] * 32 >= 10_000_000
        assert rows.loc["lpt@0.01", "skew"] <= 1.05 * rows.loc["hash", "skew"]
