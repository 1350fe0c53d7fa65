"""
Partitioner benchmark harness.

This module handles:
- Paired hash-vs-LPT load comparison on synthetic bin-size tables
- Sampled-vs-exact schedule quality on a synthetic corpus
- Stage throughput of a full pipeline run
"""

import os
import tempfile
from dataclasses import replace
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import pandas as pd

from .config import RunConfig
from .logger import get_logger
from .metrics import load_balance
from .partitioning import (
    Binner,
    default_partition,
    estimate_bin_sizes,
    lookup_partition,
    lpt_schedule,
    partition_loads,
)
from .pipeline import run
from .sequence_io import iter_records
from .synthetic import uniform_bin_sizes, write_synthetic_fasta, zipf_bin_sizes
from .validators import safe_divide

logger = get_logger(__name__)

DISTRIBUTIONS = ("zipf", "uniform")


def synthetic_sizes(
    distribution: str,
    n_bins: int,
    exponent: float = 1.0,
    total: float = 1e7,
    seed: int = 0,
) -> Dict[int, float]:
    if distribution == "zipf":
        return zipf_bin_sizes(n_bins, exponent, total, seed)
    return uniform_bin_sizes(n_bins, total / n_bins)


def _summary_row(scheme: str, loads: Sequence[float], sizes: Dict[int, float], p: int) -> Dict:
    balance = load_balance(loads)
    total = sum(sizes.values())
    lower = max(total / p, max(sizes.values()))
    ratio = safe_divide(balance["max_load"], lower)
    return {
        "scheme": scheme,
        "p": p,
        "bins": len(sizes),
        "max_load": balance["max_load"],
        "mean_load": balance["mean_load"],
        "skew": balance["skew"],
        "idle_fraction": balance["idle_fraction"],
        "makespan_over_lower_bound": 1.0 if ratio is None else ratio,
    }


def compare_partitioners(sizes: Dict[int, float], p: int) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    Loads of the hash partitioner and of an LPT schedule on exact sizes.

    Returns:
        (summary with one row per scheme, per-partition load series)
    """
    hash_loads = partition_loads(sizes, p, lambda b: default_partition(b, p))
    lpt_loads = lpt_schedule(sizes, p).loads
    summary = pd.DataFrame(
        [_summary_row("hash", hash_loads, sizes, p), _summary_row("lpt", lpt_loads, sizes, p)]
    )
    series = pd.concat(
        [
            pd.DataFrame({"scheme": "hash", "partition": range(p), "load": hash_loads}),
            pd.DataFrame({"scheme": "lpt", "partition": range(p), "load": lpt_loads}),
        ],
        ignore_index=True,
    )
    return summary, series


def sampled_comparison(config: RunConfig, inputs: Sequence[str]) -> pd.DataFrame:
    """
    Schedule from a sample, judged on exact bin sizes, against hash.

    The exact table comes from a full-fraction estimate over the same input.
    """
    binner = Binner(config.granularity, config.bins)
    p = config.p

    def estimate(fraction: float) -> Dict[int, float]:
        return estimate_bin_sizes(
            iter_records(inputs, config.input_format), fraction, config.k, config.m, binner, config.seed
        ).sizes

    exact = estimate(1.0)
    pmap = lpt_schedule(estimate(config.sample_fraction), p)
    rows = [
        _summary_row("hash", partition_loads(exact, p, lambda b: default_partition(b, p)), exact, p),
        _summary_row(
            f"lpt@{config.sample_fraction:g}",
            partition_loads(exact, p, lambda b: lookup_partition(pmap, b)),
            exact,
            p,
        ),
        _summary_row("lpt@exact", lpt_schedule(exact, p).loads, exact, p),
    ]
    return pd.DataFrame(rows)


def throughput(config: RunConfig, inputs: Sequence[str], out_dir: str) -> Dict[str, float]:
    """Run the pipeline once and report MB/s per stage."""
    input_mb = sum(os.path.getsize(path) for path in inputs) / 1e6
    report = run(replace(config, output_dir=out_dir), inputs)
    row = {"input_mb": input_mb, "kmers": report.total_kmers}
    for stage, seconds in report.stage_seconds.items():
        row[f"{stage}_seconds"] = seconds
        row[f"{stage}_mb_per_s"] = input_mb / seconds if seconds else float("inf")
    return row


def run_bench(
    out_dir: str,
    distribution: str = "zipf",
    n_bins: int = 10_000,
    p: int = 32,
    exponent: float = 1.0,
    seed: int = 0,
    corpus_mb: float = 0.0,
    config: Optional[RunConfig] = None,
) -> Dict[str, pd.DataFrame]:
    """
    Run the benchmark and write its tables and plot-ready series to ``out_dir``.

    Returns:
        Named result tables
    """
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    sizes = synthetic_sizes(distribution, n_bins, exponent, seed=seed)
    summary, series = compare_partitioners(sizes, p)
    summary.to_csv(Path(out_dir) / "bench_summary.tsv", sep="\t", index=False)
    series.to_csv(Path(out_dir) / "bench_loads.tsv", sep="\t", index=False)
    tables = {"summary": summary, "loads": series}
    logger.info(f"Benchmarked {distribution} sizes: {n_bins} bins on {p} partitions")

    if corpus_mb > 0 and config is not None:
        with tempfile.TemporaryDirectory(prefix="skc-bench-") as tmp:
            corpus = os.path.join(tmp, "corpus.fa")
            write_synthetic_fasta(corpus, int(corpus_mb * 1e6), seed=seed)
            sampled = sampled_comparison(config, [corpus])
            rate = pd.DataFrame([throughput(config, [corpus], os.path.join(tmp, "out"))])
        sampled.to_csv(Path(out_dir) / "bench_sampled.tsv", sep="\t", index=False)
        rate.to_csv(Path(out_dir) / "bench_throughput.tsv", sep="\t", index=False)
        tables["sampled"] = sampled
        tables["throughput"] = rate

    return tables
