"""
Run metrics: load balance, compression and timing.
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Mapping, Sequence

import numpy as np

from .validators import clamp, safe_divide


@dataclass
class SuperkmerStats:
    """Stage-1 tallies, merged across extraction workers."""

    records: int = 0
    fragments: int = 0
    superkmers: int = 0
    superkmer_symbols: int = 0
    kmers: int = 0
    fallback_records: int = 0

    def merge(self, other: "SuperkmerStats") -> "SuperkmerStats":
        for name in self.__dataclass_fields__:
            setattr(self, name, getattr(self, name) + getattr(other, name))
        return self


@dataclass
class RunReport:
    """Counts summary plus load, compression and timing metrics of one run."""

    k: int
    distinct_kmers: int
    total_kmers: int
    emitted_distinct: int
    emitted_total: int
    partition_loads: List[int]
    predicted_loads: List[float]
    max_load: int
    mean_load: float
    skew: float
    idle_fraction: float
    superkmers: int
    superkmer_symbols: int
    naive_symbols: int
    compression_ratio: float
    fallback_records: int
    stage_seconds: Dict[str, float] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def load_balance(loads: Sequence[float]) -> Dict[str, float]:
    """
    Max, mean, skew (max/mean) and idle fraction (1 - mean/max) of loads.

    An all-zero load vector counts as perfectly balanced.
    """
    arr = np.asarray(loads, dtype=float)
    max_load = float(arr.max()) if arr.size else 0.0
    mean_load = float(arr.mean()) if arr.size else 0.0
    if max_load == 0:
        return {"max_load": 0.0, "mean_load": 0.0, "skew": 1.0, "idle_fraction": 0.0}
    return {
        "max_load": max_load,
        "mean_load": mean_load,
        "skew": safe_divide(max_load, mean_load),
        "idle_fraction": clamp(1.0 - safe_divide(mean_load, max_load), 0.0, 1.0),
    }


class RunAnalyzer:
    """Derives load-balance and compression metrics of one run."""

    def __init__(
        self,
        k: int,
        loads: Sequence[int],
        stats: SuperkmerStats,
        timings: Mapping[str, float],
    ):
        """
        Initialize analyzer.

        Args:
            k: k-mer length
            loads: k-mers counted per partition
            stats: Stage-1 tallies
            timings: Seconds per stage
        """
        self.k = k
        self.loads = [int(x) for x in loads]
        self.stats = stats
        self.timings = timings

    def calculate_load_balance(self) -> Dict[str, float]:
        return load_balance(self.loads)

    def calculate_compression(self) -> Dict[str, Any]:
        """
        Superkmer symbols against naively unfolding every k-mer (k symbols each).

        With no k-mers the ratio is 1.0.
        """
        naive = self.stats.kmers * self.k
        ratio = safe_divide(self.stats.superkmer_symbols, naive)
        return {
            "superkmers": self.stats.superkmers,
            "superkmer_symbols": self.stats.superkmer_symbols,
            "naive_symbols": naive,
            "compression_ratio": 1.0 if ratio is None else ratio,
        }

    def build_report(
        self,
        distinct: int = 0,
        emitted_distinct: int = 0,
        emitted_total: int = 0,
        predicted_loads: Sequence[float] = (),
    ) -> RunReport:
        balance = self.calculate_load_balance()
        return RunReport(
            k=self.k,
            distinct_kmers=distinct,
            total_kmers=sum(self.loads),
            emitted_distinct=emitted_distinct,
            emitted_total=emitted_total,
            partition_loads=list(self.loads),
            predicted_loads=[float(x) for x in predicted_loads],
            max_load=int(balance["max_load"]),
            mean_load=balance["mean_load"],
            skew=balance["skew"],
            idle_fraction=balance["idle_fraction"],
            fallback_records=self.stats.fallback_records,
            stage_seconds={name: round(float(sec), 6) for name, sec in self.timings.items()},
            **self.calculate_compression(),
        )


def compute_metrics(
    k: int,
    loads: Sequence[int],
    stats: SuperkmerStats,
    timings: Mapping[str, float],
    distinct: int = 0,
    emitted_distinct: int = 0,
    emitted_total: int = 0,
    predicted_loads: Sequence[float] = (),
) -> RunReport:
    """Assemble a RunReport from partition loads, stage-1 stats and timings."""
    return RunAnalyzer(k, loads, stats, timings).build_report(
        distinct, emitted_distinct, emitted_total, predicted_loads
    )
