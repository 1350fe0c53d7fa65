"""
Report Generator Module for the superkmer counter.

This module handles:
- Human-readable run summaries (tabulate)
- Machine-readable run reports and manifests (YAML)
- The per-partition load histogram file
"""

from pathlib import Path
from typing import Any, Dict, List, Union

import pandas as pd
import yaml
from tabulate import tabulate

from .metrics import RunReport

REPORT_FILE = "run_report.yaml"
MANIFEST_FILE = "manifest.yaml"
HISTOGRAM_FILE = "partition_loads.tsv"

PathLike = Union[str, Path]


class ReportGenerator:
    """Writes and reads the report files of one output directory."""

    def __init__(self, out_dir: PathLike):
        """
        Initialize report generator.

        Args:
            out_dir: Run output directory
        """
        self.out_dir = Path(out_dir)

    @property
    def report_path(self) -> Path:
        return self.out_dir / REPORT_FILE

    @property
    def manifest_path(self) -> Path:
        return self.out_dir / MANIFEST_FILE

    @property
    def histogram_path(self) -> Path:
        return self.out_dir / HISTOGRAM_FILE

    def generate_all(self, report: RunReport) -> List[Path]:
        """Report, manifest and load histogram for a finished run."""
        return [
            self.write_report(report),
            self.write_manifest(report, [Path(p).name for p in report.outputs]),
            self.write_histogram(report),
        ]

    def write_report(self, report: RunReport) -> Path:
        with open(self.report_path, "w", encoding="utf-8") as f:
            yaml.safe_dump(report.to_dict(), f, sort_keys=False)
        return self.report_path

    def load_report(self) -> Dict[str, Any]:
        with open(self.report_path, "r", encoding="utf-8") as f:
            return yaml.safe_load(f) or {}

    def write_manifest(self, report: RunReport, files: List[str]) -> Path:
        """List output files with k, counting mode and summary totals."""
        manifest = {
            "files": files,
            "k": report.k,
            "mode": "canonical" if report.config.get("canonical", True) else "forward",
            "format": report.config.get("output_format", "tsv"),
            "min_count": report.config.get("min_count", 1),
            "distinct": report.emitted_distinct,
            "total": report.emitted_total,
        }
        with open(self.manifest_path, "w", encoding="utf-8") as f:
            yaml.safe_dump(manifest, f, sort_keys=False)
        return self.manifest_path

    def load_manifest(self) -> Dict[str, Any]:
        with open(self.manifest_path, "r", encoding="utf-8") as f:
            return yaml.safe_load(f) or {}

    def write_histogram(self, report: RunReport) -> Path:
        """``partition TAB kmers TAB predicted`` per partition."""
        self.load_frame(report).to_csv(self.histogram_path, sep="\t", index=False)
        return self.histogram_path

    def load_histogram(self) -> pd.DataFrame:
        return pd.read_csv(self.histogram_path, sep="\t")

    @staticmethod
    def load_frame(report: RunReport) -> pd.DataFrame:
        """Per-partition actual and predicted loads."""
        predicted = report.predicted_loads or [0.0] * len(report.partition_loads)
        return pd.DataFrame(
            {
                "partition": range(len(report.partition_loads)),
                "kmers": report.partition_loads,
                "predicted": predicted,
            }
        )

    @staticmethod
    def render_summary(report: Dict[str, Any]) -> str:
        """Key metrics of a run as a pipe table."""
        config = report.get("config", {})
        rows = [
            ["k", report["k"]],
            ["m", config.get("m", "N/A")],
            ["Granularity", config.get("granularity", "N/A")],
            ["Partitioner", config.get("partitioner", "N/A")],
            ["Partitions", len(report["partition_loads"])],
            ["Distinct k-mers", f"{report['distinct_kmers']:,}"],
            ["Total k-mers", f"{report['total_kmers']:,}"],
            ["Emitted distinct / total", f"{report['emitted_distinct']:,} / {report['emitted_total']:,}"],
            ["Superkmers", f"{report['superkmers']:,}"],
            ["Compression ratio", f"{report['compression_ratio']:.3f}"],
            ["Max load (makespan)", f"{report['max_load']:,}"],
            ["Mean load", f"{report['mean_load']:,.1f}"],
            ["Skew (max/mean)", f"{report['skew']:.3f}"],
            ["Idle fraction", f"{report['idle_fraction']:.1%}"],
            ["Unsampled-bin records", f"{report['fallback_records']:,}"],
        ]
        for stage, seconds in report.get("stage_seconds", {}).items():
            rows.append([f"Time: {stage}", f"{seconds:.3f}s"])
        return tabulate(rows, headers=["Metric", "Value"], tablefmt="pipe")

    @staticmethod
    def render_loads(report: Dict[str, Any], limit: int = 20) -> str:
        """Heaviest partitions, actual vs predicted load."""
        loads = report["partition_loads"]
        predicted = report.get("predicted_loads") or [None] * len(loads)
        order = sorted(range(len(loads)), key=lambda pid: (-loads[pid], pid))[:limit]
        rows = [
            [pid, loads[pid], "N/A" if predicted[pid] is None else f"{predicted[pid]:,.0f}"]
            for pid in order
        ]
        return tabulate(rows, headers=["Partition", "K-mers", "Predicted"], tablefmt="pipe")
