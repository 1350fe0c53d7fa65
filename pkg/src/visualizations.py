"""
Visualization Module for the superkmer counter.

This module generates static charts:
- Hash vs LPT partition loads for the benchmark
- Per-partition actual vs predicted load for a finished run
"""

import os
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

plt.style.use("seaborn-v0_8-whitegrid")

COLORS = {
    "primary": "#1f77b4",
    "secondary": "#ff7f0e",
    "neutral": "#7f7f7f",
    "negative": "#d62728",
}


class ChartGenerator:
    """Writes load-balance charts as PNG files."""

    def __init__(self, output_dir: str):
        """
        Initialize ChartGenerator.

        Args:
            output_dir: Directory to save chart files
        """
        self.output_dir = output_dir
        os.makedirs(output_dir, exist_ok=True)

    def create_partitioner_chart(self, loads: pd.DataFrame, title: str = "") -> plt.Figure:
        """
        Sorted partition loads of each scheme, one line per scheme.

        Args:
            loads: Columns ``scheme``, ``partition``, ``load``
            title: Chart title

        Returns:
            Matplotlib Figure
        """
        fig, ax = plt.subplots(figsize=(10, 5))
        palette = [COLORS["primary"], COLORS["secondary"], COLORS["neutral"]]
        for color, (scheme, group) in zip(palette, loads.groupby("scheme", sort=True)):
            ordered = group["load"].sort_values(ascending=False).reset_index(drop=True)
            ax.plot(ordered.index, ordered.values, label=scheme, color=color, linewidth=1.8)
            ax.axhline(ordered.mean(), color=color, linestyle="--", linewidth=0.8)
        ax.set_xlabel("Partition (sorted by load)")
        ax.set_ylabel("K-mers")
        ax.set_title(title or "Partition loads: hash vs LPT")
        ax.legend()
        fig.tight_layout()
        return fig

    def create_load_chart(self, histogram: pd.DataFrame, title: str = "") -> plt.Figure:
        """Bar chart of actual loads with predicted loads overlaid."""
        fig, ax = plt.subplots(figsize=(10, 5))
        ax.bar(histogram["partition"], histogram["kmers"], color=COLORS["primary"], label="actual")
        if histogram["predicted"].any():
            ax.plot(
                histogram["partition"],
                histogram["predicted"],
                color=COLORS["negative"],
                marker=".",
                linewidth=0,
                label="predicted",
            )
        ax.set_xlabel("Partition")
        ax.set_ylabel("K-mers")
        ax.set_title(title or "Per-partition load")
        ax.legend()
        fig.tight_layout()
        return fig

    def save(self, fig: Optional[plt.Figure], name: str) -> Optional[str]:
        """Save a figure as ``<name>.png`` and close it."""
        if fig is None:
            return None
        path = os.path.join(self.output_dir, f"{name}.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        return path
