"""
Run configuration for the superkmer counter.

Defaults follow the tuned values: m=10, 8192 bins in bin-granularity mode,
signature granularity with the LPT partitioner, a 1% sample, and four
partitions per worker.
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

from . import config_loader
from .exceptions import ConfigurationError
from .partitioning import DEFAULT_BINS, GRANULARITIES
from .sequence_io import FORMATS
from .signature_engine import DEFAULT_M, MAX_M
from .validators import ValidationError, validate_choice, validate_numeric_range

# =============================================================================
# DEFAULTS
# =============================================================================

MAX_K = 512
MIN_M = 3
DEFAULT_SAMPLE_FRACTION = 0.01
PARTITIONS_PER_WORKER = 4
PARTITIONERS = ("lpt", "hash")
OUTPUT_FORMATS = ("tsv", "bin")


@dataclass
class RunConfig:
    """Every knob of one counting run."""

    k: int
    m: int = DEFAULT_M
    granularity: str = "signature"
    bins: int = DEFAULT_BINS
    partitions: Optional[int] = None
    partitioner: str = "lpt"
    sample_fraction: float = DEFAULT_SAMPLE_FRACTION
    seed: int = 0
    workers: int = field(default_factory=config_loader.default_workers)
    canonical: bool = True
    min_count: int = 1
    sorted_output: bool = False
    output_format: str = "tsv"
    output_dir: Optional[str] = None
    input_format: str = "auto"
    spill_dir: Optional[str] = field(default_factory=config_loader.spill_dir)
    max_table_entries: Optional[int] = None

    @property
    def p(self) -> int:
        """Partition count; defaults to four per worker."""
        return self.partitions if self.partitions else PARTITIONS_PER_WORKER * self.workers

    def validate(self) -> "RunConfig":
        """
        Check every invariant.

        Raises:
            ConfigurationError: Naming the offending field
        """
        try:
            validate_numeric_range(self.k, "k", 1, MAX_K, allow_none=False)
            validate_numeric_range(self.m, "m", MIN_M, min(self.k, MAX_M), allow_none=False)
            validate_choice(self.granularity, "granularity", GRANULARITIES)
            validate_numeric_range(self.bins, "bins", 1, allow_none=False)
            validate_numeric_range(self.partitions, "partitions", 1)
            validate_choice(self.partitioner, "partitioner", PARTITIONERS)
            validate_numeric_range(
                self.sample_fraction, "sample_fraction", 0.0, 1.0, allow_none=False, exclusive_min=True
            )
            validate_numeric_range(self.workers, "workers", 1, allow_none=False)
            validate_numeric_range(self.min_count, "min_count", 1, allow_none=False)
            validate_choice(self.output_format, "output_format", OUTPUT_FORMATS)
            validate_choice(self.input_format, "input_format", FORMATS)
            validate_numeric_range(self.max_table_entries, "max_table_entries", 1)
        except ValidationError as e:
            raise ConfigurationError(str(e)) from e
        return self

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["p"] = self.p
        return data
