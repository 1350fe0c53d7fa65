"""
Two-stage counting pipeline.

Sampling pass (LPT only) -> schedule -> stage 1 extraction into per-partition
spools -> barrier -> stage 2 counting, one partition per task.

Stage 1: the calling thread parses input and feeds fragment batches to a
shared queue; extraction workers turn them into superkmers and append each
to the spool of its partition. Stage 2 starts only after every extraction
worker has been joined.
"""

import queue
import shutil
import sys
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import ExitStack
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from tqdm import tqdm

from .config import RunConfig
from .counting_engine import (
    FORMAT_SUFFIX,
    CountSummary,
    count_partition,
    sort_counts,
    write_counts,
)
from .exceptions import OutputError, PipelineError, SamplingError, SkcException
from .logger import get_logger
from .metrics import RunReport, SuperkmerStats, compute_metrics
from .partitioning import (
    Binner,
    PartitionMap,
    estimate_bin_sizes,
    lookup_partition,
    lpt_schedule,
)
from .report_generator import ReportGenerator
from .sequence_io import Fragment, fragment, iter_records
from .signature_engine import SuperkmerRecord, extract_superkmers
from .spool_manager import SpoolManager

logger = get_logger(__name__)

BATCH_SIZE = 256
_DONE = None


class ShuffleBuffer:
    """Per-partition superkmer collections keyed through a PartitionMap."""

    def __init__(self, pmap: PartitionMap, binner: Binner, spill_dir: Optional[str] = None):
        self.pmap = pmap
        self.binner = binner
        self.spools = SpoolManager(pmap.p, spill_dir)
        self._loads = [0] * pmap.p
        self._lock = threading.Lock()

    @property
    def partitions(self) -> int:
        return self.pmap.p

    def route(self, record: SuperkmerRecord) -> Tuple[int, bool]:
        """(partition, whether the bin was scheduled)."""
        bin_id = self.binner(record.signature)
        return lookup_partition(self.pmap, bin_id), self.pmap.covers(bin_id)

    def append(self, record: SuperkmerRecord) -> Tuple[int, bool]:
        partition, scheduled = self.route(record)
        self.spools.append(partition, record)
        with self._lock:
            self._loads[partition] += record.kmer_count
        return partition, scheduled

    def records(self, partition: int) -> Iterable[SuperkmerRecord]:
        return self.spools.read(partition)

    def record_count(self, partition: int) -> int:
        return self.spools.size(partition)

    @property
    def loads(self) -> List[int]:
        """k-mers routed to each partition."""
        return list(self._loads)

    def clear(self) -> None:
        self.spools.clear()


def shuffle(
    streams: Sequence[Iterable[SuperkmerRecord]],
    pmap: PartitionMap,
    binner: Binner,
    spill_dir: Optional[str] = None,
    workers: int = 1,
) -> ShuffleBuffer:
    """
    Route stage-1 output streams into per-partition collections.

    Streams are drained concurrently; the per-partition multiset does not
    depend on how producers interleave.
    """
    buffer = ShuffleBuffer(pmap, binner, spill_dir)

    def drain(stream: Iterable[SuperkmerRecord]) -> int:
        n = 0
        for record in stream:
            buffer.append(record)
            n += 1
        return n

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        routed = sum(pool.map(drain, streams))
    logger.debug(f"Shuffled {routed} superkmers into {pmap.p} partitions")
    return buffer


@dataclass
class PartitionResult:
    partition: int
    distinct: int
    kmers: int
    emitted: CountSummary
    path: Optional[str] = None
    counts: Dict[str, int] = field(default_factory=dict)


@dataclass
class PipelineResult:
    report: RunReport
    counts: Dict[str, int] = field(default_factory=dict)


def build_partition_map(config: RunConfig, inputs: Sequence[str], binner: Binner) -> PartitionMap:
    """LPT schedule from a sample, or an empty map for the hash partitioner."""
    if config.partitioner == "hash":
        return PartitionMap.hash_only(config.p)
    try:
        estimate = estimate_bin_sizes(
            iter_records(inputs, config.input_format),
            config.sample_fraction,
            config.k,
            config.m,
            binner,
            config.seed,
        )
    except SamplingError as e:
        logger.warning(f"{e}; every bin takes the hash fallback")
        return PartitionMap.hash_only(config.p)
    pmap = lpt_schedule(estimate, config.p)
    logger.info(
        f"LPT schedule: {len(pmap.assignment)} bins on {pmap.p} partitions, "
        f"predicted makespan {pmap.makespan:,.0f}"
    )
    return pmap


def _extract_worker(
    work: "queue.Queue[Optional[List[Fragment]]]",
    buffer: ShuffleBuffer,
    config: RunConfig,
    stats: SuperkmerStats,
    errors: List[BaseException],
) -> None:
    while True:
        batch = work.get()
        if batch is _DONE:
            work.put(_DONE)  # put it back for the other workers
            return
        if errors:
            continue
        try:
            for frag in batch:
                stats.fragments += 1
                for record in extract_superkmers(frag, config.k, config.m):
                    _, scheduled = buffer.append(record)
                    stats.superkmers += 1
                    stats.superkmer_symbols += record.seq.length
                    stats.kmers += record.kmer_count
                    if not scheduled and config.partitioner == "lpt":
                        stats.fallback_records += 1
        except BaseException as e:  # re-raised by the orchestrating thread
            errors.append(e)


def run_stage1(
    config: RunConfig,
    inputs: Sequence[str],
    buffer: ShuffleBuffer,
    progress: bool = False,
) -> SuperkmerStats:
    """Parse, fragment and extract superkmers into the shuffle buffer."""
    work: "queue.Queue[Optional[List[Fragment]]]" = queue.Queue(maxsize=4 * config.workers)
    errors: List[BaseException] = []
    per_worker = [SuperkmerStats() for _ in range(config.workers)]
    threads = [
        threading.Thread(
            target=_extract_worker,
            args=(work, buffer, config, per_worker[i], errors),
            name=f"extract-{i}",
            daemon=True,
        )
        for i in range(config.workers)
    ]
    for thread in threads:
        thread.start()

    n_records = 0
    read_error: Optional[BaseException] = None
    try:
        batch: List[Fragment] = []
        records = iter_records(inputs, config.input_format)
        for record in tqdm(records, desc="Stage 1", unit=" rec", disable=not progress, file=sys.stderr):
            n_records += 1
            batch.extend(fragment(record, config.k))
            if len(batch) >= BATCH_SIZE:
                work.put(batch)
                batch = []
            if errors:
                break
        if batch:
            work.put(batch)
    except BaseException as e:
        read_error = e
    finally:
        work.put(_DONE)
        # barrier: stage 2 never starts before every producer is done
        for thread in threads:
            thread.join()

    if read_error is not None:
        if isinstance(read_error, SkcException):
            raise PipelineError("read", str(read_error)) from read_error
        raise read_error
    if errors:
        raise PipelineError("extract", str(errors[0])) from errors[0]

    stats = SuperkmerStats(records=n_records)
    for part in per_worker:
        stats.merge(part)
    return stats


def _count_one(
    partition: int,
    buffer: ShuffleBuffer,
    config: RunConfig,
    out_dir: Optional[Path],
    collect: bool,
) -> PartitionResult:
    counts = list(
        count_partition(
            buffer.records(partition),
            config.k,
            config.canonical,
            config.max_table_entries,
        )
    )
    if config.sorted_output:
        counts = sort_counts(counts)
    distinct = len(counts)
    kmers = sum(kc.count for kc in counts)

    path = None
    if out_dir is not None:
        path = out_dir / f"part-{partition}{FORMAT_SUFFIX[config.output_format]}"
        try:
            with open(path, "wb") as sink:
                emitted = write_counts(
                    counts, sink, config.output_format, config.min_count, config.k, partition
                )
        except OSError as e:
            raise OutputError(str(e), partition) from e
    else:
        kept = [kc for kc in counts if kc.count >= config.min_count]
        emitted = CountSummary(len(kept), sum(kc.count for kc in kept))

    collected = {}
    if collect:
        collected = {str(kc.kmer): kc.count for kc in counts if kc.count >= config.min_count}
    logger.debug(f"Partition {partition}: {distinct} distinct, {kmers} k-mers")
    return PartitionResult(partition, distinct, kmers, emitted, str(path) if path else None, collected)


def run_stage2(
    config: RunConfig,
    buffer: ShuffleBuffer,
    out_dir: Optional[Path],
    collect: bool = False,
    progress: bool = False,
) -> List[PartitionResult]:
    """Count every partition; the executor's task queue is the shared work list."""
    try:
        with ThreadPoolExecutor(max_workers=config.workers, thread_name_prefix="count") as pool:
            futures = [
                pool.submit(_count_one, pid, buffer, config, out_dir, collect)
                for pid in range(buffer.partitions)
            ]
            results = [
                f.result()
                for f in tqdm(futures, desc="Stage 2", unit=" part", disable=not progress, file=sys.stderr)
            ]
    except SkcException as e:
        raise PipelineError("count", str(e)) from e
    return results


def execute(
    config: RunConfig,
    inputs: Sequence[str],
    collect: bool = False,
    progress: bool = False,
) -> PipelineResult:
    """
    Run the whole pipeline.

    Args:
        config: Run configuration (validated here)
        inputs: FASTA/FASTQ paths, '-' for stdin
        collect: Also return every emitted k-mer count in memory
        progress: Show a stderr progress ticker

    Returns:
        PipelineResult with the RunReport (and counts if collected)
    """
    config.validate()
    binner = Binner(config.granularity, config.bins)
    timings: Dict[str, float] = {}

    with ExitStack() as stack:
        inputs = _materialize_stdin(inputs, config, stack)

        started = time.perf_counter()
        pmap = build_partition_map(config, inputs, binner)
        timings["schedule"] = time.perf_counter() - started

        started = time.perf_counter()
        buffer = ShuffleBuffer(pmap, binner, config.spill_dir)
        stack.callback(buffer.clear)
        stats = run_stage1(config, inputs, buffer, progress)
        timings["extract"] = time.perf_counter() - started
        logger.info(
            f"Stage 1: {stats.records} records, {stats.superkmers} superkmers, {stats.kmers} k-mers"
        )

        out_dir = Path(config.output_dir) if config.output_dir else None
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)

        started = time.perf_counter()
        results = run_stage2(config, buffer, out_dir, collect, progress)
        timings["count"] = time.perf_counter() - started

    report = compute_metrics(
        config.k,
        buffer.loads,
        stats,
        timings,
        distinct=sum(r.distinct for r in results),
        emitted_distinct=sum(r.emitted.distinct for r in results),
        emitted_total=sum(r.emitted.total for r in results),
        predicted_loads=pmap.loads if config.partitioner == "lpt" else (),
    )
    report.config = config.to_dict()
    report.outputs = [r.path for r in results if r.path]
    logger.info(
        f"Stage 2: {report.distinct_kmers} distinct k-mers, skew {report.skew:.3f}, "
        f"compression {report.compression_ratio:.3f}"
    )

    if out_dir is not None:
        ReportGenerator(out_dir).generate_all(report)

    counts: Dict[str, int] = {}
    for result in results:
        counts.update(result.counts)
    return PipelineResult(report, counts)


def run(config: RunConfig, inputs: Sequence[str], progress: bool = False) -> RunReport:
    """Run the pipeline and return its RunReport."""
    return execute(config, inputs, progress=progress).report


def _materialize_stdin(inputs: Sequence[str], config: RunConfig, stack: ExitStack) -> List[str]:
    """Copy stdin to a temporary file when the input has to be read twice."""
    inputs = list(inputs)
    if "-" not in inputs or config.partitioner != "lpt":
        return inputs
    tmp = stack.enter_context(
        tempfile.NamedTemporaryFile(prefix="skc-stdin-", dir=config.spill_dir)
    )
    shutil.copyfileobj(sys.stdin.buffer, tmp)
    tmp.flush()
    return [tmp.name if path == "-" else path for path in inputs]
