#!/usr/bin/env python3
"""
Superkmer counter command-line front end.

Subcommands:
- count     Run the two-stage counting pipeline
- estimate  Sample the input and preview the LPT schedule
- bench     Compare the hash and LPT partitioners on synthetic bin sizes
- verify    Check pipeline output against the brute-force counter
- report    Render the report of a finished run
"""

import argparse
import os
import shutil
import sys
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional

from colorama import Fore, Style, init
from tabulate import tabulate

# Initialize colorama
init(autoreset=True)

# Add src to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src import __version__
from src import config_loader
from src.bench import DISTRIBUTIONS, run_bench
from src.config import (
    DEFAULT_SAMPLE_FRACTION,
    OUTPUT_FORMATS,
    PARTITIONERS,
    RunConfig,
)
from src.counting_engine import read_counts
from src.exceptions import ConfigurationError, SkcException
from src.logger import get_logger, init_logging
from src.oracle import first_divergence, oracle_counts
from src.partitioning import (
    DEFAULT_BINS,
    Binner,
    default_partition,
    estimate_bin_sizes,
    lpt_bound,
    lpt_schedule,
    partition_loads,
)
from src.pipeline import execute
from src.report_generator import ReportGenerator
from src.sequence_io import FORMATS, iter_records
from src.signature_engine import DEFAULT_M
from src.visualizations import ChartGenerator

VERIFY_LIMIT_BYTES = 100 * 1000 * 1000
PARTITION_MAP_FILE = "partition_map.tsv"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


@dataclass
class CliInvocation:
    """Parsed and validated command line."""

    command: str
    config: Optional[RunConfig] = None
    inputs: List[str] = field(default_factory=list)
    output_dir: Optional[str] = None
    options: Dict[str, Any] = field(default_factory=dict)
    log_level: str = "INFO"
    quiet: bool = False


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=None,
        help="Set logging level (default: INFO, or SKC_LOG_LEVEL)",
    )
    common.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Verbose output (equivalent to --log-level DEBUG)",
    )
    common.add_argument(
        "--quiet",
        "-q",
        action="store_true",
        help="Quiet mode (no banner, progress or summary)",
    )
    return common


def _run_parser() -> argparse.ArgumentParser:
    """Flags that map onto RunConfig fields."""
    run = argparse.ArgumentParser(add_help=False)
    run.add_argument("-k", type=int, required=True, help="k-mer length (1..512)")
    run.add_argument("-m", type=int, default=DEFAULT_M, help=f"signature length (3..min(k,31), default: {DEFAULT_M})")
    run.add_argument(
        "--bins",
        type=int,
        metavar="B",
        default=None,
        help=f"hash signatures into B bins (bin granularity; typical: {DEFAULT_BINS})",
    )
    run.add_argument(
        "--signature-granularity",
        action="store_true",
        help="one bin per distinct signature (the default when --bins is absent)",
    )
    run.add_argument("-p", "--partitions", type=int, default=None, help="partition count (default: 4 x workers)")
    run.add_argument("--partitioner", choices=PARTITIONERS, default="lpt", help="partitioner (default: lpt)")
    run.add_argument(
        "--sample-fraction",
        type=float,
        default=DEFAULT_SAMPLE_FRACTION,
        help=f"fraction of records sampled for LPT (default: {DEFAULT_SAMPLE_FRACTION})",
    )
    run.add_argument("--seed", type=int, default=0, help="sampling seed (default: 0)")
    run.add_argument(
        "--workers",
        type=int,
        default=None,
        help="worker threads (default: SKC_WORKERS or CPU count)",
    )
    run.add_argument("--forward-only", action="store_true", help="count forward k-mers (default: canonical)")
    run.add_argument("--min-count", type=int, default=1, help="drop k-mers seen fewer times (default: 1)")
    run.add_argument("--sorted", action="store_true", help="sort each partition file lexicographically")
    run.add_argument("--format", choices=OUTPUT_FORMATS, default="tsv", help="output format (default: tsv)")
    run.add_argument("--max-table-entries", type=int, default=None, help="per-partition table entry budget")
    run.add_argument(
        "--input-format",
        choices=FORMATS,
        default="auto",
        help="input format (default: auto)",
    )
    run.add_argument(
        "--spill-dir",
        metavar="DIR",
        default=None,
        help="spill the shuffle to DIR (default: SKC_SPILL_DIR, else memory)",
    )
    return run


def setup_argument_parser() -> argparse.ArgumentParser:
    """
    Set up command-line argument parser.

    Returns:
        ArgumentParser instance
    """
    parser = argparse.ArgumentParser(
        prog="skc",
        description="Multi-threaded exact k-mer counting with superkmers and LPT partitioning",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s count -k 28 -m 10 reads.fa -o out/
  %(prog)s count -k 31 --partitioner hash --bins 8192 reads.fq.gz -o out/
  %(prog)s estimate -k 28 reads.fa -o out/
  %(prog)s bench --distribution zipf --zipf-exponent 1.0 -p 32 -o bench/
  %(prog)s verify -k 21 small.fa
  %(prog)s report out/ --plot
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = _common_parser()
    run = _run_parser()
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    count = sub.add_parser("count", parents=[common, run], help="count k-mers")
    count.add_argument("inputs", nargs="+", metavar="INPUT", help="FASTA/FASTQ files (gzip ok), '-' for stdin")
    count.add_argument("-o", "--output", required=True, metavar="DIR", help="output directory, '-' for TSV on stdout")

    estimate = sub.add_parser("estimate", parents=[common, run], help="preview the LPT schedule")
    estimate.add_argument("inputs", nargs="+", metavar="INPUT")
    estimate.add_argument("-o", "--output", metavar="DIR", help=f"write {PARTITION_MAP_FILE} to DIR")

    bench = sub.add_parser("bench", parents=[common], help="compare hash and LPT partitioners")
    bench.add_argument(
        "--distribution", choices=DISTRIBUTIONS, default="zipf", help="bin-size distribution (default: zipf)"
    )
    bench.add_argument("--zipf-exponent", type=float, default=1.0, help="Zipf exponent (default: 1.0)")
    bench.add_argument("--bins", type=int, default=10_000, help="number of bins (default: 10000)")
    bench.add_argument("-p", "--partitions", type=int, default=32, help="partition count (default: 32)")
    bench.add_argument("--seed", type=int, default=0, help="generator seed (default: 0)")
    bench.add_argument(
        "--corpus-mb",
        type=float,
        default=0.0,
        help="also run the pipeline on a synthetic FASTA of this size (default: 0, off)",
    )
    bench.add_argument("-k", type=int, default=31, help="k for the corpus run (default: 31)")
    bench.add_argument("-m", type=int, default=DEFAULT_M, help=f"m for the corpus run (default: {DEFAULT_M})")
    bench.add_argument("--workers", type=int, default=None, help="worker threads for the corpus run")
    bench.add_argument("--no-plot", action="store_true", help="skip the PNG chart")
    bench.add_argument("-o", "--output", default="bench", metavar="DIR", help="output directory (default: bench)")

    verify = sub.add_parser("verify", parents=[common, run], help="compare with the brute-force counter")
    verify.add_argument("inputs", nargs="+", metavar="INPUT")
    verify.add_argument("--against", metavar="DIR", help="check an existing output directory instead of running")

    report = sub.add_parser("report", parents=[common], help="render the report of a finished run")
    report.add_argument("run_dir", metavar="DIR", help="output directory of a count run")
    report.add_argument("--limit", type=int, default=20, help="partitions listed (default: 20)")
    report.add_argument("--plot", action="store_true", help="write partition_loads.png into DIR")

    return parser


def _config_from_args(args: argparse.Namespace, output_dir: Optional[str]) -> RunConfig:
    if args.bins is not None and args.signature_granularity:
        raise ConfigurationError("--bins cannot be combined with --signature-granularity")
    kwargs: Dict[str, Any] = {}
    if args.workers is not None:
        kwargs["workers"] = args.workers
    if args.spill_dir is not None:
        kwargs["spill_dir"] = args.spill_dir
    config = RunConfig(
        k=args.k,
        m=args.m,
        granularity="bin" if args.bins is not None else "signature",
        bins=args.bins if args.bins is not None else DEFAULT_BINS,
        partitions=args.partitions,
        partitioner=args.partitioner,
        sample_fraction=args.sample_fraction,
        seed=args.seed,
        canonical=not args.forward_only,
        min_count=args.min_count,
        sorted_output=args.sorted,
        output_format=args.format,
        output_dir=output_dir,
        input_format=args.input_format,
        max_table_entries=args.max_table_entries,
        **kwargs,
    )
    return config.validate()


def _verify_oversize(paths: List[str]) -> Optional[str]:
    size = sum(os.path.getsize(path) for path in paths)
    if size > VERIFY_LIMIT_BYTES:
        return f"input is {size / 1e6:.0f} MB; verify is limited to {VERIFY_LIMIT_BYTES // 1000000} MB"
    return None


def parse_args(argv: Optional[List[str]] = None) -> CliInvocation:
    """
    Parse and validate a command line.

    Usage errors (unknown flags, out-of-range values, conflicting flags)
    print the usage text and exit with status 2.
    """
    parser = setup_argument_parser()
    args = parser.parse_args(argv)

    log_level = "ERROR" if args.quiet else "DEBUG" if args.verbose else args.log_level or config_loader.log_level()
    invocation = CliInvocation(command=args.command, log_level=log_level, quiet=args.quiet)

    try:
        if args.command in ("count", "estimate", "verify"):
            output = getattr(args, "output", None)
            if output == "-" and args.format != "tsv":
                raise ConfigurationError("-o - writes TSV only; drop --format bin")
            run_dir = output if args.command == "count" and output != "-" else None
            invocation.config = _config_from_args(args, run_dir)
            invocation.inputs = list(args.inputs)
            invocation.output_dir = output
            if args.command == "estimate" and "-" in invocation.inputs:
                raise ConfigurationError("estimate needs seekable inputs; '-' is not supported")
            if args.command == "verify":
                oversize = _verify_oversize([p for p in invocation.inputs if p != "-" and os.path.isfile(p)])
                if oversize:
                    raise ConfigurationError(oversize)
                invocation.options["against"] = args.against
        elif args.command == "bench":
            if args.bins < 1 or args.partitions < 1:
                raise ConfigurationError("--bins and -p must be >= 1")
            if args.corpus_mb < 0:
                raise ConfigurationError("--corpus-mb must be >= 0")
            invocation.output_dir = args.output
            invocation.options = {
                "distribution": args.distribution,
                "exponent": args.zipf_exponent,
                "n_bins": args.bins,
                "p": args.partitions,
                "seed": args.seed,
                "corpus_mb": args.corpus_mb,
                "plot": not args.no_plot,
            }
            if args.corpus_mb > 0:
                kwargs = {"workers": args.workers} if args.workers is not None else {}
                invocation.config = RunConfig(k=args.k, m=args.m, seed=args.seed, **kwargs).validate()
        else:
            invocation.output_dir = args.run_dir
            invocation.options = {"limit": args.limit, "plot": args.plot}
    except ConfigurationError as e:
        parser.error(str(e))

    return invocation


def print_banner():
    """Print application banner."""
    banner = f"""
{Fore.CYAN}{'=' * 60}
  SKC - Superkmer Counter
  Version {__version__}
{'=' * 60}{Style.RESET_ALL}
    """
    print(banner, file=sys.stderr)


def cmd_count(inv: CliInvocation) -> int:
    to_stdout = inv.output_dir == "-"
    result = execute(inv.config, inv.inputs, collect=to_stdout, progress=not inv.quiet)

    if to_stdout:
        items = sorted(result.counts.items()) if inv.config.sorted_output else result.counts.items()
        out = sys.stdout.buffer
        for kmer, count in items:
            out.write(f"{kmer}\t{count}\n".encode("ascii"))
        out.flush()

    if not inv.quiet:
        stream = sys.stderr if to_stdout else sys.stdout
        print(ReportGenerator.render_summary(result.report.to_dict()), file=stream)
        if not to_stdout:
            written = len(result.report.outputs)
            print(f"\n{Fore.GREEN}✓ Wrote {written} partition files to {inv.output_dir}{Style.RESET_ALL}")
    return EXIT_OK


def cmd_estimate(inv: CliInvocation) -> int:
    config = inv.config
    binner = Binner(config.granularity, config.bins)
    estimate = estimate_bin_sizes(
        iter_records(inv.inputs, config.input_format),
        config.sample_fraction,
        config.k,
        config.m,
        binner,
        config.seed,
    )
    p = config.p
    pmap = lpt_schedule(estimate, p)
    hash_loads = partition_loads(estimate.sizes, p, lambda b: default_partition(b, p))
    lower = max(estimate.total / p, max(estimate.sizes.values()))

    rows = [
        ["Sampled records", f"{estimate.sampled_records:,}"],
        ["Sampled k-mers", f"{estimate.sampled_kmers:,}"],
        ["Bins", f"{len(estimate.sizes):,}"],
        ["Estimated k-mers", f"{estimate.total:,.0f}"],
        ["Partitions", p],
        ["LPT predicted makespan", f"{pmap.makespan:,.0f}"],
        ["Hash predicted makespan", f"{max(hash_loads):,.0f}"],
        ["Lower bound", f"{lower:,.0f}"],
        ["LPT guarantee", f"{lpt_bound(p):.4f} x optimum"],
    ]
    print(tabulate(rows, headers=["Metric", "Value"], tablefmt="pipe"))

    if inv.output_dir:
        Path(inv.output_dir).mkdir(parents=True, exist_ok=True)
        path = Path(inv.output_dir) / PARTITION_MAP_FILE
        pmap.dump(path)
        if not inv.quiet:
            print(f"\n{Fore.GREEN}✓ Partition map written to {path}{Style.RESET_ALL}")
    return EXIT_OK


def cmd_bench(inv: CliInvocation) -> int:
    opts = inv.options
    tables = run_bench(
        inv.output_dir,
        distribution=opts["distribution"],
        n_bins=opts["n_bins"],
        p=opts["p"],
        exponent=opts["exponent"],
        seed=opts["seed"],
        corpus_mb=opts["corpus_mb"],
        config=inv.config,
    )
    print(tabulate(tables["summary"], headers="keys", tablefmt="pipe", showindex=False, floatfmt=".4f"))
    if "sampled" in tables:
        print()
        print(tabulate(tables["sampled"], headers="keys", tablefmt="pipe", showindex=False, floatfmt=".4f"))
        print()
        print(tabulate(tables["throughput"], headers="keys", tablefmt="pipe", showindex=False, floatfmt=".3f"))
    if opts["plot"]:
        charts = ChartGenerator(inv.output_dir)
        title = f"{opts['distribution']} bin sizes, {opts['n_bins']} bins, p={opts['p']}"
        path = charts.save(charts.create_partitioner_chart(tables["loads"], title), "bench_loads")
        if not inv.quiet:
            print(f"\n{Fore.GREEN}✓ Chart written to {path}{Style.RESET_ALL}")
    return EXIT_OK


def _observed_from_dir(run_dir: str, config: RunConfig) -> Dict[str, int]:
    manifest = ReportGenerator(run_dir).load_manifest()
    mode = "canonical" if config.canonical else "forward"
    if manifest.get("k") != config.k or manifest.get("mode") != mode:
        raise ConfigurationError(
            f"{run_dir} holds k={manifest.get('k')} {manifest.get('mode')} counts, "
            f"not k={config.k} {mode}"
        )
    observed: Dict[str, int] = {}
    for name in manifest.get("files", []):
        for kmer, count in read_counts(Path(run_dir) / name):
            observed[kmer] = observed.get(kmer, 0) + count
    return observed


def cmd_verify(inv: CliInvocation) -> int:
    """Exit 0 on a match, 1 with the first divergent k-mer, 2 when stdin exceeds the size limit."""
    logger = get_logger()
    config = inv.config
    with tempfile.TemporaryDirectory(prefix="skc-verify-") as tmp:
        inputs = []
        for path in inv.inputs:
            if path == "-":
                path = os.path.join(tmp, "stdin")
                with open(path, "wb") as f:
                    shutil.copyfileobj(sys.stdin.buffer, f)
            inputs.append(path)
        oversize = _verify_oversize(inputs)
        if oversize:
            print(f"skc verify: error: {oversize}", file=sys.stderr)
            return EXIT_USAGE

        if inv.options.get("against"):
            observed = _observed_from_dir(inv.options["against"], config)
        else:
            observed = execute(replace(config, output_dir=None), inputs, collect=True, progress=False).counts
        oracle = oracle_counts(iter_records(inputs, config.input_format), config.k, config.canonical)
        expected = {kmer: count for kmer, count in oracle.items() if count >= config.min_count}

    divergence = first_divergence(observed, expected)
    if divergence is not None:
        logger.error(f"Divergence at {divergence}")
        print(f"{Fore.RED}✗ DIVERGENCE: {divergence}{Style.RESET_ALL}")
        return EXIT_FAILURE
    print(f"OK: {len(expected)} distinct, {sum(expected.values())} total")
    return EXIT_OK


def cmd_report(inv: CliInvocation) -> int:
    reports = ReportGenerator(inv.output_dir)
    report = reports.load_report()
    print(reports.render_summary(report))
    print()
    print(reports.render_loads(report, inv.options["limit"]))
    if inv.options["plot"]:
        charts = ChartGenerator(inv.output_dir)
        path = charts.save(charts.create_load_chart(reports.load_histogram()), "partition_loads")
        if not inv.quiet:
            print(f"\n{Fore.GREEN}✓ Chart written to {path}{Style.RESET_ALL}")
    return EXIT_OK


COMMANDS = {
    "count": cmd_count,
    "estimate": cmd_estimate,
    "bench": cmd_bench,
    "verify": cmd_verify,
    "report": cmd_report,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for command-line usage."""
    try:
        inv = parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    if not inv.quiet:
        print_banner()

    init_logging(
        level=inv.log_level,
        log_file=config_loader.log_file(),
        log_to_console=not inv.quiet,
    )
    logger = get_logger()

    try:
        return COMMANDS[inv.command](inv)

    except SkcException as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"{Fore.RED}✗ {e}{Style.RESET_ALL}", file=sys.stderr)
        return EXIT_FAILURE

    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        print(f"\n{Fore.YELLOW}Interrupted{Style.RESET_ALL}", file=sys.stderr)
        return 130

    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        print(f"{Fore.RED}✗ Unexpected error: {e}{Style.RESET_ALL}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
