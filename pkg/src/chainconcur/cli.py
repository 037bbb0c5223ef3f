"""Command-line front end: block dumps in, deterministic CSVs out.

Subcommands:

* ``analyze``  block dump -> per-block metrics CSV
* ``bucket``   metrics CSV -> weighted bucket-series CSV
* ``speedup``  block dump -> per-block (or bucket-aggregated) speed-up CSV
* ``simulate`` block dump -> realized schedule speed-ups (LPT and, where
  feasible, the exact optimum)

Blocks are independent, so ``analyze``, ``speedup`` and ``simulate`` fan out
over a process pool; results are reassembled in block order, making outputs
byte-identical for any worker count. Exit codes: 0 success, 2 usage or data
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import partial
from typing import Callable, Iterable, Sequence

from .graph import BlockGraph, build_account_graph, build_utxo_graph
from .ingest import (BlockRecords, FileFormat, Model, ParseError, load_account,
                     load_utxo)
from .metrics import (BlockMetrics, WeightKind, block_metrics, bucket_series,
                      export_bucket_csv, export_metrics_csv, load_metrics_csv)
from .speedup import (SpeedupEstimate, SpeedupModel, evaluate_block,
                      export_speedup_csv, group_bound_time, perfect_info_time,
                      speculative_time)

EXIT_OK = 0
EXIT_DATA = 2
EXIT_IO = 3

WORKERS_ENV = "CHAINCONCUR_WORKERS"
MAX_BUCKETS = 10000

# Models with closed-form times, usable on bucket-averaged inputs.
_ANALYTICAL_MODELS = (SpeedupModel.SPECULATIVE, SpeedupModel.PERFECT_INFO,
                      SpeedupModel.GROUP_BOUND)
_SCHEDULED_MODELS = (SpeedupModel.SCHEDULED_LPT, SpeedupModel.SCHEDULED_OPT)


class Command(Enum):
    ANALYZE = "analyze"
    BUCKET = "bucket"
    SPEEDUP = "speedup"
    SIMULATE = "simulate"


@dataclass(frozen=True, slots=True)
class PipelineConfig:
    """Validated invocation: one command plus every knob it may consume."""

    command: Command
    model: Model | None
    input_path: str
    output_path: str
    format: FileFormat
    buckets: int | None
    weight_kind: WeightKind
    metric_name: str | None
    cores: tuple[int, ...]
    preproc_cost: Fraction
    worker_count: int


def _positive_int(name: str, raw) -> int:
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{name} must be a positive integer, got {raw!r}")
    return value


def _resolve_workers(flag_value: int | None) -> int:
    if flag_value is not None:
        return _positive_int("--workers", flag_value)
    env = os.environ.get(WORKERS_ENV)
    if env is not None:
        return _positive_int(WORKERS_ENV, env)
    return os.cpu_count() or 1


def _parse_cores(raw: str) -> tuple[int, ...]:
    cores = tuple(_positive_int("--cores entry", part.strip())
                  for part in raw.split(","))
    if not cores:
        raise ValueError("--cores must list at least one core count")
    return cores


def _parse_preproc(raw: str) -> Fraction:
    try:
        value = Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"--preproc must be a non-negative number, got {raw!r}") from None
    if value < 0:
        raise ValueError(f"--preproc must be a non-negative number, got {raw!r}")
    return value


def _check_buckets(count: int) -> int:
    if not 1 <= count <= MAX_BUCKETS:
        raise ValueError(f"--buckets must be in [1, {MAX_BUCKETS}], got {count}")
    return count


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainconcur",
        description="Transaction-concurrency metrics and parallel-execution "
                    "speed-up models for blockchain block dumps.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, with_model=True, with_format=True):
        if with_model:
            p.add_argument("--model", required=True, choices=[m.value for m in Model],
                           help="ledger data model of the input file")
        p.add_argument("--input", required=True, help="input file path")
        p.add_argument("--output", required=True, help="output CSV path")
        if with_format:
            p.add_argument("--format", default=FileFormat.CSV.value,
                           choices=[f.value for f in FileFormat],
                           help="input file format (default: csv)")

    def add_parallel(p):
        p.add_argument("--workers", default=None,
                       help=f"process count (default: ${WORKERS_ENV} or all cores)")

    def add_speedup_knobs(p):
        p.add_argument("--cores", default="1,8,64",
                       help="comma-separated core counts (default: 1,8,64)")
        p.add_argument("--preproc", default="0",
                       help="preprocessing cost K in transaction-execution "
                            "time units (default: 0)")

    p = sub.add_parser("analyze", help="compute per-block concurrency metrics")
    add_io(p)
    add_parallel(p)

    p = sub.add_parser("bucket", help="aggregate a metrics CSV into weighted buckets")
    add_io(p, with_model=False, with_format=False)
    p.add_argument("--metric", required=True, help="metrics column to aggregate")
    p.add_argument("--buckets", required=True, type=int, help="number of buckets")
    p.add_argument("--weight", default=WeightKind.TX_COUNT.value,
                   choices=[w.value for w in WeightKind],
                   help="weighting of the mean (default: tx_count)")

    p = sub.add_parser("speedup", help="evaluate speed-up models per block")
    add_io(p)
    add_speedup_knobs(p)
    p.add_argument("--buckets", type=int, default=None,
                   help="aggregate blocks into buckets and evaluate the "
                        "analytical models on bucket means")
    p.add_argument("--weight", default=WeightKind.TX_COUNT.value,
                   choices=[w.value for w in WeightKind],
                   help="bucket weighting (default: tx_count)")
    add_parallel(p)

    p = sub.add_parser("simulate", help="realize schedules on n cores per block")
    add_io(p)
    add_speedup_knobs(p)
    add_parallel(p)
    return parser


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    command = Command(args.command)
    buckets = getattr(args, "buckets", None)
    if buckets is not None:
        buckets = _check_buckets(buckets)
    return PipelineConfig(
        command=command,
        model=Model(args.model) if getattr(args, "model", None) else None,
        input_path=args.input,
        output_path=args.output,
        format=FileFormat(getattr(args, "format", FileFormat.CSV.value)),
        buckets=buckets,
        weight_kind=WeightKind(getattr(args, "weight", WeightKind.TX_COUNT.value)),
        metric_name=getattr(args, "metric", None),
        cores=_parse_cores(getattr(args, "cores", "1,8,64")),
        preproc_cost=_parse_preproc(getattr(args, "preproc", "0")),
        worker_count=_resolve_workers(getattr(args, "workers", None)))


def _load_blocks(config: PipelineConfig) -> list[BlockRecords]:
    loader = load_utxo if config.model is Model.UTXO else load_account
    return list(loader(config.input_path, config.format))


def _graph_for(block: BlockRecords) -> BlockGraph:
    if block.model is Model.UTXO:
        return build_utxo_graph(block)
    return build_account_graph(block)


def _metrics_for_block(block: BlockRecords) -> BlockMetrics:
    return block_metrics(_graph_for(block))


def _estimates_for_block(block: BlockRecords, cores: tuple[int, ...],
                         preproc: Fraction,
                         models: tuple[SpeedupModel, ...]) -> list[SpeedupEstimate]:
    graph = _graph_for(block)
    return evaluate_block(block_metrics(graph), graph, cores, preproc, models)


def _map_blocks(fn: Callable, blocks: Sequence[BlockRecords],
                workers: int) -> list:
    """Apply ``fn`` per block, preserving block order in the result."""
    if workers <= 1 or len(blocks) <= 1:
        return [fn(block) for block in blocks]
    chunksize = max(1, len(blocks) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, blocks, chunksize=chunksize))


def cmd_analyze(config: PipelineConfig) -> int:
    blocks = _load_blocks(config)
    metrics = _map_blocks(_metrics_for_block, blocks, config.worker_count)
    export_metrics_csv(metrics, config.output_path)
    return EXIT_OK


def cmd_bucket(config: PipelineConfig) -> int:
    metrics = load_metrics_csv(config.input_path)
    series = bucket_series(metrics, config.metric_name, config.weight_kind,
                           config.buckets)
    export_bucket_csv(series, config.output_path)
    return EXIT_OK


def _bucketed_estimates(metrics: Sequence[BlockMetrics],
                        config: PipelineConfig) -> list[SpeedupEstimate]:
    """Analytical models on per-bucket weighted means of x, c and l.

    A bucket behaves like one averaged block identified by its lower block
    bound. Mean conflicted counts are rarely whole, so only the closed-form
    models apply; schedules would need real component sizes.
    """
    names = ("tx_count", "single_conflict_rate", "group_conflict_rate")
    series = {name: bucket_series(metrics, name, config.weight_kind,
                                  config.buckets) for name in names}
    out: list[SpeedupEstimate] = []
    k = config.preproc_cost
    for position, bucket in enumerate(series["tx_count"].buckets):
        if bucket.weighted_mean is None:
            continue
        x = bucket.weighted_mean
        c = series["single_conflict_rate"].buckets[position].weighted_mean
        l = series["group_conflict_rate"].buckets[position].weighted_mean
        times = {
            SpeedupModel.SPECULATIVE: lambda n: speculative_time(x, c, n),
            SpeedupModel.PERFECT_INFO: lambda n: perfect_info_time(x, c, n, k),
            SpeedupModel.GROUP_BOUND: lambda n: group_bound_time(x, l, n, k),
        }
        for model in _ANALYTICAL_MODELS:
            for n in config.cores:
                new_time = times[model](n)
                preproc = Fraction(0) if model is SpeedupModel.SPECULATIVE else k
                out.append(SpeedupEstimate(bucket.block_lo, model, n, preproc,
                                           new_time, x / new_time))
    return out


def cmd_speedup(config: PipelineConfig) -> int:
    blocks = _load_blocks(config)
    if config.buckets is not None:
        metrics = _map_blocks(_metrics_for_block, blocks, config.worker_count)
        estimates = _bucketed_estimates(metrics, config)
    else:
        fn = partial(_estimates_for_block, cores=config.cores,
                     preproc=config.preproc_cost, models=tuple(SpeedupModel))
        estimates = [e for per_block in
                     _map_blocks(fn, blocks, config.worker_count)
                     for e in per_block]
    export_speedup_csv(estimates, config.output_path)
    return EXIT_OK


def cmd_simulate(config: PipelineConfig) -> int:
    blocks = _load_blocks(config)
    fn = partial(_estimates_for_block, cores=config.cores,
                 preproc=config.preproc_cost, models=_SCHEDULED_MODELS)
    estimates = [e for per_block in _map_blocks(fn, blocks, config.worker_count)
                 for e in per_block]
    export_speedup_csv(estimates, config.output_path)
    return EXIT_OK


_COMMANDS: dict[Command, Callable[[PipelineConfig], int]] = {
    Command.ANALYZE: cmd_analyze,
    Command.BUCKET: cmd_bucket,
    Command.SPEEDUP: cmd_speedup,
    Command.SIMULATE: cmd_simulate,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; keep its code.
        return int(exc.code or 0)
    try:
        config = _config_from_args(args)
        return _COMMANDS[config.command](config)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
