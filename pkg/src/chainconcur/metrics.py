"""Per-block concurrency metrics and weighted, bucketed aggregation.

Rates are kept as exact rationals end to end and rendered as 6-digit decimals
only when a CSV is written. The metrics CSV also carries the integer counts
the rates derive from, so loading it back reconstructs the exact values.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .graph import BlockGraph, max_depth
from .ingest import Model, ParseError

METRICS_CSV_FIELDS = (
    "block_number", "tx_count", "conflicted_tx_count", "single_conflict_rate",
    "lcc_tx_count", "group_conflict_rate", "max_depth", "inblock_spent_txos",
    "total_gas", "conflicted_gas", "lcc_gas", "gas_single_conflict_rate",
    "gas_group_conflict_rate",
)
BUCKET_CSV_FIELDS = ("bucket_index", "block_lo", "block_hi", "weighted_mean",
                     "total_weight")

# Metric columns that bucket_series can aggregate.
BUCKETABLE_METRICS = METRICS_CSV_FIELDS[1:]

_RATE_FIELDS = frozenset(("single_conflict_rate", "group_conflict_rate",
                          "gas_single_conflict_rate", "gas_group_conflict_rate"))


class WeightKind(Enum):
    TX_COUNT = "tx_count"
    GAS = "gas"


@dataclass(frozen=True, slots=True)
class BlockMetrics:
    """Scalar concurrency metrics of one block.

    UTXO blocks leave the gas fields at 0; account blocks leave
    ``max_depth``/``inblock_spent_txos`` at 0. Empty blocks report every rate
    as 0 so they never perturb weighted aggregates.
    """

    block_number: int
    tx_count: int
    conflicted_tx_count: int
    single_conflict_rate: Fraction
    lcc_tx_count: int
    group_conflict_rate: Fraction
    max_depth: int
    inblock_spent_txos: int
    total_gas: int
    conflicted_gas: int
    lcc_gas: int
    gas_single_conflict_rate: Fraction
    gas_group_conflict_rate: Fraction


@dataclass(frozen=True, slots=True)
class Bucket:
    """One aggregation interval; ``weighted_mean`` is None when no weight fell in."""

    index: int
    block_lo: int
    block_hi: int
    weighted_mean: Fraction | None
    total_weight: int


@dataclass(frozen=True, slots=True)
class BucketSeries:
    metric_name: str
    weight_kind: WeightKind
    bucket_count: int
    buckets: tuple[Bucket, ...]


def block_metrics(graph: BlockGraph) -> BlockMetrics:
    """Derive the per-block metrics from a dependency graph.

    A transaction is conflicted when its component has at least two members;
    the group rate is the largest component's share of the block. Ties for
    the largest component go to the one with the smallest ordering key.
    """
    x = graph.tx_count
    zero = Fraction(0)
    if x == 0:
        return BlockMetrics(graph.block_number, 0, 0, zero, 0, zero, 0, 0,
                            0, 0, 0, zero, zero)
    conflicted = sum(c.tx_count for c in graph.components if c.tx_count >= 2)
    lcc = max(graph.components, key=lambda c: c.tx_count)
    single_rate = Fraction(conflicted, x)
    group_rate = Fraction(lcc.tx_count, x)
    if graph.model is Model.UTXO:
        return BlockMetrics(graph.block_number, x, conflicted, single_rate,
                            lcc.tx_count, group_rate, max_depth(graph),
                            len(graph.intra_block_edges), 0, 0, 0, zero, zero)
    total_gas = sum(c.gas_total for c in graph.components)
    conflicted_gas = sum(c.gas_total for c in graph.components if c.tx_count >= 2)
    gas_single = Fraction(conflicted_gas, total_gas) if total_gas else zero
    gas_group = Fraction(lcc.gas_total, total_gas) if total_gas else zero
    return BlockMetrics(graph.block_number, x, conflicted, single_rate,
                        lcc.tx_count, group_rate, 0, 0, total_gas,
                        conflicted_gas, lcc.gas_total, gas_single, gas_group)


def bucket_series(metrics: Iterable[BlockMetrics], metric_name: str,
                  weight_kind: WeightKind, bucket_count: int) -> BucketSeries:
    """Aggregate a metric over equal-width block-number buckets.

    Bucket value = sum(weight * metric) / sum(weight) over the blocks whose
    block number falls in the bucket, with weight = tx_count or total_gas.
    Buckets partition [min_block, max_block]; widths differ by at most one
    block when the range is not divisible by ``bucket_count``.
    """
    blocks = sorted(metrics, key=lambda m: m.block_number)
    if not blocks:
        raise ValueError("no metrics to bucket")
    if metric_name not in BUCKETABLE_METRICS:
        raise ValueError(f"unknown metric {metric_name!r}; valid names: "
                         + ", ".join(BUCKETABLE_METRICS))
    distinct = len({m.block_number for m in blocks})
    if not 1 <= bucket_count <= distinct:
        raise ValueError(f"bucket count {bucket_count} outside [1, {distinct}]")

    lo = blocks[0].block_number
    span = blocks[-1].block_number - lo + 1
    weight_sums = [0] * bucket_count
    value_sums = [Fraction(0)] * bucket_count
    for m in blocks:
        weight = m.tx_count if weight_kind is WeightKind.TX_COUNT else m.total_gas
        if weight == 0:
            continue
        index = (m.block_number - lo) * bucket_count // span
        weight_sums[index] += weight
        value_sums[index] += weight * Fraction(getattr(m, metric_name))
    if sum(weight_sums) == 0:
        raise ValueError("zero total weight")

    buckets = []
    for index in range(bucket_count):
        bucket_lo = lo + -(-index * span // bucket_count)
        bucket_hi = lo + -(-(index + 1) * span // bucket_count) - 1
        mean = value_sums[index] / weight_sums[index] if weight_sums[index] else None
        buckets.append(Bucket(index, bucket_lo, bucket_hi, mean, weight_sums[index]))
    return BucketSeries(metric_name, weight_kind, bucket_count, tuple(buckets))


def format_decimal(value, digits: int = 6) -> str:
    """Fixed-point decimal rendering of a rational (half-even rounding)."""
    scaled = round(Fraction(value) * 10**digits)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def export_metrics_csv(metrics: Iterable[BlockMetrics], path) -> None:
    """Write one row per block in ascending block order."""
    rows = sorted(metrics, key=lambda m: m.block_number)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(METRICS_CSV_FIELDS)
        for m in rows:
            writer.writerow([
                m.block_number, m.tx_count, m.conflicted_tx_count,
                format_decimal(m.single_conflict_rate), m.lcc_tx_count,
                format_decimal(m.group_conflict_rate), m.max_depth,
                m.inblock_spent_txos, m.total_gas, m.conflicted_gas, m.lcc_gas,
                format_decimal(m.gas_single_conflict_rate),
                format_decimal(m.gas_group_conflict_rate),
            ])


def load_metrics_csv(path) -> list[BlockMetrics]:
    """Read a metrics CSV back into exact values.

    Rates are re-derived from the integer count columns rather than parsed
    from their rounded decimal rendering, so a load/aggregate pass matches an
    in-memory one exactly.
    """
    out = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != list(METRICS_CSV_FIELDS):
            raise ParseError(path, 1, "not a metrics CSV (bad header)")
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(METRICS_CSV_FIELDS):
                raise ParseError(path, line, f"expected "
                                 f"{len(METRICS_CSV_FIELDS)} fields, got {len(row)}")
            try:
                (block_number, x, conflicted, lcc, depth, inblock, total_gas,
                 conflicted_gas, lcc_gas) = (
                    int(row[0]), int(row[1]), int(row[2]), int(row[4]),
                    int(row[6]), int(row[7]), int(row[8]), int(row[9]),
                    int(row[10]))
            except ValueError:
                raise ParseError(path, line, "non-integer count field") from None
            zero = Fraction(0)
            out.append(BlockMetrics(
                block_number, x, conflicted,
                Fraction(conflicted, x) if x else zero, lcc,
                Fraction(lcc, x) if x else zero, depth, inblock, total_gas,
                conflicted_gas, lcc_gas,
                Fraction(conflicted_gas, total_gas) if total_gas else zero,
                Fraction(lcc_gas, total_gas) if total_gas else zero))
    return out


def export_bucket_csv(series: BucketSeries, path) -> None:
    """Write one row per bucket; empty buckets leave weighted_mean blank."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(BUCKET_CSV_FIELDS)
        for bucket in series.buckets:
            mean = "" if bucket.weighted_mean is None else format_decimal(bucket.weighted_mean)
            writer.writerow([bucket.index, bucket.block_lo, bucket.block_hi,
                             mean, bucket.total_weight])
