"""Transaction-concurrency metrics and speed-up models for block dumps."""

from .graph import (BlockGraph, CycleError, TxComponent, build_account_graph,
                    build_utxo_graph, connected_components,
                    count_inblock_spent_txos, max_depth)
from .ingest import (ACCOUNT_FIELDS, UTXO_FIELDS, BlockRecords, FileFormat,
                     Model, ParseError, TraceRecord, UtxoInputRecord,
                     load_account, load_utxo, write_blocks)
from .metrics import (BUCKET_CSV_FIELDS, BUCKETABLE_METRICS,
                      METRICS_CSV_FIELDS, BlockMetrics, Bucket, BucketSeries,
                      WeightKind, block_metrics, bucket_series,
                      export_bucket_csv, export_metrics_csv, format_decimal,
                      load_metrics_csv)
from .speedup import (MAX_OPT_COMPONENTS, MAX_OPT_TOTAL, SPEEDUP_CSV_FIELDS,
                      OversizeScheduleError, Schedule, SpeedupEstimate,
                      SpeedupModel, evaluate_block, export_speedup_csv,
                      group_bound_speedup, perfect_info_speedup, schedule_lpt,
                      schedule_optimal, speculative_speedup)

__version__ = "0.1.0"

__all__ = [
    "ACCOUNT_FIELDS", "BUCKETABLE_METRICS", "BUCKET_CSV_FIELDS",
    "BlockGraph", "BlockMetrics", "BlockRecords", "Bucket", "BucketSeries",
    "CycleError", "FileFormat", "MAX_OPT_COMPONENTS", "MAX_OPT_TOTAL",
    "METRICS_CSV_FIELDS", "Model", "OversizeScheduleError", "ParseError",
    "SPEEDUP_CSV_FIELDS", "Schedule", "SpeedupEstimate", "SpeedupModel",
    "TraceRecord", "TxComponent", "UTXO_FIELDS", "UtxoInputRecord",
    "WeightKind", "block_metrics", "bucket_series", "build_account_graph",
    "build_utxo_graph", "connected_components", "count_inblock_spent_txos",
    "evaluate_block", "export_bucket_csv", "export_metrics_csv",
    "export_speedup_csv", "format_decimal", "group_bound_speedup",
    "load_account", "load_metrics_csv", "load_utxo", "max_depth",
    "perfect_info_speedup", "schedule_lpt", "schedule_optimal",
    "speculative_speedup", "write_blocks",
]
