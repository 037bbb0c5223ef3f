"""Block dump ingestion for the two supported on-disk schemas.

Files are either CSV (header row required, UTF-8) or JSON-lines with the same
field names. The UTXO schema carries one row per transaction input; the
account schema carries one row per execution trace. Loaders group rows into
per-block batches and always yield blocks in ascending block-number order,
sorting in memory when a file is not already ordered.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from enum import Enum
from itertools import groupby
from pathlib import Path
from typing import Callable, Iterable, Iterator, Union

UTXO_FIELDS = ("block_number", "tx_hash", "spent_tx_hash")
ACCOUNT_FIELDS = ("block_number", "tx_index", "from_addr", "to_addr", "gas_used")

_INT64_MAX = 2**63 - 1


class Model(Enum):
    """Ledger data model of a file or block."""

    UTXO = "utxo"
    ACCOUNT = "account"


class FileFormat(Enum):
    CSV = "csv"
    JSONL = "jsonl"


class ParseError(ValueError):
    """Malformed input row; carries the offending file path and 1-based line."""

    def __init__(self, path: Union[str, Path], line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


@dataclass(frozen=True, slots=True)
class UtxoInputRecord:
    """One transaction input. ``spent_tx_hash`` is None for coinbase inputs."""

    block_number: int
    tx_hash: str
    spent_tx_hash: str | None


@dataclass(frozen=True, slots=True)
class TraceRecord:
    """One execution trace. ``to_addr`` is None for contract creations.

    ``gas_used`` is the per-transaction receipt value, repeated on every trace
    row of that transaction; consumers deduplicate it by ``tx_index``.
    """

    block_number: int
    tx_index: int
    from_addr: str
    to_addr: str | None
    gas_used: int


@dataclass(frozen=True, slots=True)
class BlockRecords:
    """All rows of one block, in original file order."""

    block_number: int
    model: Model
    records: tuple


Record = Union[UtxoInputRecord, TraceRecord]


def _int_field(raw, name: str, path, line: int) -> int:
    if isinstance(raw, (bool, float)):
        raise ParseError(path, line, f"{name} must be an integer, got {raw!r}")
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise ParseError(path, line, f"{name} must be an integer, got {raw!r}") from None


def _str_field(raw, name: str, path, line: int) -> str:
    if raw is None:
        return ""
    if not isinstance(raw, str):
        raise ParseError(path, line, f"{name} must be a string, got {raw!r}")
    return raw


def _block_number(row: dict, path, line: int) -> int:
    value = _int_field(row.get("block_number"), "block_number", path, line)
    if not 0 <= value <= _INT64_MAX:
        raise ParseError(path, line, f"block_number {value} out of range")
    return value


def _utxo_record(row: dict, path, line: int) -> UtxoInputRecord:
    tx_hash = _str_field(row.get("tx_hash"), "tx_hash", path, line)
    if not tx_hash:
        raise ParseError(path, line, "empty tx_hash")
    spent = _str_field(row.get("spent_tx_hash"), "spent_tx_hash", path, line)
    return UtxoInputRecord(_block_number(row, path, line), tx_hash, spent or None)


def _trace_record(row: dict, path, line: int) -> TraceRecord:
    tx_index = _int_field(row.get("tx_index"), "tx_index", path, line)
    if tx_index < 0:
        raise ParseError(path, line, f"negative tx_index {tx_index}")
    from_addr = _str_field(row.get("from_addr"), "from_addr", path, line)
    if not from_addr:
        raise ParseError(path, line, "missing from_addr")
    to_addr = _str_field(row.get("to_addr"), "to_addr", path, line)
    gas_used = _int_field(row.get("gas_used"), "gas_used", path, line)
    if gas_used < 0:
        raise ParseError(path, line, f"negative gas_used {gas_used}")
    return TraceRecord(_block_number(row, path, line), tx_index, from_addr,
                       to_addr or None, gas_used)


def _read_csv(path, fields, builder) -> Iterator[Record]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != list(fields):
            raise ParseError(path, 1, f"expected header {','.join(fields)}")
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(fields):
                raise ParseError(path, line,
                                 f"expected {len(fields)} fields, got {len(row)}")
            yield builder(dict(zip(fields, row)), path, line)


def _read_jsonl(path, fields, builder) -> Iterator[Record]:
    with open(path, encoding="utf-8") as handle:
        for line, text in enumerate(handle, start=1):
            text = text.strip()
            if not text:
                continue
            try:
                row = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(path, line, f"invalid JSON: {exc.msg}") from None
            if not isinstance(row, dict):
                raise ParseError(path, line, "row is not a JSON object")
            yield builder(row, path, line)


def _load(path, fmt: FileFormat, fields, builder, model: Model) -> Iterator[BlockRecords]:
    if fmt is FileFormat.CSV:
        records = list(_read_csv(path, fields, builder))
    else:
        records = list(_read_jsonl(path, fields, builder))
    if any(records[i].block_number > records[i + 1].block_number
           for i in range(len(records) - 1)):
        # Exports are not guaranteed ordered; stable sort keeps file order
        # within each block.
        records.sort(key=lambda r: r.block_number)
    for block_number, group in groupby(records, key=lambda r: r.block_number):
        yield BlockRecords(block_number, model, tuple(group))


def load_utxo(path, fmt: FileFormat = FileFormat.CSV) -> Iterator[BlockRecords]:
    """Yield per-block groups of UTXO input rows, ascending by block number."""
    return _load(path, fmt, UTXO_FIELDS, _utxo_record, Model.UTXO)


def load_account(path, fmt: FileFormat = FileFormat.CSV) -> Iterator[BlockRecords]:
    """Yield per-block groups of account trace rows, ascending by block number."""
    return _load(path, fmt, ACCOUNT_FIELDS, _trace_record, Model.ACCOUNT)


def _record_row(record: Record) -> dict:
    if isinstance(record, UtxoInputRecord):
        return {"block_number": record.block_number, "tx_hash": record.tx_hash,
                "spent_tx_hash": record.spent_tx_hash}
    return {"block_number": record.block_number, "tx_index": record.tx_index,
            "from_addr": record.from_addr, "to_addr": record.to_addr,
            "gas_used": record.gas_used}


def write_blocks(blocks: Iterable[BlockRecords], path, model: Model,
                 fmt: FileFormat = FileFormat.CSV) -> None:
    """Serialize block groups back to disk; exact inverse of the loaders."""
    fields = UTXO_FIELDS if model is Model.UTXO else ACCOUNT_FIELDS
    if fmt is FileFormat.CSV:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(fields)
            for block in blocks:
                for record in block.records:
                    row = _record_row(record)
                    writer.writerow(["" if row[f] is None else row[f] for f in fields])
    else:
        with open(path, "w", encoding="utf-8") as handle:
            for block in blocks:
                for record in block.records:
                    handle.write(json.dumps(_record_row(record), sort_keys=False))
                    handle.write("\n")
