#!/usr/bin/env python3
"""Regenerate the test fixtures under tests/data/.

Everything here is deterministic: the reference blocks are hand-written and
the two 200-block corpora come from a fixed-seed RNG, so re-running this
script must reproduce the committed files byte for byte. The golden CSVs are
outputs of the current pipeline over those corpora; regenerate them only when
an intentional behavior change invalidates them, and review the diff.
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from chainconcur import (BlockRecords, FileFormat, Model, TraceRecord,
                         UtxoInputRecord, write_blocks)
from chainconcur.cli import main as cli_main

DATA_DIR = Path(__file__).resolve().parent.parent / "tests" / "data"
SEED = 20260825

GAS_CHOICES = (21000, 21000, 50000, 90000, 120000)


def reference_blocks() -> list[BlockRecords]:
    """The two reference account blocks with known conflict structure."""
    rows = [
        TraceRecord(1000007, 0, "0xa1", "0xb1", 21000),
        TraceRecord(1000007, 1, "0xa2", "0xb2", 21000),
        TraceRecord(1000007, 2, "0xa3", "0xb3", 50000),
        # txs 3 and 4 pay the same exchange address: one 2-tx component
        TraceRecord(1000007, 3, "0xa4", "0x2a6", 21000),
        TraceRecord(1000007, 4, "0xa5", "0x2a6", 30000),
    ]
    block_7 = BlockRecords(1000007, Model.ACCOUNT, tuple(rows))

    # 16 txs, components {9, 3, 2, 1, 1}: 9 deposits to one exchange, 3
    # contract calls chained through internal traces, 2 payouts from one
    # pool, 2 independent transfers.
    rows = [TraceRecord(1000124, 0, "0xs0", "0xr0", 21000)]
    for i in range(1, 10):
        rows.append(TraceRecord(1000124, i, f"0xs{i}", "0xexch", 21000))
    for i in range(10, 13):
        rows.append(TraceRecord(1000124, i, f"0xs{i}", "0xc1", 90000))
        rows.append(TraceRecord(1000124, i, "0xc1", "0xc2", 90000))
        rows.append(TraceRecord(1000124, i, "0xc2", "0xc3", 90000))
    for i in (13, 14):
        rows.append(TraceRecord(1000124, i, "0xpool", f"0xr{i}", 21000))
    rows.append(TraceRecord(1000124, 15, "0xs15", "0xr15", 21000))
    block_124 = BlockRecords(1000124, Model.ACCOUNT, tuple(rows))
    return [block_7, block_124]


def chain_block() -> BlockRecords:
    """One coinbase plus an 18-transaction spend chain."""
    rows = [UtxoInputRecord(500000, "coinbase00", None),
            UtxoInputRecord(500000, "t01", "ext_funding")]
    names = [f"t{i:02d}" for i in range(1, 19)]
    for prev, cur in zip(names, names[1:]):
        rows.append(UtxoInputRecord(500000, cur, prev))
    return BlockRecords(500000, Model.UTXO, tuple(rows))


def account_corpus(rng: random.Random) -> list[BlockRecords]:
    """200 account blocks, 3..20 txs each, mixed conflict shapes."""
    blocks = []
    for number in range(5000000, 5000200):
        tx_count = rng.randint(3, 20)
        hot = [f"0x{number}h{j}" for j in range(rng.randint(1, 3))]
        rows: list[TraceRecord] = []
        for i in range(tx_count):
            sender = f"0x{number}s{i}"
            gas = rng.choice(GAS_CHOICES)
            roll = rng.random()
            if roll < 0.45:
                rows.append(TraceRecord(number, i, sender, rng.choice(hot), gas))
            elif roll < 0.55:
                # contract call fanning out through internal traces
                contract = rng.choice(hot)
                rows.append(TraceRecord(number, i, sender, contract, gas))
                rows.append(TraceRecord(number, i, contract,
                                        f"0x{number}d{i}", gas))
            elif roll < 0.60:
                rows.append(TraceRecord(number, i, sender, None, gas))
            else:
                rows.append(TraceRecord(number, i, sender, f"0x{number}c{i}", gas))
        blocks.append(BlockRecords(number, Model.ACCOUNT, tuple(rows)))
    return blocks


def utxo_corpus(rng: random.Random) -> list[BlockRecords]:
    """200 UTXO blocks with in-block spend DAGs; one is coinbase-only."""
    blocks = []
    for number in range(700000, 700200):
        rows = [UtxoInputRecord(number, f"b{number}cb", None)]
        if number == 700100:
            blocks.append(BlockRecords(number, Model.UTXO, tuple(rows)))
            continue
        tx_count = rng.randint(3, 20)
        for i in range(tx_count):
            tx = f"b{number}t{i:02d}"
            for k in range(rng.randint(1, 2)):
                if i > 0 and rng.random() < 0.5:
                    j = rng.randrange(i)  # spend an earlier in-block tx
                    rows.append(UtxoInputRecord(number, tx, f"b{number}t{j:02d}"))
                else:
                    rows.append(UtxoInputRecord(number, tx, f"e{number}x{i}k{k}"))
        blocks.append(BlockRecords(number, Model.UTXO, tuple(rows)))
    return blocks


def write_goldens() -> None:
    golden = DATA_DIR / "golden"
    golden.mkdir(exist_ok=True)
    runs = [
        ["analyze", "--model", "account",
         "--input", str(DATA_DIR / "eth_corpus_200.csv"),
         "--output", str(golden / "eth_corpus_metrics.csv"), "--workers", "1"],
        ["bucket", "--input", str(golden / "eth_corpus_metrics.csv"),
         "--output", str(golden / "eth_corpus_bucket_b20.csv"),
         "--metric", "single_conflict_rate", "--buckets", "20"],
        ["speedup", "--model", "account",
         "--input", str(DATA_DIR / "eth_corpus_200.csv"),
         "--output", str(golden / "eth_corpus_speedup.csv"), "--workers", "1"],
        ["analyze", "--model", "utxo",
         "--input", str(DATA_DIR / "btc_corpus_200.csv"),
         "--output", str(golden / "btc_corpus_metrics.csv"), "--workers", "1"],
        ["bucket", "--input", str(golden / "btc_corpus_metrics.csv"),
         "--output", str(golden / "btc_corpus_bucket_b20.csv"),
         "--metric", "group_conflict_rate", "--buckets", "20"],
        ["speedup", "--model", "utxo",
         "--input", str(DATA_DIR / "btc_corpus_200.csv"),
         "--output", str(golden / "btc_corpus_speedup.csv"), "--workers", "1"],
    ]
    for argv in runs:
        status = cli_main(argv)
        if status != 0:
            raise SystemExit(f"golden run failed ({status}): {argv}")


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    write_blocks(reference_blocks(), DATA_DIR / "eth_reference_blocks.csv",
                 Model.ACCOUNT, FileFormat.CSV)
    write_blocks([chain_block()], DATA_DIR / "btc_chain_block.csv",
                 Model.UTXO, FileFormat.CSV)
    write_blocks(account_corpus(rng), DATA_DIR / "eth_corpus_200.csv",
                 Model.ACCOUNT, FileFormat.CSV)
    write_blocks(utxo_corpus(rng), DATA_DIR / "btc_corpus_200.csv",
                 Model.UTXO, FileFormat.CSV)
    write_goldens()
    print(f"fixtures written to {DATA_DIR}")


if __name__ == "__main__":
    main()
