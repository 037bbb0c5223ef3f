"""Shared fixtures and random-block generators for the test suite."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from chainconcur import BlockRecords, Model, TraceRecord, UtxoInputRecord

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = DATA_DIR / "golden"

GAS_VALUES = (21000, 40000, 90000, 250000)


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN_DIR


def random_utxo_block(rng: random.Random, number: int = 1) -> BlockRecords:
    """Random block with an in-block spend DAG; may include a coinbase."""
    tx_count = rng.randint(0, 15)
    rows = []
    if rng.random() < 0.5:
        rows.append(UtxoInputRecord(number, f"cb{number}", None))
    for i in range(tx_count):
        tx = f"t{i:02d}"
        for k in range(rng.randint(1, 3)):
            if i > 0 and rng.random() < 0.6:
                spent = f"t{rng.randrange(i):02d}"  # earlier tx: stays acyclic
            else:
                spent = f"x{i}.{k}"
            rows.append(UtxoInputRecord(number, tx, spent))
    return BlockRecords(number, Model.UTXO, tuple(rows))


def random_account_block(rng: random.Random, number: int = 1) -> BlockRecords:
    """Random block over a small address pool, with internal traces."""
    tx_count = rng.randint(0, 15)
    pool = [f"a{j}" for j in range(rng.randint(1, 8))]
    rows = []
    for i in range(tx_count):
        gas = rng.choice(GAS_VALUES)
        to_addr = None if rng.random() < 0.1 else rng.choice(pool)
        rows.append(TraceRecord(number, i, rng.choice(pool), to_addr, gas))
        for _ in range(rng.randint(0, 2)):
            rows.append(TraceRecord(number, i, rng.choice(pool),
                                    rng.choice(pool), gas))
    return BlockRecords(number, Model.ACCOUNT, tuple(rows))


def random_block(rng: random.Random, number: int = 1) -> BlockRecords:
    if rng.random() < 0.5:
        return random_utxo_block(rng, number)
    return random_account_block(rng, number)
