"""Per-block metrics, decimal rendering, bucketing, and CSV round-trips."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from chainconcur import (METRICS_CSV_FIELDS, BlockMetrics, BlockRecords,
                         Model, ParseError, TraceRecord, UtxoInputRecord,
                         WeightKind, block_metrics, bucket_series,
                         build_account_graph, build_utxo_graph,
                         export_bucket_csv, export_metrics_csv,
                         format_decimal, load_account, load_metrics_csv,
                         load_utxo)

from conftest import DATA_DIR, random_account_block, random_utxo_block


def reference_metrics():
    blocks = load_account(DATA_DIR / "eth_reference_blocks.csv")
    return {b.block_number: block_metrics(build_account_graph(b))
            for b in blocks}


def graph_for(block):
    if block.model is Model.UTXO:
        return build_utxo_graph(block)
    return build_account_graph(block)


def synthetic(number, tx_count, rate_sixths=0, total_gas=0):
    """Hand-built BlockMetrics where only bucketing inputs matter."""
    rate = Fraction(rate_sixths, 6)
    return BlockMetrics(number, tx_count, 0, rate, 1, rate, 0, 0,
                        total_gas, 0, 0, Fraction(0), Fraction(0))


# --- block_metrics -----------------------------------------------------------

def test_reference_block_1000007_rates():
    m = reference_metrics()[1000007]
    assert m.single_conflict_rate == Fraction(2, 5)
    assert m.group_conflict_rate == Fraction(2, 5)
    assert (m.tx_count, m.conflicted_tx_count, m.lcc_tx_count) == (5, 2, 2)
    assert (m.total_gas, m.conflicted_gas, m.lcc_gas) == (143000, 51000, 51000)
    assert m.gas_single_conflict_rate == Fraction(51, 143)
    assert m.max_depth == 0 and m.inblock_spent_txos == 0


def test_reference_block_1000124_rates():
    m = reference_metrics()[1000124]
    assert m.single_conflict_rate == Fraction(7, 8)
    assert m.group_conflict_rate == Fraction(9, 16)
    assert m.conflicted_tx_count == 14 and m.lcc_tx_count == 9
    assert (m.total_gas, m.conflicted_gas, m.lcc_gas) == (543000, 501000, 189000)


def test_all_singleton_block():
    rows = tuple(UtxoInputRecord(1, f"t{i}", f"x{i}") for i in range(4))
    m = block_metrics(build_utxo_graph(BlockRecords(1, Model.UTXO, rows)))
    assert m.conflicted_tx_count == 0
    assert m.single_conflict_rate == 0
    assert m.lcc_tx_count == 1
    assert m.group_conflict_rate == Fraction(1, 4)


def test_empty_block_is_all_zero():
    rows = (UtxoInputRecord(1, "cb", None),)
    m = block_metrics(build_utxo_graph(BlockRecords(1, Model.UTXO, rows)))
    assert m == BlockMetrics(1, 0, 0, Fraction(0), 0, Fraction(0), 0, 0,
                             0, 0, 0, Fraction(0), Fraction(0))


def test_utxo_chain_metrics():
    (block,) = load_utxo(DATA_DIR / "btc_chain_block.csv")
    m = block_metrics(build_utxo_graph(block))
    assert m.single_conflict_rate == 1 and m.group_conflict_rate == 1
    assert m.max_depth == 17 and m.inblock_spent_txos == 17
    assert m.total_gas == 0  # gas fields stay zero for UTXO blocks


def test_group_rate_never_exceeds_single_rate_when_conflicted():
    rng = random.Random(7)
    for trial in range(300):
        block = (random_utxo_block if trial % 2 else random_account_block)(rng, trial)
        m = block_metrics(graph_for(block))
        if m.lcc_tx_count >= 2:
            assert m.group_conflict_rate <= m.single_conflict_rate <= 1
        assert 0 <= m.group_conflict_rate <= 1
        assert 0 <= m.single_conflict_rate <= 1


def test_rates_invariant_under_relabeling():
    rng = random.Random(13)
    for trial in range(50):
        block = random_account_block(rng, trial)
        names = sorted({r.from_addr for r in block.records}
                       | {r.to_addr for r in block.records if r.to_addr})
        shuffled = names[:]
        rng.shuffle(shuffled)
        rename = dict(zip(names, shuffled))
        relabeled = BlockRecords(block.block_number, Model.ACCOUNT, tuple(
            TraceRecord(r.block_number, r.tx_index, rename[r.from_addr],
                        rename[r.to_addr] if r.to_addr else None, r.gas_used)
            for r in block.records))
        a = block_metrics(build_account_graph(block))
        b = block_metrics(build_account_graph(relabeled))
        assert a == b


def test_gas_rates_equal_tx_rates_with_uniform_gas():
    rng = random.Random(17)
    for trial in range(50):
        block = random_account_block(rng, trial)
        uniform = BlockRecords(block.block_number, Model.ACCOUNT, tuple(
            TraceRecord(r.block_number, r.tx_index, r.from_addr, r.to_addr,
                        21000) for r in block.records))
        m = block_metrics(build_account_graph(uniform))
        assert m.gas_single_conflict_rate == m.single_conflict_rate
        assert m.gas_group_conflict_rate == m.group_conflict_rate


# --- decimal rendering -------------------------------------------------------

def test_format_decimal():
    assert format_decimal(Fraction(2, 5)) == "0.400000"
    assert format_decimal(Fraction(5, 3)) == "1.666667"
    assert format_decimal(0) == "0.000000"
    assert format_decimal(7) == "7.000000"
    assert format_decimal(Fraction(9, 16)) == "0.562500"
    assert format_decimal(Fraction(-1, 3)) == "-0.333333"
    # ties round half to even
    assert format_decimal(Fraction(5, 10**7)) == "0.000000"
    assert format_decimal(Fraction(15, 10**7)) == "0.000002"


# --- metrics CSV -------------------------------------------------------------

def test_export_reference_rows_exact(tmp_path):
    path = tmp_path / "m.csv"
    export_metrics_csv(reference_metrics().values(), path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(METRICS_CSV_FIELDS)
    assert lines[1] == ("1000007,5,2,0.400000,2,0.400000,0,0,"
                        "143000,51000,51000,0.356643,0.356643")
    assert lines[2] == ("1000124,16,14,0.875000,9,0.562500,0,0,"
                        "543000,501000,189000,0.922652,0.348066")


def test_export_empty_stream_is_header_only(tmp_path):
    path = tmp_path / "m.csv"
    export_metrics_csv([], path)
    assert path.read_text() == ",".join(METRICS_CSV_FIELDS) + "\n"


def test_export_sorts_by_block_number(tmp_path):
    path = tmp_path / "m.csv"
    export_metrics_csv([synthetic(9, 1), synthetic(7, 1)], path)
    rows = path.read_text().splitlines()[1:]
    assert [r.split(",")[0] for r in rows] == ["7", "9"]


def test_metrics_csv_round_trip_is_exact(tmp_path):
    rng = random.Random(29)
    metrics = [block_metrics(graph_for(
        (random_utxo_block if t % 2 else random_account_block)(rng, t)))
        for t in range(40)]
    path = tmp_path / "m.csv"
    export_metrics_csv(metrics, path)
    assert load_metrics_csv(path) == sorted(metrics, key=lambda m: m.block_number)


def test_load_metrics_rejects_foreign_csv(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ParseError) as err:
        load_metrics_csv(path)
    assert err.value.line == 1


def test_load_metrics_rejects_short_row(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text(",".join(METRICS_CSV_FIELDS) + "\n1,2,3\n")
    with pytest.raises(ParseError) as err:
        load_metrics_csv(path)
    assert err.value.line == 2


# --- bucketing ---------------------------------------------------------------

def test_bucket_uniform_weights_b1():
    metrics = [BlockMetrics(i, 10, 0, Fraction(i + 1, 10), 1,
                            Fraction(i + 1, 10), 0, 0, 0, 0, 0,
                            Fraction(0), Fraction(0)) for i in range(10)]
    series = bucket_series(metrics, "single_conflict_rate",
                           WeightKind.TX_COUNT, 1)
    (bucket,) = series.buckets
    assert bucket.weighted_mean == Fraction(11, 20)  # mean of 0.1 .. 1.0
    assert bucket.total_weight == 100
    assert (bucket.block_lo, bucket.block_hi) == (0, 9)


def test_bucket_weighted_mean():
    metrics = [
        BlockMetrics(0, 1, 0, Fraction(0), 1, Fraction(0), 0, 0, 0, 0, 0,
                     Fraction(0), Fraction(0)),
        BlockMetrics(1, 3, 3, Fraction(1), 3, Fraction(1), 0, 0, 0, 0, 0,
                     Fraction(0), Fraction(0)),
    ]
    series = bucket_series(metrics, "single_conflict_rate",
                           WeightKind.TX_COUNT, 1)
    assert series.buckets[0].weighted_mean == Fraction(3, 4)


def test_bucket_bounds_partition_range():
    metrics = [synthetic(i, 2) for i in range(4)]
    series = bucket_series(metrics, "tx_count", WeightKind.TX_COUNT, 2)
    assert [(b.block_lo, b.block_hi) for b in series.buckets] == \
        [(0, 1), (2, 3)]
    assert [b.total_weight for b in series.buckets] == [4, 4]


def test_bucket_empty_interval_absent():
    metrics = [synthetic(0, 2), synthetic(1, 2), synthetic(10, 2)]
    series = bucket_series(metrics, "tx_count", WeightKind.TX_COUNT, 3)
    middle = series.buckets[1]
    assert middle.weighted_mean is None and middle.total_weight == 0
    assert (middle.block_lo, middle.block_hi) == (4, 7)
    assert series.buckets[0].total_weight == 4
    assert series.buckets[2].total_weight == 2


def test_bucket_non_rate_metric():
    metrics = [synthetic(0, 4, total_gas=100), synthetic(1, 12, total_gas=50)]
    series = bucket_series(metrics, "tx_count", WeightKind.GAS, 1)
    # gas-weighted mean of tx_count: (100*4 + 50*12) / 150
    assert series.buckets[0].weighted_mean == Fraction(20, 3)
    assert series.buckets[0].total_weight == 150


def test_bucket_unknown_metric_lists_names():
    with pytest.raises(ValueError) as err:
        bucket_series([synthetic(0, 1)], "typo", WeightKind.TX_COUNT, 1)
    assert "single_conflict_rate" in str(err.value)
    assert "gas_group_conflict_rate" in str(err.value)


def test_bucket_count_bounds():
    metrics = [synthetic(0, 1), synthetic(1, 1)]
    for bad in (0, 3, -1):
        with pytest.raises(ValueError, match="bucket count"):
            bucket_series(metrics, "tx_count", WeightKind.TX_COUNT, bad)
    with pytest.raises(ValueError, match="no metrics"):
        bucket_series([], "tx_count", WeightKind.TX_COUNT, 1)


def test_bucket_zero_total_weight():
    metrics = [synthetic(0, 3), synthetic(1, 4)]  # UTXO-style: gas all zero
    with pytest.raises(ValueError, match="zero total weight"):
        bucket_series(metrics, "tx_count", WeightKind.GAS, 1)


def test_bucket_weighted_mean_of_rate_stays_in_unit_interval():
    rng = random.Random(37)
    metrics = [block_metrics(build_account_graph(random_account_block(rng, t)))
               for t in range(60)]
    metrics = [m for m in metrics if m.tx_count]
    series = bucket_series(metrics, "group_conflict_rate",
                           WeightKind.TX_COUNT, 5)
    for bucket in series.buckets:
        if bucket.weighted_mean is not None:
            assert 0 <= bucket.weighted_mean <= 1


def test_bucket_csv_export(tmp_path):
    metrics = [synthetic(0, 2, rate_sixths=3), synthetic(1, 2, rate_sixths=1),
               synthetic(10, 2, rate_sixths=2)]
    series = bucket_series(metrics, "single_conflict_rate",
                           WeightKind.TX_COUNT, 3)
    path = tmp_path / "b.csv"
    export_bucket_csv(series, path)
    assert path.read_text() == (
        "bucket_index,block_lo,block_hi,weighted_mean,total_weight\n"
        "0,0,3,0.333333,4\n"
        "1,4,7,,0\n"
        "2,8,10,0.333333,2\n")
