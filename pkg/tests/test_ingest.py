from datetime import date

import numpy as np
import pytest

from coinclust.errors import (
    DuplicateCoinError,
    MalformedCsvError,
    MissingProfileError,
    MissingRequiredFieldError,
    NoSeriesLoadedError,
    NonMonotoneDatesError,
    NonPositiveValueError,
    TooShortError,
    UnknownEnumTokenError,
)
from coinclust.ingest import (
    BlockSizeLimitKind,
    Consensus,
    Governance,
    Metric,
    build_dataset,
    load_profiles,
    load_series,
    source_url,
    write_series,
)

from conftest import make_series


def write_csv(path, rows, header="date,value"):
    path.write_text(header + "\n" + "\n".join(rows) + "\n", encoding="utf-8")


PROFILE_BLOCK = """\
coin_id: {coin}
fork_origin: none
consensus: PoW
hashing_algorithm: SHA-256
difficulty_adjustment_blocks: 2016
target_block_time_minutes: 10
block_size_limit_kind: static
block_size_limit_bytes: 1000000
governance: public
"""


# --- load_series ------------------------------------------------------------

def test_load_series_identity(tmp_path):
    p = tmp_path / "x.csv"
    write_csv(p, [f"2019-01-0{i},{float(i)}" for i in range(1, 5)])
    s = load_series(p, "x", Metric.PRICE, min_len=3)
    assert len(s) == 4
    assert s.dates[0] == date(2019, 1, 1)
    assert list(s.values) == [1.0, 2.0, 3.0, 4.0]
    assert s.drop_count == 0


def test_load_series_drops_empty_values(tmp_path):
    rows = [f"2019-{1 + i // 28:02d}-{1 + i % 28:02d},{i + 1.0}" for i in range(100)]
    rows.insert(50, "2020-06-01,")
    p = tmp_path / "x.csv"
    write_csv(p, rows)
    # reorder so dates stay monotone: put the empty-value row at the end
    rows = rows[:50] + rows[51:] + ["2020-06-01,"]
    write_csv(p, rows)
    s = load_series(p, "x", Metric.PRICE)
    assert len(s) == 100
    assert s.drop_count == 1


def test_load_series_too_short(tmp_path):
    p = tmp_path / "x.csv"
    write_csv(p, [f"2019-01-{i:02d},1.0" for i in range(1, 30)])
    with pytest.raises(TooShortError):
        load_series(p, "x", Metric.PRICE)


def test_load_series_structural_error(tmp_path):
    p = tmp_path / "x.csv"
    write_csv(p, ["2019-01-01,1.0,extra"])
    with pytest.raises(MalformedCsvError):
        load_series(p, "x", Metric.PRICE, min_len=1)


def test_load_series_bad_date(tmp_path):
    p = tmp_path / "x.csv"
    write_csv(p, ["01/02/2019,1.0"])
    with pytest.raises(MalformedCsvError):
        load_series(p, "x", Metric.PRICE, min_len=1)


def test_load_series_nonpositive_block_metric(tmp_path):
    p = tmp_path / "x.csv"
    write_csv(p, ["2019-01-01,5.0", "2019-01-02,0.0", "2019-01-03,2.0"])
    with pytest.raises(NonPositiveValueError):
        load_series(p, "x", Metric.BLOCK_TIME, min_len=2)


def test_load_series_zero_price_allowed(tmp_path):
    p = tmp_path / "x.csv"
    write_csv(p, ["2019-01-01,0.0", "2019-01-02,1.0"])
    s = load_series(p, "x", Metric.PRICE, min_len=2)
    assert s.values[0] == 0.0


def test_load_series_non_monotone(tmp_path):
    p = tmp_path / "x.csv"
    write_csv(p, ["2019-01-02,1.0", "2019-01-01,2.0"])
    with pytest.raises(NonMonotoneDatesError):
        load_series(p, "x", Metric.PRICE, min_len=2)


def test_load_series_nan_token_dropped(tmp_path):
    p = tmp_path / "x.csv"
    write_csv(p, ["2019-01-01,1.0", "2019-01-02,nan", "2019-01-03,inf", "2019-01-04,2.0"])
    s = load_series(p, "x", Metric.PRICE, min_len=2)
    assert len(s) == 2 and s.drop_count == 2


def test_round_trip(tmp_path):
    original = make_series(np.array([0.1, 2.5, 3.75, 1e-7, 123456.789]) + 0.1)
    p = tmp_path / "rt.csv"
    write_series(original, p)
    reloaded = load_series(p, original.coin_id, original.metric, min_len=1)
    assert reloaded == original


def test_drop_count_conservation(tmp_path):
    rows = [f"2019-01-{i:02d},{i}.5" for i in range(1, 28)] + ["2019-02-01,oops", "2019-02-02,"]
    p = tmp_path / "x.csv"
    write_csv(p, rows)
    s = load_series(p, "x", Metric.PRICE, min_len=10)
    assert len(s) + s.drop_count == len(rows)


# --- load_profiles ------------------------------------------------------------

def test_profiles_accept_reference_entries(tmp_path):
    text = """\
# curated mechanism attributes
coin_id: bitcoin
fork_origin: none
consensus: PoW
hashing_algorithm: SHA-256
difficulty_adjustment_blocks: 2016
target_block_time_minutes: 10
block_size_limit_kind: static
block_size_limit_bytes: 1000000
governance: public

coin_id: dogecoin
fork_origin: litecoin       # litecoin-derived codebase
consensus: PoW
hashing_algorithm: Scrypt
difficulty_adjustment_blocks: 240
target_block_time_minutes: 1
block_size_limit_kind: static
block_size_limit_bytes: 1000000
governance: public
"""
    p = tmp_path / "profiles.txt"
    p.write_text(text, encoding="utf-8")
    profiles = load_profiles(p)
    assert set(profiles) == {"bitcoin", "dogecoin"}
    btc = profiles["bitcoin"]
    assert btc.consensus is Consensus.POW
    assert btc.hashing_algorithm == "SHA-256"
    assert btc.difficulty_adjustment_blocks == 2016
    assert btc.target_block_time_minutes == 10.0
    doge = profiles["dogecoin"]
    assert doge.fork_origin == "litecoin"
    assert doge.difficulty_adjustment_blocks == 240


def test_profiles_duplicate_coin(tmp_path):
    text = PROFILE_BLOCK.format(coin="zcash") + "\n" + PROFILE_BLOCK.format(coin="zcash")
    p = tmp_path / "profiles.txt"
    p.write_text(text, encoding="utf-8")
    with pytest.raises(DuplicateCoinError):
        load_profiles(p)


def test_profiles_unknown_enum(tmp_path):
    text = PROFILE_BLOCK.format(coin="x").replace("consensus: PoW", "consensus: proof-of-magic")
    p = tmp_path / "profiles.txt"
    p.write_text(text, encoding="utf-8")
    with pytest.raises(UnknownEnumTokenError):
        load_profiles(p)


def test_profiles_missing_required(tmp_path):
    text = "\n".join(
        line for line in PROFILE_BLOCK.format(coin="x").splitlines() if "governance" not in line
    )
    p = tmp_path / "profiles.txt"
    p.write_text(text, encoding="utf-8")
    with pytest.raises(MissingRequiredFieldError):
        load_profiles(p)


def test_profiles_optional_none(tmp_path):
    text = PROFILE_BLOCK.format(coin="x").replace("difficulty_adjustment_blocks: 2016",
                                                  "difficulty_adjustment_blocks: none")
    p = tmp_path / "profiles.txt"
    p.write_text(text, encoding="utf-8")
    assert load_profiles(p)["x"].difficulty_adjustment_blocks is None


# --- build_dataset ---------------------------------------------------------------

def _write_snapshot(tmp_path, coins, metric=Metric.PRICE, n=40):
    for i, coin in enumerate(coins):
        rows = [f"2019-{1 + d // 28:02d}-{1 + d % 28:02d},{1.0 + i + d * 0.01}" for d in range(n)]
        write_csv(tmp_path / f"{coin}.{metric.value}.csv", rows)
    profiles = "\n".join(PROFILE_BLOCK.format(coin=c) for c in coins)
    (tmp_path / "profiles.txt").write_text(profiles, encoding="utf-8")


def test_build_dataset_complete(tmp_path):
    coins = [f"coin{i:02d}" for i in range(18)]
    _write_snapshot(tmp_path, coins)
    ds = build_dataset(tmp_path, tmp_path / "profiles.txt", Metric.PRICE)
    assert len(ds.series) == 18
    assert ds.missing == []
    assert all(c in ds.profiles for c in ds.series)


def test_build_dataset_missing_report(tmp_path):
    coins = [f"coin{i:02d}" for i in range(18)]
    _write_snapshot(tmp_path, coins[:16], metric=Metric.BLOCK_SIZE)
    profiles = "\n".join(PROFILE_BLOCK.format(coin=c) for c in coins)
    (tmp_path / "profiles.txt").write_text(profiles, encoding="utf-8")
    ds = build_dataset(tmp_path, tmp_path / "profiles.txt", Metric.BLOCK_SIZE)
    assert len(ds.series) == 16
    assert ds.missing == ["coin16", "coin17"]


def test_build_dataset_empty(tmp_path):
    (tmp_path / "profiles.txt").write_text(PROFILE_BLOCK.format(coin="x"), encoding="utf-8")
    with pytest.raises(NoSeriesLoadedError):
        build_dataset(tmp_path, tmp_path / "profiles.txt", Metric.PRICE)


def test_build_dataset_series_without_profile(tmp_path):
    _write_snapshot(tmp_path, ["known"])
    write_csv(tmp_path / f"mystery.{Metric.PRICE.value}.csv",
              [f"2019-01-{i:02d},1.0" for i in range(1, 28)])
    with pytest.raises(MissingProfileError):
        build_dataset(tmp_path, tmp_path / "profiles.txt", Metric.PRICE)


def test_build_dataset_error_has_file_attribution(tmp_path):
    _write_snapshot(tmp_path, ["good"])
    rows = [f"2019-{1 + d // 28:02d}-{1 + d % 28:02d},1.0" for d in range(40)]
    rows[20] = "2018-12-31,2.0"
    write_csv(tmp_path / f"bad.{Metric.PRICE.value}.csv", rows)
    profiles = PROFILE_BLOCK.format(coin="good") + "\n" + PROFILE_BLOCK.format(coin="bad")
    (tmp_path / "profiles.txt").write_text(profiles, encoding="utf-8")
    with pytest.raises(NonMonotoneDatesError, match="bad.price_usd.csv"):
        build_dataset(tmp_path, tmp_path / "profiles.txt", Metric.PRICE)


def test_source_url_convention():
    assert source_url("bitcoin", Metric.PRICE).startswith("https://bitinfocharts.com/")
    assert "bitcoin" in source_url("bitcoin", Metric.BLOCK_SIZE)
