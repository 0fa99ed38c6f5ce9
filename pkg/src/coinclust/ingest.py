"""File-based loading of per-coin daily series and mechanism profiles.

Series live in one CSV per coin and metric, named ``<coin_id>.<metric>.csv``
with header ``date,value`` (ISO dates, decimal values).  Mechanism profiles
live in a single key/value text file, one block per coin; see
``docs/data_formats.md`` for the exact grammar.

There is no live fetching: the upstream chart site has no stable API, so
ingestion is file-based and ``source_url`` only documents where the numbers
conventionally come from.
"""

from __future__ import annotations

import csv
import enum
import hashlib
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateCoinError,
    MalformedCsvError,
    MissingProfileError,
    MissingRequiredFieldError,
    NoSeriesLoadedError,
    NonMonotoneDatesError,
    NonPositiveValueError,
    ProfileParseError,
    TooShortError,
    UnknownEnumTokenError,
)

MIN_SERIES_LEN = 30


class Metric(str, enum.Enum):
    PRICE = "price_usd"
    BLOCK_TIME = "block_time_minutes"
    BLOCK_SIZE = "block_size_bytes"


class Consensus(str, enum.Enum):
    POW = "PoW"
    POS = "PoS"
    OTHER = "other"


class BlockSizeLimitKind(str, enum.Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"
    NONE = "none"


class Governance(str, enum.Enum):
    PUBLIC = "public"
    PRIVATE = "private"


@dataclass
class Series:
    """One coin, one metric: dated daily observations."""

    coin_id: str
    metric: Metric
    dates: list[date]
    values: np.ndarray
    drop_count: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.dates)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Series)
            and self.coin_id == other.coin_id
            and self.metric == other.metric
            and self.dates == other.dates
            and np.array_equal(self.values, other.values)
        )

    def validate(self, min_len: int = MIN_SERIES_LEN) -> None:
        if len(self.dates) != len(self.values):
            raise MalformedCsvError(f"{self.coin_id}: dates/values length mismatch")
        if len(self.values) < min_len:
            raise TooShortError(
                f"{self.coin_id}.{self.metric.value}: {len(self.values)} rows < minimum {min_len}"
            )
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise NonMonotoneDatesError(f"{self.coin_id}: dates not strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise MalformedCsvError(f"{self.coin_id}: non-finite value survived loading")
        if self.metric is Metric.PRICE:
            if np.any(self.values < 0):
                raise NonPositiveValueError(f"{self.coin_id}: negative price")
        elif np.any(self.values <= 0):
            raise NonPositiveValueError(
                f"{self.coin_id}: {self.metric.value} must be strictly positive"
            )


@dataclass
class MechanismProfile:
    """Blockchain mechanism attributes of one coin."""

    coin_id: str
    consensus: Consensus
    hashing_algorithm: str
    governance: Governance
    block_size_limit_kind: BlockSizeLimitKind
    fork_origin: str | None = None
    difficulty_adjustment_blocks: int | None = None
    target_block_time_minutes: float | None = None
    block_size_limit_bytes: float | None = None


@dataclass
class Dataset:
    """All loadable series for one metric, plus every coin's profile.

    Coins may legitimately lack a series for a metric (they are listed in
    ``missing``), but every loaded series must have a profile.
    """

    metric: Metric
    series: dict[str, Series]
    profiles: dict[str, MechanismProfile]
    missing: list[str] = field(default_factory=list)
    fingerprints: dict[str, str] = field(default_factory=dict)

    def coin_ids(self) -> list[str]:
        return sorted(self.series)


def load_series(path, coin_id: str, metric: Metric, min_len: int = MIN_SERIES_LEN) -> Series:
    """Load and validate one series CSV.

    Rows whose value field is empty or non-numeric (including NaN/inf
    tokens) are dropped and counted in ``Series.drop_count``.  Structural
    problems (wrong field count, bad header, bad date) raise instead.
    """
    path = Path(path)
    dates: list[date] = []
    values: list[float] = []
    dropped = 0
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedCsvError(f"{path.name}: empty file") from None
        if [h.strip().lower() for h in header] != ["date", "value"]:
            raise MalformedCsvError(f"{path.name}: expected header 'date,value', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise MalformedCsvError(f"{path.name}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                day = date.fromisoformat(row[0].strip())
            except ValueError:
                raise MalformedCsvError(f"{path.name}:{lineno}: bad date {row[0]!r}") from None
            raw = row[1].strip()
            try:
                value = float(raw)
            except ValueError:
                dropped += 1
                continue
            if not np.isfinite(value):
                dropped += 1
                continue
            dates.append(day)
            values.append(value)
    series = Series(coin_id=coin_id, metric=metric, dates=dates, values=values, drop_count=dropped)
    series.validate(min_len=min_len)
    return series


def write_series(series: Series, path) -> None:
    """Write a series back to its CSV form (round-trips exactly)."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "value"])
        for day, value in zip(series.dates, series.values):
            writer.writerow([day.isoformat(), repr(float(value))])


_PROFILE_KEYS = {
    "coin_id",
    "fork_origin",
    "consensus",
    "hashing_algorithm",
    "difficulty_adjustment_blocks",
    "target_block_time_minutes",
    "block_size_limit_kind",
    "block_size_limit_bytes",
    "governance",
}
_REQUIRED_KEYS = ("coin_id", "consensus", "hashing_algorithm", "block_size_limit_kind", "governance")


def _parse_enum(enum_cls, token: str, key: str, coin: str):
    for member in enum_cls:
        if member.value == token:
            return member
    allowed = ", ".join(m.value for m in enum_cls)
    raise UnknownEnumTokenError(f"{coin}: {key}={token!r} not one of {{{allowed}}}")


def _profile_from_block(block: dict[str, str]) -> MechanismProfile:
    for key in _REQUIRED_KEYS:
        if key not in block:
            raise MissingRequiredFieldError(
                f"{block.get('coin_id', '<unknown>')}: missing required field {key!r}"
            )
    coin = block["coin_id"]
    unknown = set(block) - _PROFILE_KEYS
    if unknown:
        raise ProfileParseError(f"{coin}: unknown profile keys {sorted(unknown)}")

    def optional(key):
        tok = block.get(key, "none")
        return None if tok == "none" else tok

    diff = optional("difficulty_adjustment_blocks")
    if diff is not None:
        try:
            diff = int(diff)
        except ValueError:
            raise ProfileParseError(f"{coin}: difficulty_adjustment_blocks must be an integer") from None
        if diff <= 0:
            raise ProfileParseError(f"{coin}: difficulty_adjustment_blocks must be positive")
    target = optional("target_block_time_minutes")
    if target is not None:
        target = float(target)
        if target <= 0:
            raise ProfileParseError(f"{coin}: target_block_time_minutes must be positive")
    limit_bytes = optional("block_size_limit_bytes")
    if limit_bytes is not None:
        limit_bytes = float(limit_bytes)

    return MechanismProfile(
        coin_id=coin,
        fork_origin=optional("fork_origin"),
        consensus=_parse_enum(Consensus, block["consensus"], "consensus", coin),
        hashing_algorithm=block["hashing_algorithm"],
        difficulty_adjustment_blocks=diff,
        target_block_time_minutes=target,
        block_size_limit_kind=_parse_enum(
            BlockSizeLimitKind, block["block_size_limit_kind"], "block_size_limit_kind", coin
        ),
        block_size_limit_bytes=limit_bytes,
        governance=_parse_enum(Governance, block["governance"], "governance", coin),
    )


def load_profiles(path) -> dict[str, MechanismProfile]:
    """Parse the mechanism-profiles file: blank-line-separated key/value
    blocks, ``#`` comment lines allowed anywhere."""
    path = Path(path)
    profiles: dict[str, MechanismProfile] = {}
    block: dict[str, str] = {}

    def flush():
        if not block:
            return
        profile = _profile_from_block(block)
        if profile.coin_id in profiles:
            raise DuplicateCoinError(f"duplicate coin_id {profile.coin_id!r}")
        profiles[profile.coin_id] = profile
        block.clear()

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                flush()
                continue
            if ":" not in line:
                raise ProfileParseError(f"{path.name}:{lineno}: expected 'key: value'")
            key, _, value = line.partition(":")
            key, value = key.strip(), value.strip()
            if key in block:
                raise ProfileParseError(f"{path.name}:{lineno}: repeated key {key!r} in block")
            block[key] = value
    flush()
    return profiles


def build_dataset(series_dir, profiles_path, metric: Metric, min_len: int = MIN_SERIES_LEN) -> Dataset:
    """Load every ``<coin_id>.<metric>.csv`` under ``series_dir``.

    Coins that have a profile but no file for this metric are reported in
    ``Dataset.missing``, not treated as errors.  A file for a coin without
    a profile is an error.
    """
    series_dir = Path(series_dir)
    profiles = load_profiles(profiles_path)
    suffix = f".{metric.value}.csv"
    series: dict[str, Series] = {}
    fingerprints = {Path(profiles_path).name: _sha256(profiles_path)}
    for path in sorted(series_dir.glob(f"*{suffix}")):
        coin_id = path.name[: -len(suffix)]
        if coin_id not in profiles:
            raise MissingProfileError(f"{path.name}: no profile for coin {coin_id!r}")
        try:
            series[coin_id] = load_series(path, coin_id, metric, min_len=min_len)
        except Exception as exc:
            raise type(exc)(f"{path.name}: {exc}") from exc
        fingerprints[path.name] = _sha256(path)
    if not series:
        raise NoSeriesLoadedError(f"no {metric.value} series found in {series_dir}")
    missing = sorted(c for c in profiles if c not in series)
    return Dataset(metric=metric, series=series, profiles=profiles, missing=missing, fingerprints=fingerprints)


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def source_url(coin_id: str, metric: Metric) -> str:
    """The conventional upstream chart URL for one coin and metric.

    Documentation only; nothing in this package performs network fetches.
    The site exposes per-metric chart pages of the form
    ``https://bitinfocharts.com/comparison/<chart>-<coin>.html``.
    """
    chart = {
        Metric.PRICE: "price",
        Metric.BLOCK_TIME: "confirmationtime",
        Metric.BLOCK_SIZE: "size",
    }[metric]
    return f"https://bitinfocharts.com/comparison/{chart}-{coin_id}.html"
