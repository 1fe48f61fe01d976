"""CSV price-data ingestion and cleaning.

Raw provider files arrive with mixed timestamp conventions; everything is
normalized to a single target format: ``YYYY-MM-DD`` for daily data and
``YYYY-MM-DD HH:MM:SS`` for 5-minute data (a hyphenated time variant
``HH-MM-SS`` is accepted on input and normalized). Rows with unparseable
timestamps or non-positive/non-finite prices are dropped and counted
rather than interpolated.

Closed-market artifacts, where a feed keeps emitting copies of the last
open-market close, are removed by a run-length rule: any maximal run of
identical consecutive closes longer than a threshold is truncated to its
first point.
"""
from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import AmbiguousTimestampFormat, EmptyInput


class Frequency(Enum):
    DAILY = "daily"
    FIVE_MINUTE = "5min"


_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_DT_COLON_RE = re.compile(r"^\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2}$")
_DT_HYPHEN_RE = re.compile(r"^\d{4}-\d{2}-\d{2} \d{2}-\d{2}-\d{2}$")

DEFAULT_DEDUP_RUN_LENGTH = 6  # 6 five-minute bars = 30 minutes


@dataclass
class Diagnostics:
    """Counts of rows/points discarded during cleaning."""

    dropped: int = 0
    removed: int = 0
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """Timestamped close prices for one instrument at one frequency.

    Timestamps are UTC-naive ``datetime64[s]``, strictly increasing; closes
    are finite and positive. Daily series carry no time-of-day component.
    Instances are immutable and safe to share between threads.
    """

    instrument_id: str
    frequency: Frequency
    timestamps: np.ndarray
    closes: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype="datetime64[s]")
        cl = np.asarray(self.closes, dtype=np.float64)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "closes", cl)
        if ts.shape != cl.shape or ts.ndim != 1:
            raise ValueError("timestamps and closes must be 1-d arrays of equal length")
        if len(ts) > 1 and not np.all(ts[1:] > ts[:-1]):
            raise ValueError("timestamps must be strictly increasing")
        if len(cl) and (not np.all(np.isfinite(cl)) or not np.all(cl > 0)):
            raise ValueError("closes must be finite and positive")
        if self.frequency is Frequency.DAILY and len(ts):
            if not np.array_equal(ts, ts.astype("datetime64[D]").astype("datetime64[s]")):
                raise ValueError("daily series must not retain a time-of-day component")

    def __len__(self) -> int:
        return len(self.closes)

    def dates(self) -> np.ndarray:
        return self.timestamps.astype("datetime64[D]")


def _classify_timestamp(text: str) -> str | None:
    """Return 'date', 'intraday', or None for unrecognized shapes."""
    if _DATE_RE.match(text):
        return "date"
    if _DT_COLON_RE.match(text) or _DT_HYPHEN_RE.match(text):
        return "intraday"
    return None


def _normalize_intraday(text: str) -> str:
    if _DT_HYPHEN_RE.match(text):
        date_part, time_part = text.split(" ")
        return date_part + " " + time_part.replace("-", ":")
    return text


def parse_csv(
    raw_text: str,
    frequency: Frequency,
    instrument_id: str,
    dt_col: str = "timestamp",
    close_col: str = "close",
) -> tuple[PriceSeries, Diagnostics]:
    """Parse raw CSV text into a normalized, ascending PriceSeries.

    Rows whose timestamp shape does not match the declared frequency, whose
    timestamp has invalid components, or whose price is non-positive or
    non-finite are dropped and counted in the returned diagnostics. Files
    mixing date-only and intraday stamps raise AmbiguousTimestampFormat;
    files with no valid rows raise EmptyInput.
    """
    reader = csv.DictReader(io.StringIO(raw_text))
    if reader.fieldnames is None:
        raise EmptyInput("no header row")
    if dt_col not in reader.fieldnames or close_col not in reader.fieldnames:
        raise EmptyInput(
            f"required columns {dt_col!r}/{close_col!r} not in header {reader.fieldnames}"
        )

    wanted_shape = "date" if frequency is Frequency.DAILY else "intraday"
    seen_shapes: set[str] = set()
    stamps: list[np.datetime64] = []
    prices: list[float] = []
    dropped = 0

    for row in reader:
        ts_text = (row.get(dt_col) or "").strip()
        price_text = (row.get(close_col) or "").strip()
        shape = _classify_timestamp(ts_text)
        if shape is not None:
            seen_shapes.add(shape)
        if shape != wanted_shape:
            dropped += 1
            continue
        try:
            ts = np.datetime64(_normalize_intraday(ts_text), "s")
        except ValueError:
            dropped += 1
            continue
        try:
            price = float(price_text)
        except ValueError:
            dropped += 1
            continue
        if not math.isfinite(price) or price <= 0:
            dropped += 1
            continue
        stamps.append(ts)
        prices.append(price)

    if len(seen_shapes) > 1:
        raise AmbiguousTimestampFormat(
            f"{instrument_id}: file mixes date-only and intraday timestamps"
        )
    if not stamps:
        raise EmptyInput(f"{instrument_id}: no valid rows")

    ts_arr = np.array(stamps, dtype="datetime64[s]")
    cl_arr = np.array(prices, dtype=np.float64)
    order = np.argsort(ts_arr, kind="stable")
    ts_arr = ts_arr[order]
    cl_arr = cl_arr[order]

    # Duplicate timestamps: keep the first occurrence, count the rest.
    if len(ts_arr) > 1:
        keep = np.concatenate(([True], ts_arr[1:] > ts_arr[:-1]))
        dup = int(len(ts_arr) - keep.sum())
        if dup:
            dropped += dup
            ts_arr = ts_arr[keep]
            cl_arr = cl_arr[keep]

    series = PriceSeries(instrument_id, frequency, ts_arr, cl_arr)
    return series, Diagnostics(dropped=dropped)


def parse_csv_file(
    path: str | Path,
    frequency: Frequency,
    instrument_id: str,
    dt_col: str = "timestamp",
    close_col: str = "close",
) -> tuple[PriceSeries, Diagnostics]:
    text = Path(path).read_text(encoding="utf-8")
    return parse_csv(text, frequency, instrument_id, dt_col=dt_col, close_col=close_col)


def format_timestamp(ts: np.datetime64, frequency: Frequency) -> str:
    if frequency is Frequency.DAILY:
        return str(ts.astype("datetime64[D]"))
    return str(ts.astype("datetime64[s]")).replace("T", " ")


def serialize_csv(series: PriceSeries) -> str:
    """Render a PriceSeries in the normalized format: header 'timestamp,close',
    closes with 6 decimal places. parse_csv of the result reproduces the
    series whenever the closes are representable at that precision."""
    lines = ["timestamp,close"]
    for ts, close in zip(series.timestamps, series.closes):
        lines.append(f"{format_timestamp(ts, series.frequency)},{close:.6f}")
    return "\n".join(lines) + "\n"


def dedup_closed_market(
    series: PriceSeries, run_length: int = DEFAULT_DEDUP_RUN_LENGTH
) -> tuple[PriceSeries, Diagnostics]:
    """Truncate maximal runs of identical consecutive closes longer than
    ``run_length`` to their first point.

    Intended for 5-minute data, where such runs are closed-market copies of
    the last open quote. Daily series are returned unchanged with a warning
    diagnostic. Idempotent: truncated runs have length one and maximal runs
    are bounded by differing values on both sides.
    """
    if series.frequency is Frequency.DAILY:
        return series, Diagnostics(
            warnings=[f"{series.instrument_id}: daily series left unchanged by dedup"]
        )
    n = len(series)
    if n == 0:
        return series, Diagnostics()

    change = np.empty(n, dtype=bool)
    change[0] = True
    np.not_equal(series.closes[1:], series.closes[:-1], out=change[1:])
    run_starts = np.flatnonzero(change)
    run_lengths = np.diff(np.append(run_starts, n))

    keep = np.ones(n, dtype=bool)
    for start, length in zip(run_starts, run_lengths):
        if length > run_length:
            keep[start + 1 : start + length] = False

    removed = int(n - keep.sum())
    if removed == 0:
        return series, Diagnostics()
    out = PriceSeries(
        series.instrument_id,
        series.frequency,
        series.timestamps[keep],
        series.closes[keep],
    )
    return out, Diagnostics(removed=removed)


def aggregate_to_daily(series: PriceSeries) -> PriceSeries:
    """Collapse an intraday series to one point per calendar date, keeping
    the last close of each date."""
    if len(series) == 0:
        raise EmptyInput(f"{series.instrument_id}: nothing to aggregate")
    dates = series.dates()
    uniq, first_idx = np.unique(dates, return_index=True)
    last_idx = np.append(first_idx[1:], len(dates)) - 1
    return PriceSeries(
        series.instrument_id,
        Frequency.DAILY,
        uniq.astype("datetime64[s]"),
        series.closes[last_idx],
    )
