"""Binned Shannon entropy of return windows.

Returns in a window are partitioned into ``n_bins`` evenly spaced
intervals; the entropy of the resulting interval probability masses,

    H = -sum_i p_i * ln(p_i)        (0 * ln 0 = 0, natural log)

measures how diffused the realized outcomes are: high when many bins carry
comparable mass, low when mass concentrates in few bins. 0 <= H <= ln(n_bins).

Bins are half-open [lo + i*w, lo + (i+1)*w) with the last bin closed on
the right, so the maximum value is always counted. The bin count comes
from the rule n = ceil(2*sqrt(N)) applied once to a baseline window and
is then held fixed across an analysis run; the bin *range* is either
recomputed per window (default, scale-free) or fixed for cross-window
mass comparability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyWindow, OutOfRange
from .returns import ReturnSeries, WindowSlice, slice_values


def velleman_bins(sample_count: int) -> int:
    """Bin count n = ceil(2 * sqrt(N)), at least 1."""
    if sample_count < 1:
        raise ValueError("sample_count must be positive")
    return max(1, math.ceil(2.0 * math.sqrt(sample_count)))


@dataclass(frozen=True)
class BinningSpec:
    """Evenly spaced binning. Both bounds None selects a per-window range
    (min/max of each binned sample); both set selects a fixed range."""

    n_bins: int
    lo: float | None = None
    hi: float | None = None

    def __post_init__(self):
        if self.n_bins < 1:
            raise ValueError("n_bins must be >= 1")
        if (self.lo is None) != (self.hi is None):
            raise ValueError("lo and hi must be set together")
        if self.lo is not None and not self.hi > self.lo:
            raise ValueError("fixed range requires hi > lo")

    @property
    def is_fixed(self) -> bool:
        return self.lo is not None

    @property
    def bin_width(self) -> float | None:
        if self.lo is None:
            return None
        return (self.hi - self.lo) / self.n_bins


@dataclass(frozen=True, eq=False)
class BinnedDistribution:
    """Interval probability masses over the resolved bin range.

    ``masses`` sums to 1; a degenerate all-equal sample under per-window
    ranging collapses to a single bin of mass 1. ``clamped_count`` reports
    values outside a fixed range that were clamped into the end bins.
    """

    spec: BinningSpec
    lo: float
    hi: float
    masses: np.ndarray
    support_count: int
    clamped_count: int = 0

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=np.float64)
        object.__setattr__(self, "masses", m)
        if self.support_count < 1:
            raise ValueError("support_count must be >= 1")
        if np.any(m < -1e-12) or np.any(m > 1 + 1e-12) or abs(float(m.sum()) - 1.0) > 1e-12:
            raise ValueError("masses must be a probability vector")

    @property
    def n_bins(self) -> int:
        return len(self.masses)

    def edges(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n_bins + 1)


def bin_returns(values, spec: BinningSpec) -> BinnedDistribution:
    """Assign values to evenly spaced bins and normalize counts to masses.

    With a fixed range, out-of-range values are clamped into the end bins
    and counted in ``clamped_count``. With a per-window range an all-equal
    sample yields the degenerate single-bin distribution.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.size == 0:
        raise EmptyWindow("cannot bin an empty window")
    if not np.all(np.isfinite(vals)):
        raise ValueError("values must be finite")

    clamped = 0
    if spec.is_fixed:
        lo, hi = float(spec.lo), float(spec.hi)
        clamped = int(np.count_nonzero((vals < lo) | (vals > hi)))
    else:
        lo = float(vals.min())
        hi = float(vals.max())
        if hi == lo:
            return BinnedDistribution(spec, lo, hi, np.array([1.0]), int(vals.size))

    n = spec.n_bins
    idx = np.floor((vals - lo) / (hi - lo) * n).astype(np.int64)
    np.clip(idx, 0, n - 1, out=idx)
    counts = np.bincount(idx, minlength=n)
    masses = counts / vals.size
    return BinnedDistribution(spec, lo, hi, masses, int(vals.size), clamped)


def shannon_entropy(dist: BinnedDistribution) -> float:
    p = dist.masses[dist.masses > 0]
    return float(-(p * np.log(p)).sum()) + 0.0  # normalize -0.0


def window_entropy(returns: ReturnSeries, window: WindowSlice, spec: BinningSpec) -> float:
    """Entropy of one window of a return series: bin, then sum."""
    return shannon_entropy(bin_returns(slice_values(returns, window), spec))


@dataclass(frozen=True)
class PmfSnapshot:
    """A single-day distribution and a multi-day span distribution under one
    shared fixed binning, so their masses are directly comparable."""

    day: np.datetime64
    day_dist: BinnedDistribution
    span_dist: BinnedDistribution
    day_entropy: float
    span_entropy: float


def pmf_snapshot(
    returns: ReturnSeries, day, preceding_days: int = 14, n_bins: int | None = None
) -> PmfSnapshot:
    """Distribution of one day's returns next to the distribution of that day
    plus its ``preceding_days`` trading days, binned identically over the
    pooled range."""
    target = np.datetime64(day, "D")
    dates = returns.dates()
    day_mask = dates == target
    if not day_mask.any():
        raise OutOfRange(f"{returns.instrument_id}: no observations on {target}")

    prior = np.unique(dates[dates < target])
    if len(prior) < preceding_days:
        raise OutOfRange(
            f"{returns.instrument_id}: only {len(prior)} trading days precede {target} "
            f"(requested {preceding_days})"
        )
    span_start_date = prior[-preceding_days] if preceding_days else target
    span_mask = (dates >= span_start_date) & (dates <= target)

    day_values = returns.values[day_mask]
    span_values = returns.values[span_mask]
    if n_bins is None:
        n_bins = velleman_bins(len(day_values))

    lo = float(span_values.min())
    hi = float(span_values.max())
    # A constant span cannot support a fixed range; both sides degenerate.
    spec = BinningSpec(n_bins) if hi == lo else BinningSpec(n_bins, lo=lo, hi=hi)
    day_dist = bin_returns(day_values, spec)
    span_dist = bin_returns(span_values, spec)
    return PmfSnapshot(
        target, day_dist, span_dist, shannon_entropy(day_dist), shannon_entropy(span_dist)
    )
