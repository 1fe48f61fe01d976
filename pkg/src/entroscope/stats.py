"""Descriptive statistics and before/after window comparisons.

Skewness is the adjusted Fisher-Pearson standardized third moment and
kurtosis is excess kurtosis, both with small-sample bias corrections;
variance uses the N-1 denominator and quartiles linear interpolation of
order statistics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .entropy import BinningSpec, velleman_bins, window_entropy
from .errors import DegenerateDenominator, TooShort
from .returns import ReturnSeries, WindowSlice, slice_values


class Metric(Enum):
    ENTROPY = "entropy"
    STD_DEV = "std_dev"
    KURTOSIS = "kurtosis"


@dataclass(frozen=True)
class SummaryStats:
    count: int
    mean: float
    variance: float
    std_dev: float
    minimum: float
    maximum: float
    q1: float
    median: float
    q3: float
    skewness: float
    kurtosis: float


@dataclass(frozen=True)
class BeforeAfterComparison:
    metric_name: str
    before: float
    after: float
    pct_difference: float


def summarize_values(values) -> SummaryStats:
    """Summary statistics of a raw sample. Requires at least 4 observations
    (the kurtosis correction needs N > 3). A constant sample reports zero
    skewness and zero excess kurtosis."""
    vals = np.asarray(values, dtype=np.float64)
    n = vals.size
    if n < 4:
        raise TooShort(f"need at least 4 observations, got {n}")

    mean = float(vals.mean())
    variance = float(vals.var(ddof=1))
    d = vals - mean
    m2 = float((d * d).mean())
    if m2 == 0.0:
        skewness = 0.0
        kurtosis = 0.0
    else:
        # standardize first so higher moments stay O(1) even for tiny spreads
        z = d / math.sqrt(m2)
        g1 = float((z * z * z).mean())
        skewness = g1 * math.sqrt(n * (n - 1)) / (n - 2)
        g2 = float((z * z * z * z).mean()) - 3.0
        kurtosis = ((n - 1) / ((n - 2) * (n - 3))) * ((n + 1) * g2 + 6.0)

    q1, median, q3 = np.quantile(vals, [0.25, 0.5, 0.75])
    return SummaryStats(
        count=int(n),
        mean=mean,
        variance=variance,
        std_dev=math.sqrt(variance),
        minimum=float(vals.min()),
        maximum=float(vals.max()),
        q1=float(q1),
        median=float(median),
        q3=float(q3),
        skewness=float(skewness),
        kurtosis=float(kurtosis),
    )


def summarize(returns: ReturnSeries, window: WindowSlice) -> SummaryStats:
    return summarize_values(slice_values(returns, window))


def pct_difference(before: float, after: float) -> float:
    """Signed symmetric percentage difference (after - before) / midpoint,
    as a fraction. Reporting layers may take the magnitude."""
    denom = (before + after) / 2.0
    if denom == 0.0:
        raise DegenerateDenominator(f"midpoint of ({before}, {after}) is zero")
    return (after - before) / denom


def compare_windows(
    returns: ReturnSeries,
    before: WindowSlice,
    after: WindowSlice,
    metric: Metric,
    binning: BinningSpec | None = None,
) -> BeforeAfterComparison:
    """Evaluate one metric independently on two windows and attach the
    symmetric percentage difference.

    For the entropy metric the bin count defaults to the rule applied to
    the before-window length and is used for both windows.
    """
    if metric is Metric.ENTROPY:
        if binning is None:
            binning = BinningSpec(velleman_bins(len(before)))
        b = window_entropy(returns, before, binning)
        a = window_entropy(returns, after, binning)
    elif metric is Metric.STD_DEV:
        b = summarize(returns, before).std_dev
        a = summarize(returns, after).std_dev
    else:
        b = summarize(returns, before).kurtosis
        a = summarize(returns, after).kurtosis
    return BeforeAfterComparison(metric.value, b, a, pct_difference(b, a))
