"""Expanding-window entropy spectra and extreme-event detection.

A sequence of nested windows anchored at one point grows by a fixed
increment: window k spans w0 + k*dt observations. Evaluating the binned
entropy on each window yields the sequence's spectrum H_0..H_m; sliding
the anchor by a stride produces overlapping sequences across the series.
Short, information-dense episodes reconfigure the interval masses and show
up as sharp ramps in these spectra.

The detector compares each sequence's peak entropy against a trailing
median baseline; a sequence is flagged when the excess exceeds a robust
dispersion estimate. Dispersion is the MAD of the baseline scaled to the
normal-consistent sigma, floored at a small fraction of ln(n_bins): the
MAD of a short baseline of near-identical peaks collapses toward zero,
and without the floor ordinary fluctuation would flag constantly. Flags
must persist over consecutive sequences to become an event, and events
are separated by at least one baseline width.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .entropy import BinningSpec, window_entropy
from .errors import InsufficientBaseline, SeriesTooShort
from .returns import ReturnSeries, WindowSlice

MAD_TO_SIGMA = 1.4826
DEFAULT_DISPERSION_FLOOR_FRACTION = 0.05

GROW_RIGHT = "grow-right"
GROW_LEFT = "grow-left"


@dataclass(frozen=True)
class WindowSequenceSpec:
    """Geometry of the sliding expanding-window construction.

    ``base_length`` observations in the smallest window, ``increment``
    observations added per step, ``steps`` expansions (so steps + 1 windows
    per sequence), ``stride`` between consecutive anchors. ``sequence_count``
    of None fills the series. Windows share their left edge and grow
    forward by default; ``grow-left`` shares the right edge instead.
    """

    base_length: int
    increment: int = 1
    steps: int = 0
    stride: int = 1
    sequence_count: int | None = None
    anchor_mode: str = GROW_RIGHT

    def __post_init__(self):
        if self.base_length < 2:
            raise ValueError("base_length must be >= 2")
        if self.increment < 1 or self.stride < 1 or self.steps < 0:
            raise ValueError("increment/stride must be >= 1 and steps >= 0")
        if self.sequence_count is not None and self.sequence_count < 1:
            raise ValueError("sequence_count must be >= 1")
        if self.anchor_mode not in (GROW_RIGHT, GROW_LEFT):
            raise ValueError(f"unknown anchor_mode {self.anchor_mode!r}")

    @property
    def span(self) -> int:
        return self.base_length + self.steps * self.increment


@dataclass(frozen=True, eq=False)
class EntropySpectrum:
    """Entropy values H_0..H_m of one window sequence."""

    sequence_index: int
    anchor_timestamp: np.datetime64
    values: np.ndarray
    windows: tuple[WindowSlice, ...]
    binning: BinningSpec

    @property
    def peak(self) -> float:
        return float(self.values.max())

    @property
    def span_start(self) -> int:
        return min(w.start_index for w in self.windows)

    @property
    def span_end(self) -> int:
        return max(w.end_index for w in self.windows)


@dataclass(frozen=True)
class EventSignature:
    """A flagged ramp: the sequence where flagging begins, the largest peak
    over the flagged run, the steepest single-step rise within the onset
    sequence, and how many consecutive sequences stayed flagged."""

    onset_index: int
    onset_timestamp: np.datetime64
    peak_value: float
    ramp_slope: float
    persistence: int


def build_sequences(series_length: int, spec: WindowSequenceSpec) -> list[list[WindowSlice]]:
    """All window sequences that fit in a series of the given length.

    Sequence j is anchored at index j*stride; its windows are strictly
    nested. Raises SeriesTooShort when even one sequence does not fit, or
    when an explicit sequence_count does not.
    """
    span = spec.span
    if series_length < span:
        raise SeriesTooShort(
            f"series length {series_length} cannot hold one sequence of span {span}"
        )
    max_count = (series_length - span) // spec.stride + 1
    count = spec.sequence_count if spec.sequence_count is not None else max_count
    if count > max_count:
        raise SeriesTooShort(
            f"series length {series_length} holds at most {max_count} sequences, "
            f"requested {count}"
        )

    sequences = []
    for j in range(count):
        anchor = j * spec.stride
        windows = []
        for k in range(spec.steps + 1):
            length = spec.base_length + k * spec.increment
            if spec.anchor_mode == GROW_RIGHT:
                windows.append(WindowSlice(anchor, anchor + length))
            else:
                right = anchor + span
                windows.append(WindowSlice(right - length, right))
        sequences.append(windows)
    return sequences


def spectrum(
    returns: ReturnSeries,
    sequence: list[WindowSlice],
    binning: BinningSpec,
    sequence_index: int = 0,
) -> EntropySpectrum:
    """Entropy of every window in one sequence. The bin count is fixed
    across the sequence by construction (one BinningSpec)."""
    values = np.array([window_entropy(returns, w, binning) for w in sequence])
    anchor = min(w.start_index for w in sequence)
    return EntropySpectrum(
        sequence_index, returns.timestamps[anchor], values, tuple(sequence), binning
    )


def _fixed_range_spectra(
    returns: ReturnSeries, sequences: list[list[WindowSlice]], binning: BinningSpec
) -> list[EntropySpectrum]:
    """Single-pass evaluation for a fixed bin range: every value's bin index
    is computed once, each window then only counts its slice. Counts are
    exact integers, so results match per-window rebinning bit for bit."""
    n = binning.n_bins
    idx = np.floor((returns.values - binning.lo) / (binning.hi - binning.lo) * n).astype(
        np.int64
    )
    np.clip(idx, 0, n - 1, out=idx)
    out = []
    for j, seq in enumerate(sequences):
        values = np.empty(len(seq))
        for k, w in enumerate(seq):
            counts = np.bincount(idx[w.start_index : w.end_index], minlength=n)
            p = counts[counts > 0] / len(w)
            values[k] = -(p * np.log(p)).sum()
        values[values == 0.0] = 0.0  # normalize -0.0
        anchor = min(w.start_index for w in seq)
        out.append(
            EntropySpectrum(j, returns.timestamps[anchor], values, tuple(seq), binning)
        )
    return out


def spectra_for_series(
    returns: ReturnSeries,
    seq_spec: WindowSequenceSpec,
    binning: BinningSpec,
    max_workers: int | None = None,
) -> list[EntropySpectrum]:
    """Spectra of all sequences, in anchor order.

    A fixed bin range takes a vectorized single-pass route. Otherwise
    sequences are evaluated window by window; they are independent given
    the immutable series, so with ``max_workers`` > 1 they run concurrently
    and merge back in deterministic anchor order.
    """
    sequences = build_sequences(len(returns), seq_spec)
    if binning.is_fixed:
        return _fixed_range_spectra(returns, sequences, binning)
    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(
                pool.map(
                    lambda arg: spectrum(returns, arg[1], binning, sequence_index=arg[0]),
                    enumerate(sequences),
                )
            )
    return [spectrum(returns, seq, binning, sequence_index=j) for j, seq in enumerate(sequences)]


def detect_events(
    spectra: list[EntropySpectrum],
    threshold: float = 3.0,
    min_persistence: int = 2,
    baseline: int = 8,
    dispersion_floor: float | None = None,
) -> list[EventSignature]:
    """Flag ramp-like excursions of peak entropy above a trailing baseline.

    For sequence j, the excess g_j = peak_j - median(previous ``baseline``
    peaks) is compared against ``threshold`` times the floored, sigma-scaled
    MAD of that baseline. At least ``min_persistence`` consecutive flags
    form an event anchored at the first flagged sequence; subsequent events
    must start at least ``baseline`` sequences later.

    ``dispersion_floor`` defaults to 0.05 * ln(n_bins), in entropy units,
    which keeps the default threshold meaningful on quiet data.
    """
    if min_persistence < 1 or baseline < 1:
        raise ValueError("min_persistence and baseline must be >= 1")
    required = max(baseline, 2 * min_persistence)
    if len(spectra) < required:
        raise InsufficientBaseline(
            f"need at least {required} spectra, got {len(spectra)}"
        )
    if dispersion_floor is None:
        dispersion_floor = DEFAULT_DISPERSION_FLOOR_FRACTION * math.log(
            max(spectra[0].binning.n_bins, 2)
        )

    peaks = np.array([sp.peak for sp in spectra])
    n = len(peaks)
    flagged = np.zeros(n, dtype=bool)
    for j in range(baseline, n):
        window = peaks[j - baseline : j]
        med = float(np.median(window))
        mad = MAD_TO_SIGMA * float(np.median(np.abs(window - med)))
        dispersion = max(mad, dispersion_floor)
        if peaks[j] - med > threshold * dispersion:
            flagged[j] = True

    events: list[EventSignature] = []
    j = 0
    while j < n:
        if not flagged[j]:
            j += 1
            continue
        run = 0
        while j + run < n and flagged[j + run]:
            run += 1
        if run < min_persistence:
            j += run
            continue
        onset = spectra[j]
        diffs = np.diff(onset.values)
        events.append(
            EventSignature(
                onset_index=j,
                onset_timestamp=onset.anchor_timestamp,
                peak_value=float(peaks[j : j + run].max()),
                ramp_slope=float(diffs.max()) if len(diffs) else 0.0,
                persistence=run,
            )
        )
        j += max(run, baseline)
    return events
