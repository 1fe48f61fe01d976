"""Information-theoretic market analysis: binned-entropy diagnostics,
expanding-window entropy spectra, and extreme-event localization for
price series, validated against a seedable synthetic market."""

from .cumulative import (
    EntropySpectrum,
    EventSignature,
    WindowSequenceSpec,
    build_sequences,
    detect_events,
    spectra_for_series,
    spectrum,
)
from .entropy import (
    BinnedDistribution,
    BinningSpec,
    PmfSnapshot,
    bin_returns,
    pmf_snapshot,
    shannon_entropy,
    velleman_bins,
    window_entropy,
)
from .errors import (
    AmbiguousTimestampFormat,
    DegenerateDenominator,
    EmptyInput,
    EmptyWindow,
    InsufficientBaseline,
    OutOfRange,
    PipelineError,
    SeriesTooShort,
    TooShort,
)
from .ingest import (
    Diagnostics,
    Frequency,
    PriceSeries,
    aggregate_to_daily,
    dedup_closed_market,
    parse_csv,
    parse_csv_file,
    serialize_csv,
)
from .returns import (
    ReturnKind,
    ReturnSeries,
    WindowSlice,
    bracket_windows,
    log_returns,
    nominal_returns,
    slice_window,
)
from .stats import (
    BeforeAfterComparison,
    Metric,
    SummaryStats,
    compare_windows,
    pct_difference,
    summarize,
    summarize_values,
)
from .synth import InjectionRecord, Shock, ShockShape, SynthSpec, generate

__version__ = "0.1.0"

__all__ = [
    "AmbiguousTimestampFormat",
    "BeforeAfterComparison",
    "BinnedDistribution",
    "BinningSpec",
    "DegenerateDenominator",
    "Diagnostics",
    "EmptyInput",
    "EmptyWindow",
    "EntropySpectrum",
    "EventSignature",
    "Frequency",
    "InjectionRecord",
    "InsufficientBaseline",
    "Metric",
    "OutOfRange",
    "PipelineError",
    "PmfSnapshot",
    "PriceSeries",
    "ReturnKind",
    "ReturnSeries",
    "SeriesTooShort",
    "Shock",
    "ShockShape",
    "SummaryStats",
    "SynthSpec",
    "TooShort",
    "WindowSequenceSpec",
    "WindowSlice",
    "aggregate_to_daily",
    "bin_returns",
    "bracket_windows",
    "build_sequences",
    "compare_windows",
    "dedup_closed_market",
    "detect_events",
    "generate",
    "log_returns",
    "nominal_returns",
    "parse_csv",
    "parse_csv_file",
    "pct_difference",
    "pmf_snapshot",
    "serialize_csv",
    "shannon_entropy",
    "slice_window",
    "spectra_for_series",
    "spectrum",
    "summarize",
    "summarize_values",
    "velleman_bins",
    "window_entropy",
]
