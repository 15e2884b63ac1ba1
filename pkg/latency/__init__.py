"""Latency models, delay traces and measured delay environments."""

from latency.models import (
    DEFAULT_PREPROCESS_FRACTION,
    DelaySample,
    LatencyKind,
    LatencyModel,
    LatencySampler,
    constant_model,
    fit_shifted_lognormal,
    quantize_ms,
    sample,
    split_delay,
    trace_replay_model,
)
from latency.presets import (
    DelayEnvironment,
    EnvironmentStats,
    environment_model,
    environment_stats,
)
from latency.traces import (
    DelayStats,
    DelayTrace,
    load_trace,
    sample_trace,
    save_trace,
    summarize_delays,
)

__all__ = [
    # Models
    "DEFAULT_PREPROCESS_FRACTION",
    "DelaySample",
    "LatencyKind",
    "LatencyModel",
    "LatencySampler",
    "constant_model",
    "fit_shifted_lognormal",
    "quantize_ms",
    "sample",
    "split_delay",
    "trace_replay_model",
    # Environments
    "DelayEnvironment",
    "EnvironmentStats",
    "environment_model",
    "environment_stats",
    # Traces
    "DelayStats",
    "DelayTrace",
    "load_trace",
    "sample_trace",
    "save_trace",
    "summarize_delays",
]
