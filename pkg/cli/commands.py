"""Command implementations: simulate, compare, histogram, fit-latency and evaluate.

Each command returns its result and writes its artifacts; printing and exit codes are left
to main.py. All policies of one experiment replay the same latency draws (paired
comparison): per sequence one trace is drawn up front and every policy consumes it from
the start.
"""

import csv
import json
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

import numpy as np

import config as settings
from cli.run_config import RunConfig, load_run_config, parse_policies, run_config_from_dict
from core.errors import ConfigError
from core.frames import FrameClock
from latency.models import DelaySample, LatencyKind, LatencyModel, LatencySampler, fit_shifted_lognormal
from latency.presets import environment_model
from latency.traces import DelayTrace, load_trace, sample_trace, save_trace, summarize_delays
from scheduler.feature_select import PolicyKind
from streameval.coco import load_coco_ground_truth
from streameval.evaluator import EvalReport, evaluate_sequences
from streameval.pipeline import simulate
from streameval.stream_log import StreamLog, load_stream_logs, save_stream_logs
from worldsim.models import DEFAULT_FPS, WorldSpec

logger = logging.getLogger(__name__)

STREAM_LOG_FILE = "stream_log.jsonl"
REPORT_FILE = "report.json"
DELAYS_FILE = "delays.csv"
COMPARISON_FILE = "comparison.csv"
HISTOGRAM_FILE = "delay_histogram.csv"
EVALUATION_FILE = "evaluation.json"

COMPARISON_HEADER = [
    "policy",
    "sap",
    "sap50",
    "sap75",
    "sap_small",
    "sap_medium",
    "sap_large",
    "mean_delay_ms",
    "std_delay_ms",
    "min_delay_ms",
    "max_delay_ms",
]

HISTOGRAM_HEADER = ["bin_start_ms", "count", "kind"]


@dataclass
class ExperimentResult:
    """Stream logs and reports of one experiment, keyed by policy."""

    config: RunConfig
    worlds: list[WorldSpec]
    logs: dict[PolicyKind, list[StreamLog]] = field(default_factory=dict)
    reports: dict[PolicyKind, EvalReport] = field(default_factory=dict)
    delays: list[DelaySample] = field(default_factory=list)

    def all_logs(self) -> list[StreamLog]:
        return [log for policy in self.config_policies() for log in self.logs[policy]]

    def config_policies(self) -> list[PolicyKind]:
        return list(dict.fromkeys(self.config.policies))


# ============== Experiment ==============


def _sequence_traces(config: RunConfig, worlds: list[WorldSpec]) -> list[list[DelaySample]]:
    """Latency draws for each sequence, long enough for one job per frame."""
    if config.latency.kind == LatencyKind.TRACE_REPLAY:
        assert config.latency.path is not None
        # Sequences take the recorded trace from a shared cursor
        return [list(load_trace(Path(config.latency.path)).samples)]
    traces = []
    for sequence, world in enumerate(worlds):
        model = config.latency.build(config.seed, sequence)
        traces.append(list(sample_trace(model, world.duration_frames).samples))
    return traces


def run_experiment(config: RunConfig) -> ExperimentResult:
    """Simulate every configured policy over every sequence and evaluate each policy.

    Raises TraceExhaustedError if a replayed latency trace runs out.
    """
    clock = config.clock
    policies = list(dict.fromkeys(config.policies))
    worlds = [config.world.build(config.seed, config.fps, s) for s in range(config.sequences)]
    observers = [config.observer.build(config.seed, s) for s in range(config.sequences)]
    traces = _sequence_traces(config, worlds)
    replay_trace = config.latency.kind == LatencyKind.TRACE_REPLAY
    config_digest = config.digest()

    result = ExperimentResult(config=config, worlds=worlds, logs={p: [] for p in policies})
    cursor = 0
    for sequence, (world, observer) in enumerate(zip(worlds, observers)):
        trace = traces[0][cursor:] if replay_trace else traces[sequence]
        consumed = 0
        for policy in policies:
            sampler = LatencySampler.from_samples(trace, seed=config.seed)
            logger.info("Simulating %s on sequence %d", policy.value, sequence)
            log = simulate(
                world,
                observer,
                sampler,
                policy,
                clock,
                queue_capacity=config.queue_capacity,
                config_digest=config_digest,
                sequence=sequence,
            )
            result.logs[policy].append(log)
            consumed = max(consumed, sampler.draw_index)
        result.delays.extend(trace[:consumed])
        cursor += consumed

    for policy in policies:
        runs = list(zip(worlds, result.logs[policy]))
        result.reports[policy] = evaluate_sequences(runs, clock, warmup_frames=config.warmup_frames)
    return result


def resolve_output_dir(config: RunConfig, out: Optional[Path]) -> Path:
    """--out wins over run.output_dir, which wins over STREAMSIM_OUTPUT_DIR."""
    if out is not None:
        return Path(out)
    if config.output_dir is not None:
        return config.output_dir
    return Path(settings.OUTPUT_DIR)


def _load_config(config_path: Path, seed: Optional[int], policies: Optional[str]) -> RunConfig:
    config = load_run_config(config_path, seed=seed)
    if policies:
        config = replace(config, policies=parse_policies(policies))
    return config


def _write_json(data: Any, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, sort_keys=True, indent=2, allow_nan=False)
        f.write("\n")


# ============== simulate ==============


@dataclass(frozen=True)
class SimulateOutput:
    output_dir: Path
    reports: dict[PolicyKind, EvalReport]


def build_report_document(result: ExperimentResult) -> dict[str, Any]:
    """report.json content: the resolved configuration plus one report per policy."""
    return {
        "config": result.config.to_dict(),
        "config_digest": result.config.digest(),
        "reports": {policy.value: report.to_dict() for policy, report in result.reports.items()},
    }


def cmd_simulate(
    config_path: Path,
    seed: Optional[int] = None,
    out: Optional[Path] = None,
    policies: Optional[str] = None
) -> SimulateOutput:
    """Run an experiment and write stream_log.jsonl, report.json and delays.csv."""
    config = _load_config(config_path, seed, policies)
    result = run_experiment(config)

    output_dir = resolve_output_dir(config, out)
    output_dir.mkdir(parents=True, exist_ok=True)
    save_stream_logs(result.all_logs(), output_dir / STREAM_LOG_FILE)
    _write_json(build_report_document(result), output_dir / REPORT_FILE)
    save_trace(DelayTrace.from_samples(result.delays), output_dir / DELAYS_FILE)

    logger.info("Wrote %s, %s and %s to %s", STREAM_LOG_FILE, REPORT_FILE, DELAYS_FILE, output_dir)
    return SimulateOutput(output_dir=output_dir, reports=result.reports)


def rerun_report(report_path: Path) -> dict[str, Any]:
    """Re-run the configuration embedded in a report.json and return the new document."""
    with open(report_path, encoding="utf-8") as f:
        document = json.load(f)
    config = run_config_from_dict(document["config"])
    return build_report_document(run_experiment(config))


# ============== compare ==============


@dataclass(frozen=True)
class CompareOutput:
    path: Path
    rows: list[EvalReport]


def _format_cell(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6f}"


def comparison_row(report: EvalReport) -> list[str]:
    stats = report.delay_stats
    return [
        report.policy,
        *(_format_cell(value) for value in report.ap_fields().values()),
        _format_cell(stats.mean_ms),
        _format_cell(stats.std_ms),
        _format_cell(stats.min_ms),
        _format_cell(stats.max_ms),
    ]


def cmd_compare(
    config_path: Path,
    policies: Optional[str] = None,
    seed: Optional[int] = None,
    out: Optional[Path] = None
) -> CompareOutput:
    """Paired comparison of at least two policies; one CSV row per listed policy."""
    config = _load_config(config_path, seed, policies)
    if len(config.policies) < 2:
        raise ConfigError("run.policies", "compare needs at least two policies")

    result = run_experiment(config)
    rows = [result.reports[policy] for policy in config.policies]

    output_dir = resolve_output_dir(config, out)
    output_dir.mkdir(parents=True, exist_ok=True)
    path = output_dir / COMPARISON_FILE
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(COMPARISON_HEADER)
        for report in rows:
            writer.writerow(comparison_row(report))

    logger.info("Wrote comparison of %d policies to %s", len(rows), path)
    return CompareOutput(path=path, rows=rows)


# ============== histogram ==============


@dataclass(frozen=True)
class HistogramBin:
    start_ms: float
    count: int


@dataclass(frozen=True)
class Histogram:
    bins: list[HistogramBin]
    markers: list[float]
    job_count: int
    path: Optional[Path] = None


def delay_histogram(totals: list[float], bin_width_ms: float, frame_interval_ms: float) -> Histogram:
    """Bins of bin_width_ms starting at the minimum delay and covering the maximum.

    Markers are the multiples of the frame interval up to the first one at or above the
    maximum delay.
    """
    if not bin_width_ms > 0 or not math.isfinite(bin_width_ms):
        raise ValueError(f"bin width must be a positive number, got {bin_width_ms}")
    if not totals:
        logger.warning("Stream log has no jobs, histogram is empty")
        return Histogram(bins=[], markers=[], job_count=0)

    values = np.asarray(totals, dtype=np.float64)
    low, high = float(values.min()), float(values.max())
    bin_count = int(math.floor((high - low) / bin_width_ms)) + 1
    edges = low + bin_width_ms * np.arange(bin_count + 1)
    counts, _ = np.histogram(values, bins=edges)

    marker_count = max(1, math.ceil(high / frame_interval_ms - 1e-9))
    return Histogram(
        bins=[HistogramBin(float(start), int(count)) for start, count in zip(edges[:-1], counts)],
        markers=[k * frame_interval_ms for k in range(1, marker_count + 1)],
        job_count=int(values.size),
    )


def cmd_histogram(
    stream_log_path: Path,
    bin_width_ms: float,
    out: Optional[Path] = None,
    policy: Optional[str] = None
) -> Histogram:
    """Histogram of total per-job delay in a stream log, with frame-interval marker rows."""
    logs = load_stream_logs(stream_log_path)
    if policy:
        logs = [log for log in logs if log.policy == PolicyKind(policy)]
    fps_values = {log.fps for log in logs}
    if len(fps_values) > 1:
        raise ValueError(f"stream log mixes frame rates {sorted(fps_values)}")
    fps = fps_values.pop() if fps_values else DEFAULT_FPS
    histogram = delay_histogram(
        [job.total_ms for log in logs for job in log.jobs],
        bin_width_ms,
        FrameClock(fps).frame_interval,
    )

    output_dir = Path(out) if out is not None else Path(stream_log_path).parent
    output_dir.mkdir(parents=True, exist_ok=True)
    path = output_dir / HISTOGRAM_FILE
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(HISTOGRAM_HEADER)
        for item in histogram.bins:
            writer.writerow([f"{item.start_ms:.6f}", item.count, "bin"])
        for marker in histogram.markers:
            writer.writerow([f"{marker:.6f}", "", "frame_interval"])

    logger.info("Wrote %d bins for %d jobs to %s", len(histogram.bins), histogram.job_count, path)
    return Histogram(histogram.bins, histogram.markers, histogram.job_count, path)


# ============== fit-latency ==============


@dataclass(frozen=True)
class FitOutput:
    model: LatencyModel
    empirical: Optional[dict[str, float]] = None


def cmd_fit_latency(
    mean_ms: Optional[float] = None,
    std_ms: Optional[float] = None,
    min_ms: Optional[float] = None,
    environment: Optional[str] = None,
    measured_with: str = "adaptive",
    samples: int = 0,
    seed: int = 0
) -> FitOutput:
    """Fit a shifted log-normal (or look up an environment) and optionally draw from it."""
    if environment:
        try:
            model = environment_model(environment, measured_with, seed=seed)
        except ValueError as e:
            raise ConfigError("latency.environment", str(e)) from None
    else:
        if mean_ms is None or std_ms is None or min_ms is None:
            raise ConfigError("latency", "give --mean, --std and --min, or --environment")
        try:
            model = fit_shifted_lognormal(mean_ms, std_ms, min_ms, seed=seed)
        except ValueError as e:
            raise ConfigError("latency.mean_ms", str(e)) from None

    if samples < 0:
        raise ConfigError("samples", f"must be >= 0, got {samples}")
    if samples == 0:
        return FitOutput(model=model)

    stats = summarize_delays(sample_trace(model, samples).totals())
    logger.info("Drew %d samples from fitted model", samples)
    return FitOutput(
        model=model,
        empirical={"mean_ms": stats.mean_ms, "std_ms": stats.std_ms, "min_ms": stats.min_ms, "max_ms": stats.max_ms},
    )


# ============== evaluate ==============


@dataclass(frozen=True)
class EvaluateOutput:
    path: Path
    reports: dict[str, EvalReport]


def cmd_evaluate(
    stream_log_path: Path,
    ground_truth_path: Path,
    fps: Optional[float] = None,
    warmup_frames: int = 0,
    out: Optional[Path] = None
) -> EvaluateOutput:
    """Score a stream log offline against COCO-format ground truth.

    Frame k of the annotation file is captured at k / fps; fps defaults to the log's.
    """
    if not Path(ground_truth_path).exists():
        raise ConfigError("ground_truth", f"file not found: {ground_truth_path}")
    if fps is not None and not fps > 0:
        raise ConfigError("clock.fps", f"must be > 0, got {fps}")
    if warmup_frames < 0:
        raise ConfigError("evaluation.warmup_frames", f"must be >= 0, got {warmup_frames}")

    frames = load_coco_ground_truth(ground_truth_path)
    logs = load_stream_logs(stream_log_path)
    by_policy: dict[str, list[StreamLog]] = defaultdict(list)
    for log in logs:
        by_policy[log.policy.value].append(log)

    reports = {}
    for policy, policy_logs in by_policy.items():
        if len(policy_logs) != 1:
            raise ValueError(f"{policy}: COCO ground truth covers one sequence, log has {len(policy_logs)}")
        log = policy_logs[0]
        clock = FrameClock(fps if fps is not None else log.fps)
        reports[policy] = evaluate_sequences([(frames, log)], clock, warmup_frames=warmup_frames)

    output_dir = Path(out) if out is not None else Path(stream_log_path).parent
    output_dir.mkdir(parents=True, exist_ok=True)
    path = output_dir / EVALUATION_FILE
    _write_json(
        {
            "ground_truth": str(ground_truth_path),
            "warmup_frames": warmup_frames,
            "reports": {policy: report.to_dict() for policy, report in reports.items()},
        },
        path,
    )
    logger.info("Wrote evaluation of %d policies to %s", len(reports), path)
    return EvaluateOutput(path=path, reports=reports)
