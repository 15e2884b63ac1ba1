"""Timestamped pipeline outputs (the output buffer history) and their JSON-lines format.

A stream log file holds one or more runs. Each run starts with a `run` record followed by
its `job` records, one JSON object per line:

    {"record": "run", "schema_version": 1, "policy": "delay_adaptive", "fps": 30.0,
     "sequence": 0, "config_digest": "...", "world_digest": "...", "job_count": 2,
     "delay_stats": {"count": 2, "mean_ms": ..., "std_ms": ..., "min_ms": ..., "max_ms": ...}}
    {"record": "job", "schema_version": 1, "job_index": 0, "input_frame_index": 0,
     "capture_ms": 0.0, "start_ms": 0.0, "preprocess_ms": 12.5, "inference_ms": 37.5,
     "completion_ms": 50.0, "target_n": 1, "effective_gap": 0, "degenerate": true,
     "trend_ms": null, "boxes": [{"x1": ..., "y1": ..., "x2": ..., "y2": ...,
     "class_id": 0, "score": 1.0, "track_id": 3}]}
"""

import bisect
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from core.errors import SchemaVersionError
from core.frames import TIME_EPSILON_MS
from core.geometry import BBox
from latency.traces import DelayStats, summarize_delays
from scheduler.feature_select import PolicyKind

logger = logging.getLogger(__name__)

STREAM_LOG_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PipelineJob:
    """One processed frame: timing, forecast metadata and emitted boxes."""

    job_index: int
    input_frame_index: int
    capture_ms: float
    start_ms: float
    preprocess_ms: float
    inference_ms: float
    completion_ms: float
    boxes: tuple[BBox, ...] = ()
    target_n: int = 0
    effective_gap: int = 0
    degenerate: bool = False
    trend_ms: Optional[float] = None

    def __post_init__(self) -> None:
        expected = self.start_ms + self.preprocess_ms + self.inference_ms
        if abs(self.completion_ms - expected) > TIME_EPSILON_MS * max(1.0, abs(expected)):
            raise ValueError(f"job {self.job_index}: completion {self.completion_ms} != start + delays {expected}")
        if self.start_ms < self.capture_ms - TIME_EPSILON_MS:
            raise ValueError(f"job {self.job_index}: started before its frame was captured")

    @property
    def total_ms(self) -> float:
        return self.preprocess_ms + self.inference_ms

    def to_record(self) -> dict[str, Any]:
        return {
            "record": "job",
            "schema_version": STREAM_LOG_SCHEMA_VERSION,
            "job_index": self.job_index,
            "input_frame_index": self.input_frame_index,
            "capture_ms": self.capture_ms,
            "start_ms": self.start_ms,
            "preprocess_ms": self.preprocess_ms,
            "inference_ms": self.inference_ms,
            "completion_ms": self.completion_ms,
            "target_n": self.target_n,
            "effective_gap": self.effective_gap,
            "degenerate": self.degenerate,
            "trend_ms": self.trend_ms,
            "boxes": [box.to_dict() for box in self.boxes],
        }

    @classmethod
    def from_record(cls, data: dict[str, Any]) -> "PipelineJob":
        trend = data.get("trend_ms")
        return cls(
            job_index=int(data["job_index"]),
            input_frame_index=int(data["input_frame_index"]),
            capture_ms=float(data["capture_ms"]),
            start_ms=float(data["start_ms"]),
            preprocess_ms=float(data["preprocess_ms"]),
            inference_ms=float(data["inference_ms"]),
            completion_ms=float(data["completion_ms"]),
            boxes=tuple(BBox.from_dict(box) for box in data.get("boxes", [])),
            target_n=int(data.get("target_n", 0)),
            effective_gap=int(data.get("effective_gap", 0)),
            degenerate=bool(data.get("degenerate", False)),
            trend_ms=None if trend is None else float(trend),
        )


@dataclass(frozen=True)
class StreamLog:
    """Ordered jobs of one single-pipeline run."""

    policy: PolicyKind
    fps: float
    jobs: tuple[PipelineJob, ...] = ()
    config_digest: str = ""
    world_digest: str = ""
    sequence: int = 0
    delay_stats: DelayStats = field(default_factory=DelayStats)
    _completions: tuple[float, ...] = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for prev, job in zip(self.jobs, self.jobs[1:]):
            if job.input_frame_index <= prev.input_frame_index:
                raise ValueError(f"job {job.job_index} reprocesses frame {job.input_frame_index}")
            if job.start_ms < prev.completion_ms - TIME_EPSILON_MS:
                raise ValueError(f"job {job.job_index} overlaps job {prev.job_index}")
        object.__setattr__(self, "_completions", tuple(job.completion_ms for job in self.jobs))

    @classmethod
    def build(
        cls,
        policy: PolicyKind,
        fps: float,
        jobs: list[PipelineJob],
        config_digest: str = "",
        world_digest: str = "",
        sequence: int = 0
    ) -> "StreamLog":
        """Assemble a log and compute its delay summary."""
        return cls(
            policy=policy,
            fps=fps,
            jobs=tuple(jobs),
            config_digest=config_digest,
            world_digest=world_digest,
            sequence=sequence,
            delay_stats=summarize_delays(job.total_ms for job in jobs),
        )

    def latest_job(self, query_ms: float) -> Optional[PipelineJob]:
        """Job with the largest completion time at or before query_ms."""
        position = bisect.bisect_right(self._completions, query_ms + TIME_EPSILON_MS)
        return self.jobs[position - 1] if position else None

    def to_record(self) -> dict[str, Any]:
        return {
            "record": "run",
            "schema_version": STREAM_LOG_SCHEMA_VERSION,
            "policy": self.policy.value,
            "fps": self.fps,
            "sequence": self.sequence,
            "config_digest": self.config_digest,
            "world_digest": self.world_digest,
            "job_count": len(self.jobs),
            "delay_stats": self.delay_stats.to_dict(),
        }


def query_buffer(log: StreamLog, query_ms: float) -> tuple[BBox, ...]:
    """Output buffer contents at query_ms; empty before the first completion."""
    if query_ms < 0:
        raise ValueError(f"query_ms must be >= 0, got {query_ms}")
    job = log.latest_job(query_ms)
    return job.boxes if job is not None else ()


# ============== JSON Lines ==============


def _check_version(record: dict[str, Any], line_number: int) -> None:
    version = record.get("schema_version")
    if version != STREAM_LOG_SCHEMA_VERSION:
        logger.error("Unsupported stream log record on line %d", line_number)
        raise SchemaVersionError(version, STREAM_LOG_SCHEMA_VERSION)


def save_stream_logs(logs: list[StreamLog], path: Path) -> None:
    """Write runs as JSON lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for log in logs:
            f.write(json.dumps(log.to_record(), sort_keys=True) + "\n")
            for job in log.jobs:
                f.write(json.dumps(job.to_record(), sort_keys=True) + "\n")


def load_stream_logs(path: Path) -> list[StreamLog]:
    """Read every run in a JSON-lines stream log."""
    runs: list[tuple[dict[str, Any], list[PipelineJob]]] = []
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}:{line_number}: invalid JSON ({e.msg})") from None
            _check_version(record, line_number)
            if record.get("record") == "run":
                runs.append((record, []))
            elif record.get("record") == "job":
                if not runs:
                    raise ValueError(f"{path}:{line_number}: job record before any run record")
                runs[-1][1].append(PipelineJob.from_record(record))
            else:
                raise ValueError(f"{path}:{line_number}: unknown record type {record.get('record')!r}")

    logs = []
    for header, jobs in runs:
        logs.append(StreamLog(
            policy=PolicyKind(header["policy"]),
            fps=float(header["fps"]),
            jobs=tuple(jobs),
            config_digest=header.get("config_digest", ""),
            world_digest=header.get("world_digest", ""),
            sequence=int(header.get("sequence", 0)),
            delay_stats=DelayStats.from_dict(header["delay_stats"]),
        ))
    return logs
