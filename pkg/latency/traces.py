"""Delay traces: summary statistics and CSV persistence.

Functions:
- summarize_delays(totals) -> DelayStats
- sample_trace(model, count) -> DelayTrace
- load_trace(path) -> DelayTrace
- save_trace(trace, path) -> None
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np

from core.errors import TraceFormatError
from latency.models import DELAY_DECIMALS, DelaySample, LatencyModel, LatencySampler

logger = logging.getLogger(__name__)

TRACE_HEADER = ["preprocess_ms", "inference_ms"]


@dataclass(frozen=True)
class DelayStats:
    """Mean/std/min/max of total per-job delay in ms (population std)."""

    count: int = 0
    mean_ms: float = 0.0
    std_ms: float = 0.0
    min_ms: float = 0.0
    max_ms: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "count": self.count,
            "mean_ms": self.mean_ms,
            "std_ms": self.std_ms,
            "min_ms": self.min_ms,
            "max_ms": self.max_ms,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DelayStats":
        return cls(
            count=int(data["count"]),
            mean_ms=float(data["mean_ms"]),
            std_ms=float(data["std_ms"]),
            min_ms=float(data["min_ms"]),
            max_ms=float(data["max_ms"]),
        )


def summarize_delays(totals: Iterable[float]) -> DelayStats:
    """Summary statistics of a sequence of total delays; zeros when empty."""
    values = np.fromiter(totals, dtype=np.float64)
    if values.size == 0:
        return DelayStats()
    return DelayStats(
        count=int(values.size),
        mean_ms=float(values.mean()),
        std_ms=float(values.std()),
        min_ms=float(values.min()),
        max_ms=float(values.max()),
    )


@dataclass(frozen=True)
class DelayTrace:
    """Per-job delay samples with their summary statistics."""

    samples: tuple[DelaySample, ...] = ()
    stats: DelayStats = field(default_factory=DelayStats)

    @classmethod
    def from_samples(cls, samples: Iterable[DelaySample]) -> "DelayTrace":
        samples = tuple(samples)
        return cls(samples=samples, stats=summarize_delays(s.total_ms for s in samples))

    def totals(self) -> np.ndarray:
        return np.array([s.total_ms for s in self.samples], dtype=np.float64)

    def __len__(self) -> int:
        return len(self.samples)


def sample_trace(model: LatencyModel, count: int) -> DelayTrace:
    """Draw count samples from a fresh sampler of model."""
    sampler = LatencySampler(model)
    return DelayTrace.from_samples(sampler.sample() for _ in range(count))


# ============== CSV Persistence ==============


def _parse_delay(raw: str, column: str, line_number: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise TraceFormatError(line_number, f"{column} is not a number: {raw!r}") from None
    if not math.isfinite(value):
        raise TraceFormatError(line_number, f"{column} is not finite: {raw!r}")
    if value < 0:
        raise TraceFormatError(line_number, f"{column} is negative: {raw!r}")
    return value


def load_trace(path: Path) -> DelayTrace:
    """Read a `preprocess_ms,inference_ms` CSV trace."""
    samples: list[DelaySample] = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header: Optional[list[str]] = next(reader, None)
        if header is None or [h.strip() for h in header] != TRACE_HEADER:
            raise TraceFormatError(1, f"expected header {','.join(TRACE_HEADER)!r}, got {header!r}")
        for row in reader:
            line_number = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise TraceFormatError(line_number, f"expected 2 columns, got {len(row)}")
            samples.append(DelaySample(
                preprocess_ms=_parse_delay(row[0].strip(), "preprocess_ms", line_number),
                inference_ms=_parse_delay(row[1].strip(), "inference_ms", line_number),
            ))

    logger.debug("Loaded %d delay samples from %s", len(samples), path)
    return DelayTrace.from_samples(samples)


def save_trace(trace: DelayTrace, path: Path) -> None:
    """Write a trace with a fixed number of fractional digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for s in trace.samples:
            writer.writerow([f"{s.preprocess_ms:.{DELAY_DECIMALS}f}", f"{s.inference_ms:.{DELAY_DECIMALS}f}"])
    logger.debug("Saved %d delay samples to %s", len(trace), path)
