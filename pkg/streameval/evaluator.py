"""Streaming AP: score the output buffer against the ground truth current at each query.

For every frame k the buffer is queried at its capture instant k * T and whatever it holds
is matched against frame k's ground truth. Latency therefore shows up as localization
error: a stale or badly forecast box no longer overlaps the moving object.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence, Union

import numpy as np

from core.errors import DigestMismatchError
from core.frames import FrameClock, GroundTruthFrame
from core.geometry import BBox, SizeClass
from latency.traces import DelayStats, summarize_delays
from streameval.metrics import IOU_THRESHOLDS, average_precision, count_matches
from streameval.pipeline import world_digest
from streameval.stream_log import StreamLog, query_buffer
from worldsim.models import WorldSpec
from worldsim.world import ground_truth_frames

logger = logging.getLogger(__name__)

GroundTruthSource = Union[WorldSpec, Sequence[GroundTruthFrame]]

MATCH_COUNT_IOU = 0.5


@dataclass(frozen=True)
class FrameMatch:
    """Per-query bookkeeping."""

    sequence: int
    frame_index: int
    predictions: int
    truths: int
    matched: int  # at IoU 0.5

    def to_dict(self) -> dict[str, Any]:
        return {
            "sequence": self.sequence,
            "frame_index": self.frame_index,
            "predictions": self.predictions,
            "truths": self.truths,
            "matched": self.matched,
        }


@dataclass(frozen=True)
class EvalReport:
    """Streaming AP with its breakdowns and the delay profile of the run."""

    policy: str
    sap: Optional[float]
    sap50: Optional[float]
    sap75: Optional[float]
    sap_50_75: Optional[float]
    sap_small: Optional[float]
    sap_medium: Optional[float]
    sap_large: Optional[float]
    delay_stats: DelayStats
    job_count: int
    dropped_frames: int
    realtime_violation_rate: float
    target_steps: dict[int, int] = field(default_factory=dict)
    frame_matches: tuple[FrameMatch, ...] = ()

    def ap_fields(self) -> dict[str, Optional[float]]:
        return {
            "sap": self.sap,
            "sap50": self.sap50,
            "sap75": self.sap75,
            "sap_small": self.sap_small,
            "sap_medium": self.sap_medium,
            "sap_large": self.sap_large,
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "policy": self.policy,
            **self.ap_fields(),
            "sap_50_75": self.sap_50_75,
            "delay_stats": self.delay_stats.to_dict(),
            "job_count": self.job_count,
            "dropped_frames": self.dropped_frames,
            "realtime_violation_rate": self.realtime_violation_rate,
            "target_steps": {str(n): count for n, count in sorted(self.target_steps.items())},
            "frame_matches": [match.to_dict() for match in self.frame_matches],
        }


def _mean_or_none(values: list[Optional[float]]) -> Optional[float]:
    if any(v is None for v in values):
        return None
    return float(np.mean(values))


def _frames_for(source: GroundTruthSource, log: StreamLog) -> list[GroundTruthFrame]:
    if isinstance(source, WorldSpec):
        if log.world_digest and log.world_digest != world_digest(source):
            raise DigestMismatchError(
                f"stream log of sequence {log.sequence} was simulated against a different world"
            )
        return ground_truth_frames(source)
    return list(source)


def evaluate_sequences(
    runs: Sequence[tuple[GroundTruthSource, StreamLog]],
    clock: FrameClock,
    warmup_frames: int = 0
) -> EvalReport:
    """Pool the query instants of several sequences into one streaming AP.

    Each sequence has its own output buffer (its own log). Query instants of frames below
    warmup_frames are skipped in every sequence.
    """
    if not runs:
        raise ValueError("nothing to evaluate")
    if warmup_frames < 0:
        raise ValueError(f"warmup_frames must be >= 0, got {warmup_frames}")
    policies = {log.policy for _, log in runs}
    if len(policies) != 1:
        raise ValueError(f"cannot pool runs of different policies: {sorted(policies)}")

    predictions: list[tuple[BBox, ...]] = []
    truths: list[tuple[BBox, ...]] = []
    matches: list[FrameMatch] = []
    dropped = 0

    for source, log in runs:
        if abs(log.fps - clock.fps) > 1e-9:
            raise ValueError(f"log fps {log.fps} differs from clock fps {clock.fps}")
        frames = _frames_for(source, log)
        dropped += len(frames) - len(log.jobs)
        for frame in frames[warmup_frames:]:
            emitted = query_buffer(log, clock.capture_time(frame.frame_index))
            predictions.append(emitted)
            truths.append(frame.boxes)
            matches.append(FrameMatch(
                sequence=log.sequence,
                frame_index=frame.frame_index,
                predictions=len(emitted),
                truths=len(frame.boxes),
                matched=count_matches(emitted, frame.boxes, MATCH_COUNT_IOU),
            ))

    per_threshold = [average_precision(predictions, truths, thr) for thr in IOU_THRESHOLDS]
    by_size = {
        size: _mean_or_none([average_precision(predictions, truths, thr, size) for thr in IOU_THRESHOLDS])
        for size in SizeClass
    }
    sap50 = per_threshold[IOU_THRESHOLDS.index(0.5)]
    sap75 = per_threshold[IOU_THRESHOLDS.index(0.75)]

    jobs = [job for _, log in runs for job in log.jobs]
    violations = sum(1 for job in jobs if job.total_ms > clock.frame_interval)

    report = EvalReport(
        policy=next(iter(policies)).value,
        sap=_mean_or_none(per_threshold),
        sap50=sap50,
        sap75=sap75,
        sap_50_75=_mean_or_none([sap50, sap75]),
        sap_small=by_size[SizeClass.SMALL],
        sap_medium=by_size[SizeClass.MEDIUM],
        sap_large=by_size[SizeClass.LARGE],
        delay_stats=summarize_delays(job.total_ms for job in jobs),
        job_count=len(jobs),
        dropped_frames=dropped,
        realtime_violation_rate=violations / len(jobs) if jobs else 0.0,
        target_steps=dict(sorted(Counter(job.target_n for job in jobs).items())),
        frame_matches=tuple(matches),
    )
    logger.info(
        "Evaluated %s over %d query instants: sAP=%s",
        report.policy, len(predictions), "n/a" if report.sap is None else f"{report.sap:.4f}",
    )
    return report


def streaming_ap(
    world: GroundTruthSource,
    log: StreamLog,
    clock: FrameClock,
    warmup_frames: int = 0
) -> EvalReport:
    """Streaming AP of one run against its world (or ingested ground-truth frames)."""
    return evaluate_sequences([(world, log)], clock, warmup_frames=warmup_frames)
