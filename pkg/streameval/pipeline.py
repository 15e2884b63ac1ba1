"""Discrete-event simulation of a single perception pipeline.

Whenever the pipeline becomes free it takes the newest captured frame it has not processed
yet, or idles until the next capture. Each job draws a (P_t, I_t) delay; after the
preprocess phase the policy decides which boxes to emit, and the output lands in the
buffer at completion time.
"""

import logging
from dataclasses import dataclass
from typing import Optional

from core.frames import FrameClock
from core.geometry import BBox
from latency.models import DelaySample, LatencySampler
from scheduler.feature_queue import DEFAULT_QUEUE_CAPACITY, FeatureQueue
from scheduler.feature_select import PolicyKind, estimate_delay_trend, select_features
from streameval.stream_log import PipelineJob, StreamLog
from utils.digest import digest
from worldsim.models import ObserverSpec, WorldSpec
from worldsim.motion import extrapolate
from worldsim.world import observe

logger = logging.getLogger(__name__)


def world_digest(world: WorldSpec) -> str:
    """Content digest tying a stream log to the world it was simulated against."""
    return digest(world.to_dict())


@dataclass(frozen=True)
class _Decision:
    boxes: list[BBox]
    target_n: int
    effective_gap: int
    degenerate: bool = False
    clamped: bool = False
    trend_ms: Optional[float] = None


def _decide(
    policy: PolicyKind,
    queue: FeatureQueue,
    delay: DelaySample,
    last_inference_ms: Optional[float],
    clock: FrameClock
) -> _Decision:
    """Boxes to emit for the current job under the given policy."""
    current = queue.current

    if policy == PolicyKind.NO_FORECAST:
        return _Decision(list(current.boxes), 0, 0)

    if policy == PolicyKind.FIXED_NEXT_STEP:
        past = queue.previous()
        if past is None:
            return _Decision(list(current.boxes), 1, 0, degenerate=True)
        return _Decision(extrapolate(current, past, 1), 1, current.frame_index - past.frame_index)

    trend = estimate_delay_trend(delay.preprocess_ms, last_inference_ms)
    selection = select_features(queue, trend, clock)
    return _Decision(
        boxes=extrapolate(selection.current, selection.past, selection.target_n),
        target_n=selection.target_n,
        effective_gap=selection.effective_n,
        degenerate=selection.degenerate,
        clamped=selection.clamped,
        trend_ms=trend.trend_ms,
    )


def simulate(
    world: WorldSpec,
    observer: ObserverSpec,
    latency: LatencySampler,
    policy: PolicyKind,
    clock: FrameClock,
    queue_capacity: int = DEFAULT_QUEUE_CAPACITY,
    config_digest: str = "",
    sequence: int = 0
) -> StreamLog:
    """Run one policy over the whole world and log every completed job.

    Raises TraceExhaustedError if a replayed latency trace runs out.
    """
    if abs(world.fps - clock.fps) > 1e-9:
        raise ValueError(f"world fps {world.fps} differs from clock fps {clock.fps}")

    queue = FeatureQueue(queue_capacity)
    jobs: list[PipelineJob] = []
    now_ms = 0.0
    last_frame = -1
    last_inference_ms: Optional[float] = None
    clamped_count = 0

    while True:
        frame = min(clock.frame_at(now_ms), world.duration_frames - 1)
        if frame <= last_frame:
            frame = last_frame + 1
            if frame >= world.duration_frames:
                break
            # Idle until the next capture
            now_ms = clock.capture_time(frame)

        delay = latency.sample()
        snapshot = observe(world, frame, observer)
        # frame_at() rounds within tolerance, never start before the capture instant
        now_ms = max(now_ms, snapshot.capture_time)
        queue.push(snapshot)
        decision = _decide(policy, queue, delay, last_inference_ms, clock)
        clamped_count += decision.clamped

        job = PipelineJob(
            job_index=len(jobs),
            input_frame_index=frame,
            capture_ms=snapshot.capture_time,
            start_ms=now_ms,
            preprocess_ms=delay.preprocess_ms,
            inference_ms=delay.inference_ms,
            completion_ms=now_ms + delay.preprocess_ms + delay.inference_ms,
            boxes=tuple(decision.boxes),
            target_n=decision.target_n,
            effective_gap=decision.effective_gap,
            degenerate=decision.degenerate,
            trend_ms=decision.trend_ms,
        )
        jobs.append(job)
        logger.debug(
            "job %d: frame %d start %.3f done %.3f n=%d gap=%d",
            job.job_index, frame, job.start_ms, job.completion_ms, job.target_n, job.effective_gap,
        )

        last_frame = frame
        last_inference_ms = delay.inference_ms
        now_ms = job.completion_ms

    degenerate_count = sum(1 for job in jobs if job.degenerate)
    logger.info("Simulated %s: %d jobs over %d frames", policy.value, len(jobs), world.duration_frames)
    if degenerate_count or clamped_count:
        logger.warning(
            "%s: %d degenerate and %d clamped feature selections",
            policy.value, degenerate_count, clamped_count,
        )
    return StreamLog.build(
        policy=policy,
        fps=clock.fps,
        jobs=jobs,
        config_digest=config_digest,
        world_digest=world_digest(world),
        sequence=sequence,
    )
