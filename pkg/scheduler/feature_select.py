"""Delay-trend estimation and feature selection.

Functions:
- estimate_delay_trend(current_preprocess_ms, last_inference_ms) -> DelayTrend
- target_step(trend, clock) -> int
- select_features(queue, trend, clock) -> FeatureSelection
"""

import logging
import math
from dataclasses import dataclass
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        def __str__(self) -> str:
            return str(self.value)

        def __format__(self, format_spec: str) -> str:
            return str.__format__(str(self.value), format_spec)

from typing import Optional

from core.frames import TIME_EPSILON_MS, FeatureSnapshot, FrameClock
from scheduler.feature_queue import FeatureQueue

logger = logging.getLogger(__name__)


class PolicyKind(StrEnum):
    """Forecasting policies under comparison."""

    NO_FORECAST = "no_forecast"  # plain real-time detector
    FIXED_NEXT_STEP = "fixed_next_step"  # next-frame forecaster
    DELAY_ADAPTIVE = "delay_adaptive"  # feature queue + feature select


@dataclass(frozen=True)
class DelayTrend:
    """Estimated delay of the in-flight job: D_t = P_t + I_(t-1)."""

    current_preprocess_ms: float
    last_inference_ms: Optional[float]
    trend_ms: Optional[float]

    @property
    def is_absent(self) -> bool:
        """True before the first inference has completed."""
        return self.trend_ms is None


@dataclass(frozen=True)
class FeatureSelection:
    """Feature pair chosen for forecasting."""

    current: FeatureSnapshot
    past: FeatureSnapshot
    target_n: int
    effective_n: int
    degenerate: bool = False  # no usable past snapshot, zero-motion fallback

    @property
    def clamped(self) -> bool:
        return not self.degenerate and self.effective_n != self.target_n


def estimate_delay_trend(
    current_preprocess_ms: float,
    last_inference_ms: Optional[float] = None
) -> DelayTrend:
    """Add the current preprocessing delay to the most recent inference delay."""
    if not current_preprocess_ms >= 0:
        raise ValueError(f"current_preprocess_ms must be >= 0, got {current_preprocess_ms}")
    if last_inference_ms is None:
        return DelayTrend(current_preprocess_ms, None, None)
    if not last_inference_ms >= 0:
        raise ValueError(f"last_inference_ms must be >= 0, got {last_inference_ms}")
    return DelayTrend(current_preprocess_ms, last_inference_ms, current_preprocess_ms + last_inference_ms)


def target_step(trend: DelayTrend, clock: FrameClock) -> int:
    """Frames ahead the output should describe: floor(D_t / T_t) + 1, or 1 without a trend."""
    if trend.trend_ms is None:
        return 1
    quotient = trend.trend_ms * clock.fps / 1000.0
    return math.floor(quotient + TIME_EPSILON_MS) + 1


def select_features(queue: FeatureQueue, trend: DelayTrend, clock: FrameClock) -> FeatureSelection:
    """Pick (F_t, F_(t-n)) from the queue for the current delay trend.

    F_(t-n) is the stored snapshot whose frame index is nearest to t - n, limited to the
    last capacity - 1 frames; effective_n is the actual frame gap of the chosen pair.
    """
    current = queue.current
    n = target_step(trend, clock)
    max_gap = queue.capacity - 1
    past = queue.nearest(current.frame_index - n, oldest_allowed=current.frame_index - max_gap)

    if past is None:
        logger.debug("Degenerate feature selection at frame %d (n=%d)", current.frame_index, n)
        return FeatureSelection(current=current, past=current, target_n=n, effective_n=0, degenerate=True)

    selection = FeatureSelection(
        current=current, past=past, target_n=n, effective_n=current.frame_index - past.frame_index
    )
    if selection.clamped:
        logger.debug(
            "Frame %d: target step %d served by stored frame %d (gap %d)",
            current.frame_index, n, past.frame_index, selection.effective_n,
        )
    return selection
