"""Scheduler module: feature queue and delay-adaptive feature selection.

Exports:
- FeatureQueue: fixed-capacity snapshot history (feature_queue.py)
- estimate_delay_trend / target_step / select_features: delay trend, target step, pair choice (feature_select.py)
"""

from scheduler.feature_queue import DEFAULT_QUEUE_CAPACITY, FeatureQueue
from scheduler.feature_select import (
    DelayTrend,
    FeatureSelection,
    PolicyKind,
    estimate_delay_trend,
    select_features,
    target_step,
)

__all__ = [
    # Queue
    "DEFAULT_QUEUE_CAPACITY",
    "FeatureQueue",
    # Selection
    "DelayTrend",
    "FeatureSelection",
    "PolicyKind",
    "estimate_delay_trend",
    "select_features",
    "target_step",
]
