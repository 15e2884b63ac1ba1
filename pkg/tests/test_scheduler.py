import numpy as np
import pytest

from core.frames import FeatureSnapshot, FrameClock
from core.geometry import BBox
from scheduler.feature_queue import FeatureQueue
from scheduler.feature_select import (
    DelayTrend,
    estimate_delay_trend,
    select_features,
    target_step,
)
from worldsim.motion import extrapolate

CLOCK = FrameClock(30.0)


def snapshot(frame_index: int, x: float = 0.0) -> FeatureSnapshot:
    return FeatureSnapshot.at(frame_index, CLOCK, [BBox(x, 0.0, x + 50.0, 50.0, track_id=0)])


def filled_queue(frames, capacity: int = 5) -> FeatureQueue:
    queue = FeatureQueue(capacity)
    for k in frames:
        queue.push(snapshot(k, x=10.0 + 2.0 * k))
    return queue


class TestFeatureQueue:
    def test_evicts_oldest(self):
        queue = filled_queue(range(8))
        assert [s.frame_index for s in queue.entries] == [3, 4, 5, 6, 7]
        assert queue.current.frame_index == 7
        assert queue.previous().frame_index == 6

    def test_frames_must_increase(self):
        queue = filled_queue([3])
        with pytest.raises(ValueError):
            queue.push(snapshot(3))

    def test_empty_queue(self):
        queue = FeatureQueue()
        with pytest.raises(IndexError):
            queue.current
        assert queue.previous() is None

    def test_capacity_must_be_positive(self):
        with pytest.raises(ValueError):
            FeatureQueue(0)

    def test_nearest_prefers_older_on_tie(self):
        queue = filled_queue([0, 1, 3, 4, 6, 7])
        # Stored 3, 4, 6 before current 7; 4 and 6 are both one frame from 5
        assert queue.nearest(5, oldest_allowed=3).frame_index == 4

    def test_nearest_never_returns_current(self):
        queue = filled_queue([5])
        assert queue.nearest(5, oldest_allowed=0) is None


class TestDelayTrend:
    def test_sums_preprocess_and_last_inference(self):
        trend = estimate_delay_trend(12.5, 37.5)
        assert trend.trend_ms == 50.0
        assert not trend.is_absent

    def test_absent_before_first_inference(self):
        trend = estimate_delay_trend(12.5, None)
        assert trend.is_absent
        assert target_step(trend, CLOCK) == 1

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            estimate_delay_trend(-1.0, 10.0)


class TestTargetStep:
    def test_examples(self):
        assert target_step(estimate_delay_trend(0.0, 50.0), CLOCK) == 2
        assert target_step(estimate_delay_trend(0.0, 20.0), CLOCK) == 1
        assert target_step(estimate_delay_trend(0.0, 1000.0 / 30.0), CLOCK) == 2

    def test_bands(self):
        """Every delay in [(k-1)T, kT) maps to k."""
        rng = np.random.default_rng(2024)
        frame_interval = CLOCK.frame_interval
        failures = 0
        for k in range(1, 11):
            low, high = (k - 1) * frame_interval, k * frame_interval
            delays = [low, *rng.uniform(low, high, size=100)]
            for delay in delays:
                if target_step(estimate_delay_trend(0.0, float(delay)), CLOCK) != k:
                    failures += 1
        assert failures == 0


class TestSelectFeatures:
    def test_exact_pair(self):
        queue = filled_queue([0, 1, 3, 4, 6])
        selection = select_features(queue, estimate_delay_trend(12.5, 37.5), CLOCK)
        assert (selection.current.frame_index, selection.past.frame_index) == (6, 4)
        assert selection.effective_n == 2
        assert not selection.clamped

    def test_long_delay_is_clamped_to_queue_window(self):
        queue = filled_queue(range(10))
        trend = DelayTrend(0.0, 10 * CLOCK.frame_interval, 10 * CLOCK.frame_interval)
        selection = select_features(queue, trend, CLOCK)
        assert selection.target_n == 11
        assert selection.effective_n == 4
        assert selection.clamped

        boxes = extrapolate(selection.current, selection.past, selection.target_n)
        assert all(np.isfinite(box.coords).all() for box in boxes)
        # 2 px/frame for 11 frames
        assert boxes[0].x1 == pytest.approx(10.0 + 2.0 * 9 + 22.0)

    def test_degenerate_without_history(self):
        queue = filled_queue([0])
        selection = select_features(queue, estimate_delay_trend(10.0, None), CLOCK)
        assert selection.degenerate
        assert selection.past is selection.current
        assert selection.effective_n == 0
        assert extrapolate(selection.current, selection.past, selection.target_n) == list(queue.current.boxes)

    def test_degenerate_when_history_is_too_old(self):
        queue = filled_queue([0, 10])
        selection = select_features(queue, estimate_delay_trend(10.0, 20.0), CLOCK)
        assert selection.degenerate
