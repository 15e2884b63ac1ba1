import math

import numpy as np
import pytest

from core.errors import InvalidBoxError
from core.frames import FeatureSnapshot, FrameClock, GroundTruthFrame
from core.geometry import BBox, SizeClass, box_area_class, clamp_box, iou, iou_matrix


class TestBBox:
    def test_rejects_degenerate_and_non_finite(self):
        with pytest.raises(InvalidBoxError):
            BBox(10, 10, 10, 20)
        with pytest.raises(InvalidBoxError):
            BBox(10, 10, 5, 20)
        with pytest.raises(InvalidBoxError):
            BBox(0, 0, math.inf, 1)
        with pytest.raises(InvalidBoxError):
            BBox(0, 0, 1, 1, score=1.5)

    def test_invalid_box_is_a_value_error(self):
        with pytest.raises(ValueError):
            BBox(0, 0, 0, 0)

    def test_with_coords_keeps_identity(self):
        box = BBox(0, 0, 10, 20, class_id=2, score=0.7, track_id=5)
        moved = box.with_coords(3, -1, 13, 19)
        assert moved.coords == (3, -1, 13, 19)
        assert (moved.class_id, moved.score, moved.track_id) == (2, 0.7, 5)

    def test_dict_form(self):
        box = BBox(1.5, 2.0, 3.0, 4.5, class_id=1, score=0.25, track_id=None)
        assert BBox.from_dict(box.to_dict()) == box


class TestIoU:
    def test_identical_and_disjoint(self):
        a = BBox(0, 0, 10, 10)
        assert iou(a, a) == 1.0
        assert iou(a, BBox(20, 20, 30, 30)) == 0.0

    def test_touching_edges_do_not_overlap(self):
        assert iou(BBox(0, 0, 10, 10), BBox(10, 0, 20, 10)) == 0.0

    def test_half_overlap(self):
        # 50 / (100 + 100 - 50)
        assert iou(BBox(0, 0, 10, 10), BBox(5, 0, 15, 10)) == pytest.approx(1.0 / 3.0)

    def test_matrix_agrees_with_scalar(self):
        rng = np.random.default_rng(3)
        boxes = []
        for _ in range(12):
            x, y = rng.uniform(0, 50, size=2)
            w, h = rng.uniform(1, 30, size=2)
            boxes.append(BBox(x, y, x + w, y + h))
        matrix = iou_matrix(boxes[:5], boxes[5:])
        for i, a in enumerate(boxes[:5]):
            for j, b in enumerate(boxes[5:]):
                assert matrix[i, j] == iou(a, b)

    def test_symmetric_and_translation_invariant(self):
        rng = np.random.default_rng(12345)
        for _ in range(500):
            x1, y1, x2, y2 = rng.uniform(0, 100, size=4)
            w1, h1, w2, h2 = rng.uniform(1, 60, size=4)
            a, b = BBox(x1, y1, x1 + w1, y1 + h1), BBox(x2, y2, x2 + w2, y2 + h2)
            assert iou(a, b) == iou(b, a)

            dx, dy = rng.uniform(-500, 500, size=2)
            moved_a = a.with_coords(a.x1 + dx, a.y1 + dy, a.x2 + dx, a.y2 + dy)
            moved_b = b.with_coords(b.x1 + dx, b.y1 + dy, b.x2 + dx, b.y2 + dy)
            assert iou(moved_a, moved_b) == pytest.approx(iou(a, b), abs=1e-9)

    def test_matrix_empty_shapes(self):
        assert iou_matrix([], [BBox(0, 0, 1, 1)]).shape == (0, 1)


class TestSizeClass:
    @pytest.mark.parametrize(
        "side, expected",
        [(31.0, SizeClass.SMALL), (32.0, SizeClass.MEDIUM), (96.0, SizeClass.MEDIUM), (97.0, SizeClass.LARGE)],
    )
    def test_coco_thresholds(self, side, expected):
        assert box_area_class(BBox(0, 0, side, side)) == expected


class TestClampBox:
    def test_clips_to_image(self):
        clamped = clamp_box(BBox(-5, -5, 50, 50, track_id=1), 40, 30)
        assert clamped.coords == (0, 0, 40, 30)
        assert clamped.track_id == 1

    def test_drops_sliver(self):
        assert clamp_box(BBox(39.5, 0, 60, 10), 40, 30) is None


class TestFrameClock:
    def test_capture_times(self):
        clock = FrameClock(30)
        assert clock.capture_time(3) == 100.0
        assert clock.frame_interval == pytest.approx(33.333333333)

    def test_frame_at_is_exact_on_capture_instants(self):
        clock = FrameClock(30)
        for k in range(1000):
            assert clock.frame_at(clock.capture_time(k)) == k

    def test_frame_at_before_start(self):
        assert FrameClock(30).frame_at(-1.0) == -1

    @pytest.mark.parametrize("fps", [0.0, -30.0, math.nan])
    def test_rejects_bad_fps(self, fps):
        with pytest.raises(ValueError):
            FrameClock(fps)


class TestFrames:
    def test_snapshot_rejects_duplicate_track_ids(self):
        boxes = [BBox(0, 0, 5, 5, track_id=1), BBox(10, 10, 15, 15, track_id=1)]
        with pytest.raises(ValueError):
            FeatureSnapshot.at(0, FrameClock(30), boxes)

    def test_ground_truth_must_be_inside_image(self):
        with pytest.raises(ValueError):
            GroundTruthFrame(0, (BBox(0, 0, 50, 50),), image_width=40, image_height=40)
