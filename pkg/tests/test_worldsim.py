import json
from pathlib import Path

import numpy as np
import pytest

from conftest import make_world
from core.errors import SchemaVersionError
from core.frames import FeatureSnapshot, FrameClock
from core.geometry import BBox, iou
from worldsim.models import ObjectTrack, ObserverKind, ObserverSpec, WorldSpec, load_world, save_world
from worldsim.motion import associate_by_iou, extrapolate
from worldsim.world import ground_truth_at, ground_truth_frames, observe, random_world

CLOCK = FrameClock(30.0)


class TestWorldSpec:
    def test_box_follows_velocity(self):
        world = make_world()
        frame = ground_truth_at(world, 10)
        assert frame.boxes[0].coords == (120.0, 100.0, 240.0, 220.0)
        assert frame.boxes[0].track_id == 0

    def test_acceleration(self):
        track = ObjectTrack(track_id=0, class_id=0, box=(0, 0, 10, 10), velocity=(1, 0), acceleration=(2, 0))
        assert track.box_at(3).x1 == pytest.approx(3 + 9)

    def test_spawn_and_despawn(self):
        track = ObjectTrack(track_id=0, class_id=0, box=(0, 0, 10, 10), spawn_frame=5, despawn_frame=8)
        world = WorldSpec(duration_frames=10, objects=(track,))
        assert [bool(ground_truth_at(world, k).boxes) for k in (4, 5, 7, 8)] == [False, True, True, False]

    def test_leaving_objects_are_clamped_then_dropped(self):
        track = ObjectTrack(track_id=0, class_id=0, box=(80, 0, 95, 10), velocity=(5, 0))
        world = WorldSpec(duration_frames=5, objects=(track,), image_width=100, image_height=100)
        assert ground_truth_at(world, 2).boxes[0].coords == (90, 0, 100, 10)
        assert ground_truth_at(world, 4).boxes == ()

    def test_frame_out_of_range(self):
        with pytest.raises(ValueError):
            ground_truth_at(make_world(10), 10)

    def test_duplicate_track_ids(self):
        track = ObjectTrack(track_id=1, class_id=0, box=(0, 0, 10, 10))
        with pytest.raises(ValueError):
            WorldSpec(duration_frames=10, objects=(track, track))

    def test_json_round_trip(self, tmp_path: Path):
        world = random_world(seed=4, duration_frames=20, object_count=5, max_acceleration=0.1)
        path = tmp_path / "world.json"
        save_world(world, path)
        assert load_world(path) == world

    def test_schema_version_checked(self, tmp_path: Path):
        data = make_world(10).to_dict()
        data["schema_version"] = 99
        path = tmp_path / "world.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        with pytest.raises(SchemaVersionError):
            load_world(path)


class TestObserver:
    def test_oracle_reproduces_ground_truth(self):
        world = make_world(20)
        for k in range(20):
            assert observe(world, k, ObserverSpec()).boxes == ground_truth_at(world, k).boxes

    def test_noisy_is_deterministic_per_frame(self):
        world = make_world(20)
        observer = ObserverSpec(ObserverKind.NOISY, position_noise_std=2.0, miss_prob=0.1,
                                false_positive_rate=1.0, seed=3)
        assert observe(world, 7, observer) == observe(world, 7, observer)
        other = ObserverSpec(ObserverKind.NOISY, position_noise_std=2.0, miss_prob=0.1,
                             false_positive_rate=1.0, seed=4)
        assert observe(world, 7, observer) != observe(world, 7, other)

    def test_noise_free_noisy_observer_is_exact(self):
        world = make_world(5)
        observer = ObserverSpec(ObserverKind.NOISY, seed=1)
        assert observe(world, 3, observer).boxes == ground_truth_at(world, 3).boxes

    def test_miss_everything(self):
        world = make_world(5)
        observer = ObserverSpec(ObserverKind.NOISY, miss_prob=1.0, seed=1)
        assert observe(world, 2, observer).boxes == ()

    def test_noisy_boxes_stay_close(self):
        world = make_world(50)
        observer = ObserverSpec(ObserverKind.NOISY, position_noise_std=1.0, seed=8)
        for k in range(50):
            truth = {box.track_id: box for box in ground_truth_at(world, k).boxes}
            for box in observe(world, k, observer).boxes:
                assert iou(box, truth[box.track_id]) > 0.8
                assert 0.0 < box.score <= 1.0

    def test_false_positives_have_negative_unique_ids(self):
        world = make_world(30)
        observer = ObserverSpec(ObserverKind.NOISY, false_positive_rate=3.0, seed=2)
        ids = [
            box.track_id
            for k in range(30)
            for box in observe(world, k, observer).boxes
            if box.track_id < 0
        ]
        assert ids
        assert len(ids) == len(set(ids))

    def test_miss_prob_range(self):
        with pytest.raises(ValueError):
            ObserverSpec(ObserverKind.NOISY, miss_prob=1.5)


class TestRandomWorld:
    def test_deterministic(self):
        assert random_world(seed=5) == random_world(seed=5)
        assert random_world(seed=5) != random_world(seed=6)

    def test_objects_stay_inside(self):
        world = random_world(seed=1, duration_frames=100, object_count=20, max_speed=3.0)
        for frame in ground_truth_frames(world):
            assert len(frame.boxes) == 20

    def test_fixed_velocities(self):
        world = random_world(seed=1, object_count=2, velocities=[(1.0, 0.0), (0.0, -1.0)])
        assert [obj.velocity for obj in world.objects] == [(1.0, 0.0), (0.0, -1.0)]


class TestMotion:
    def test_constant_velocity_is_exact(self):
        world = make_world()
        past = observe(world, 4, ObserverSpec())
        current = observe(world, 6, ObserverSpec())
        forecast = extrapolate(current, past, 3)
        truth = ground_truth_at(world, 9).boxes
        for predicted, expected in zip(forecast, truth):
            np.testing.assert_allclose(predicted.coords, expected.coords)

    @pytest.mark.parametrize("gap", [1, 2, 3, 4])
    def test_forecast_over_the_pair_gap_is_exact(self, gap):
        world = make_world()
        past = observe(world, 10 - gap, ObserverSpec())
        current = observe(world, 10, ObserverSpec())
        forecast = extrapolate(current, past, gap)
        truth = ground_truth_at(world, 10 + gap).boxes
        assert len(forecast) == len(truth)
        for predicted, expected in zip(forecast, truth):
            np.testing.assert_allclose(predicted.coords, expected.coords, rtol=0, atol=1e-9)

    def test_zero_steps_is_identity(self):
        world = make_world()
        past, current = observe(world, 0, ObserverSpec()), observe(world, 1, ObserverSpec())
        assert extrapolate(current, past, 0) == list(current.boxes)

    def test_past_must_be_older(self):
        world = make_world()
        with pytest.raises(ValueError):
            extrapolate(observe(world, 1, ObserverSpec()), observe(world, 2, ObserverSpec()), 1)

    def test_unmatched_boxes_stay_put(self):
        past = FeatureSnapshot.at(0, CLOCK, [BBox(0, 0, 10, 10, track_id=1)])
        current = FeatureSnapshot.at(1, CLOCK, [BBox(50, 50, 60, 60, track_id=2)])
        assert extrapolate(current, past, 2) == list(current.boxes)

    def test_association_without_ids(self):
        past = FeatureSnapshot.at(0, CLOCK, [BBox(0, 0, 10, 10), BBox(100, 0, 110, 10)])
        current = FeatureSnapshot.at(1, CLOCK, [BBox(102, 0, 112, 10), BBox(2, 0, 12, 10)])
        assert sorted(associate_by_iou(current, past)) == [(0, 1), (1, 0)]
        forecast = extrapolate(current, past, 1)
        assert forecast[0].x1 == pytest.approx(104.0)
        assert forecast[1].x1 == pytest.approx(4.0)

    def test_equal_overlaps_pair_lower_indices_first(self):
        past = FeatureSnapshot.at(0, CLOCK, [BBox(0, 0, 10, 10), BBox(0, 0, 10, 10)])
        current = FeatureSnapshot.at(1, CLOCK, [BBox(0, 0, 10, 10), BBox(0, 0, 10, 10)])
        assert associate_by_iou(current, past) == [(0, 0), (1, 1)]

    def test_association_respects_class(self):
        past = FeatureSnapshot.at(0, CLOCK, [BBox(0, 0, 10, 10, class_id=0)])
        current = FeatureSnapshot.at(1, CLOCK, [BBox(1, 0, 11, 10, class_id=1)])
        assert associate_by_iou(current, past) == []
