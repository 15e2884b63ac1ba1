"""Ground truth and detector observations of a synthetic world.

Functions:
- ground_truth_at(world, frame_index) -> GroundTruthFrame
- ground_truth_frames(world) -> list[GroundTruthFrame]
- observe(world, frame_index, observer) -> FeatureSnapshot
- random_world(...) -> WorldSpec
"""

import logging
import math
from typing import Optional

import numpy as np

from core.frames import FeatureSnapshot, FrameClock, GroundTruthFrame
from core.geometry import BBox, clamp_box
from worldsim.models import (
    DEFAULT_FPS,
    DEFAULT_IMAGE_HEIGHT,
    DEFAULT_IMAGE_WIDTH,
    ObjectTrack,
    ObserverKind,
    ObserverSpec,
    WorldSpec,
)

logger = logging.getLogger(__name__)

# False positives get ids -(frame_index * stride + i + 1), unique across a run
FALSE_POSITIVE_ID_STRIDE = 1_000_000

FALSE_POSITIVE_SIDE_RANGE = (16.0, 200.0)
FALSE_POSITIVE_SCORE_RANGE = (0.05, 0.5)


def ground_truth_at(world: WorldSpec, frame_index: int) -> GroundTruthFrame:
    """Clamped boxes of every live object in one frame."""
    if not 0 <= frame_index < world.duration_frames:
        raise ValueError(f"frame {frame_index} outside world of {world.duration_frames} frames")

    boxes = []
    for obj in world.objects:
        if not obj.is_alive(frame_index):
            continue
        clamped = clamp_box(obj.box_at(frame_index), world.image_width, world.image_height)
        if clamped is not None:
            boxes.append(clamped)

    return GroundTruthFrame(
        frame_index=frame_index,
        boxes=tuple(boxes),
        image_width=world.image_width,
        image_height=world.image_height,
    )


def ground_truth_frames(world: WorldSpec) -> list[GroundTruthFrame]:
    """Ground truth of every frame in order."""
    return [ground_truth_at(world, k) for k in range(world.duration_frames)]


# ============== Observers ==============


def _localization_score(noise: np.ndarray, noise_std: float) -> float:
    """Confidence that decays with the size of the localization error; 1.0 without noise."""
    if noise_std == 0.0:
        return 1.0
    return float(math.exp(-float(np.mean(noise**2)) / (8.0 * noise_std**2)))


def observe(world: WorldSpec, frame_index: int, observer: ObserverSpec) -> FeatureSnapshot:
    """Detector output for one frame, deterministic per (observer seed, frame index)."""
    truth = ground_truth_at(world, frame_index)
    clock = FrameClock(world.fps)

    if observer.kind == ObserverKind.ORACLE:
        return FeatureSnapshot.at(frame_index, clock, truth.boxes)

    rng = np.random.default_rng([observer.seed, frame_index])
    boxes: list[BBox] = []

    for box in truth.boxes:
        # Draw everything for every box so the stream stays aligned across settings
        missed = rng.random() < observer.miss_prob
        noise = rng.normal(0.0, 1.0, size=4) * observer.position_noise_std
        if missed:
            continue
        x1, y1, x2, y2 = (c + float(n) for c, n in zip(box.coords, noise))
        if x2 <= x1 or y2 <= y1:
            continue
        noisy = clamp_box(
            BBox(x1, y1, x2, y2, class_id=box.class_id, track_id=box.track_id,
                 score=_localization_score(noise, observer.position_noise_std)),
            world.image_width,
            world.image_height,
        )
        if noisy is not None:
            boxes.append(noisy)

    false_positives = int(rng.poisson(observer.false_positive_rate))
    for i in range(min(false_positives, FALSE_POSITIVE_ID_STRIDE - 1)):
        w, h = rng.uniform(*FALSE_POSITIVE_SIDE_RANGE, size=2)
        x1 = float(rng.uniform(0.0, max(world.image_width - w, 0.0)))
        y1 = float(rng.uniform(0.0, max(world.image_height - h, 0.0)))
        class_id = int(rng.integers(0, world.class_count))
        score = float(rng.uniform(*FALSE_POSITIVE_SCORE_RANGE))
        fake = clamp_box(
            BBox(x1, y1, x1 + float(w), y1 + float(h), class_id=class_id, score=score,
                 track_id=-(frame_index * FALSE_POSITIVE_ID_STRIDE + i + 1)),
            world.image_width,
            world.image_height,
        )
        if fake is not None:
            boxes.append(fake)

    return FeatureSnapshot.at(frame_index, clock, boxes)


# ============== World Generation ==============


def _start_interval(extent: float, size: float, travel: float, margin: float) -> tuple[float, float]:
    """Start positions keeping [start, start + size] inside the image over the whole travel."""
    low = margin - min(travel, 0.0)
    high = extent - size - margin - max(travel, 0.0)
    if low > high:
        # Too fast to stay inside; the object will leave the image
        return margin, max(extent - size - margin, margin)
    return low, high


def random_world(
    seed: int,
    duration_frames: int = 300,
    object_count: int = 12,
    min_speed: float = 1.0,
    max_speed: float = 8.0,
    max_acceleration: float = 0.0,
    class_count: int = 3,
    image_width: float = DEFAULT_IMAGE_WIDTH,
    image_height: float = DEFAULT_IMAGE_HEIGHT,
    fps: float = DEFAULT_FPS,
    side_range: tuple[float, float] = (16.0, 240.0),
    margin: float = 4.0,
    velocities: Optional[list[tuple[float, float]]] = None
) -> WorldSpec:
    """Generate a world of moving boxes that stay inside the image when possible.

    Box sides are log-uniform over side_range so all three COCO size classes occur.
    Passing velocities fixes each object's velocity instead of drawing it.
    """
    if object_count < 1:
        raise ValueError("object_count must be >= 1")
    if not 0 <= min_speed <= max_speed:
        raise ValueError("need 0 <= min_speed <= max_speed")
    if velocities is not None and len(velocities) != object_count:
        raise ValueError("velocities must have one entry per object")

    rng = np.random.default_rng(seed)
    objects = []
    for track_id in range(object_count):
        log_low, log_high = math.log(side_range[0]), math.log(side_range[1])
        w = math.exp(rng.uniform(log_low, log_high))
        h = min(max(w * rng.uniform(0.5, 2.0), side_range[0]), side_range[1])

        if velocities is None:
            speed = rng.uniform(min_speed, max_speed)
            angle = rng.uniform(0.0, 2.0 * math.pi)
            velocity = (speed * math.cos(angle), speed * math.sin(angle))
        else:
            velocity = velocities[track_id]
        accel = tuple(float(a) for a in rng.uniform(-max_acceleration, max_acceleration, size=2))

        steps = duration_frames - 1
        travel_x = velocity[0] * steps + 0.5 * accel[0] * steps**2
        travel_y = velocity[1] * steps + 0.5 * accel[1] * steps**2
        x_low, x_high = _start_interval(image_width, w, travel_x, margin)
        y_low, y_high = _start_interval(image_height, h, travel_y, margin)
        x1 = rng.uniform(x_low, x_high)
        y1 = rng.uniform(y_low, y_high)

        objects.append(ObjectTrack(
            track_id=track_id,
            class_id=int(rng.integers(0, class_count)),
            box=(float(x1), float(y1), float(x1 + w), float(y1 + h)),
            velocity=(float(velocity[0]), float(velocity[1])),
            acceleration=accel,
        ))

    logger.debug("Generated world with %d objects over %d frames (seed=%d)", object_count, duration_frames, seed)
    return WorldSpec(
        duration_frames=duration_frames,
        objects=tuple(objects),
        image_width=image_width,
        image_height=image_height,
        fps=fps,
        seed=seed,
    )
