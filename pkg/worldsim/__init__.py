"""Synthetic world, observers and box extrapolation."""

from worldsim.models import (
    WORLD_SCHEMA_VERSION,
    ObjectTrack,
    ObserverKind,
    ObserverSpec,
    WorldSpec,
    load_world,
    save_world,
)
from worldsim.motion import (
    ASSOCIATION_IOU_THRESHOLD,
    associate_by_iou,
    extrapolate,
)
from worldsim.world import (
    ground_truth_at,
    ground_truth_frames,
    observe,
    random_world,
)

__all__ = [
    # Specs
    "WORLD_SCHEMA_VERSION",
    "ObjectTrack",
    "ObserverKind",
    "ObserverSpec",
    "WorldSpec",
    "load_world",
    "save_world",
    # Motion
    "ASSOCIATION_IOU_THRESHOLD",
    "associate_by_iou",
    "extrapolate",
    # World
    "ground_truth_at",
    "ground_truth_frames",
    "observe",
    "random_world",
]
