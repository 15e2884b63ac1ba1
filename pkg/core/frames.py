"""Frame timing and per-frame box collections."""

import math
from dataclasses import dataclass
from typing import Any, Sequence

from core.geometry import BBox

# Tolerance for comparing instants built from k * 1000 / fps
TIME_EPSILON_MS = 1e-9


@dataclass(frozen=True)
class FrameClock:
    """Sensor frame timing; frame k is captured at k * frame_interval ms."""

    fps: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.fps) and self.fps > 0):
            raise ValueError(f"fps must be positive and finite, got {self.fps}")

    @property
    def frame_interval(self) -> float:
        """Inter-frame time in milliseconds."""
        return 1000.0 / self.fps

    def capture_time(self, frame_index: int) -> float:
        return frame_index * 1000.0 / self.fps

    def frame_at(self, time_ms: float) -> int:
        """Index of the newest frame captured at or before time_ms (-1 before frame 0)."""
        return math.floor(time_ms * self.fps / 1000.0 + TIME_EPSILON_MS)


@dataclass(frozen=True)
class FeatureSnapshot:
    """Detector observation of one frame, standing in for that frame's feature map."""

    frame_index: int
    capture_time: float
    boxes: tuple[BBox, ...] = ()

    def __post_init__(self) -> None:
        if self.frame_index < 0:
            raise ValueError(f"frame_index must be >= 0, got {self.frame_index}")
        track_ids = [box.track_id for box in self.boxes if box.track_id is not None]
        if len(track_ids) != len(set(track_ids)):
            raise ValueError(f"duplicate track ids in snapshot of frame {self.frame_index}")

    @classmethod
    def at(cls, frame_index: int, clock: FrameClock, boxes: Sequence[BBox]) -> "FeatureSnapshot":
        """Build a snapshot stamped with the frame's capture time."""
        return cls(frame_index=frame_index, capture_time=clock.capture_time(frame_index), boxes=tuple(boxes))


@dataclass(frozen=True)
class GroundTruthFrame:
    """Annotated boxes of one frame; scores are ignored."""

    frame_index: int
    boxes: tuple[BBox, ...]
    image_width: float
    image_height: float

    def __post_init__(self) -> None:
        for box in self.boxes:
            if box.x1 < 0 or box.y1 < 0 or box.x2 > self.image_width or box.y2 > self.image_height:
                raise ValueError(f"ground-truth box {box.coords} outside image in frame {self.frame_index}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "frame_index": self.frame_index,
            "image_width": self.image_width,
            "image_height": self.image_height,
            "boxes": [box.to_dict() for box in self.boxes],
        }
