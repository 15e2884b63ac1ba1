"""World, object-track and observer specifications with their JSON schema.

World JSON document (schema_version 1):

    {
      "schema_version": 1,
      "image_width": 1920, "image_height": 1080, "fps": 30,
      "duration_frames": 300, "seed": 7,
      "objects": [
        {"track_id": 0, "class_id": 1, "box": [x1, y1, x2, y2],
         "velocity": [vx, vy], "acceleration": [ax, ay],
         "spawn_frame": 0, "despawn_frame": null}
      ]
    }

Velocities are pixels/frame, accelerations pixels/frame^2. despawn_frame null means the
object lives until the end of the world.
"""

import json
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

from pathlib import Path
from typing import Any, Optional

from core.errors import SchemaVersionError
from core.geometry import BBox

WORLD_SCHEMA_VERSION = 1

DEFAULT_IMAGE_WIDTH = 1920
DEFAULT_IMAGE_HEIGHT = 1080
DEFAULT_FPS = 30.0


@dataclass(frozen=True)
class ObjectTrack:
    """One synthetic object moving with constant velocity or acceleration."""

    track_id: int
    class_id: int
    box: tuple[float, float, float, float]
    velocity: tuple[float, float] = (0.0, 0.0)
    acceleration: tuple[float, float] = (0.0, 0.0)
    spawn_frame: int = 0
    despawn_frame: Optional[int] = None

    def __post_init__(self) -> None:
        if self.spawn_frame < 0:
            raise ValueError(f"track {self.track_id}: spawn_frame must be >= 0")
        if self.despawn_frame is not None and self.despawn_frame <= self.spawn_frame:
            raise ValueError(f"track {self.track_id}: despawn_frame must be after spawn_frame")
        if not all(math.isfinite(v) for v in (*self.velocity, *self.acceleration)):
            raise ValueError(f"track {self.track_id}: non-finite motion parameters")
        # Raises InvalidBoxError for a degenerate initial box
        BBox(*self.box, class_id=self.class_id, track_id=self.track_id)

    def is_alive(self, frame_index: int) -> bool:
        if frame_index < self.spawn_frame:
            return False
        return self.despawn_frame is None or frame_index < self.despawn_frame

    def box_at(self, frame_index: int) -> BBox:
        """Unclamped box k = frame_index - spawn_frame frames after spawning."""
        k = frame_index - self.spawn_frame
        dx = self.velocity[0] * k + 0.5 * self.acceleration[0] * k * k
        dy = self.velocity[1] * k + 0.5 * self.acceleration[1] * k * k
        x1, y1, x2, y2 = self.box
        return BBox(x1 + dx, y1 + dy, x2 + dx, y2 + dy, class_id=self.class_id, score=1.0, track_id=self.track_id)

    def to_dict(self) -> dict[str, Any]:
        return {
            "track_id": self.track_id,
            "class_id": self.class_id,
            "box": list(self.box),
            "velocity": list(self.velocity),
            "acceleration": list(self.acceleration),
            "spawn_frame": self.spawn_frame,
            "despawn_frame": self.despawn_frame,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ObjectTrack":
        despawn = data.get("despawn_frame")
        return cls(
            track_id=int(data["track_id"]),
            class_id=int(data.get("class_id", 0)),
            box=tuple(float(v) for v in data["box"]),
            velocity=tuple(float(v) for v in data.get("velocity", (0.0, 0.0))),
            acceleration=tuple(float(v) for v in data.get("acceleration", (0.0, 0.0))),
            spawn_frame=int(data.get("spawn_frame", 0)),
            despawn_frame=None if despawn is None else int(despawn),
        )


@dataclass(frozen=True)
class WorldSpec:
    """Synthetic scene: image size, frame rate, duration and objects."""

    duration_frames: int
    objects: tuple[ObjectTrack, ...]
    image_width: float = DEFAULT_IMAGE_WIDTH
    image_height: float = DEFAULT_IMAGE_HEIGHT
    fps: float = DEFAULT_FPS
    seed: int = 0

    def __post_init__(self) -> None:
        if self.duration_frames < 2:
            raise ValueError(f"world needs at least 2 frames, got {self.duration_frames}")
        if not self.objects:
            raise ValueError("world needs at least one object")
        if self.image_width <= 0 or self.image_height <= 0:
            raise ValueError("image dimensions must be positive")
        if not (math.isfinite(self.fps) and self.fps > 0):
            raise ValueError(f"fps must be positive, got {self.fps}")
        track_ids = [obj.track_id for obj in self.objects]
        if len(track_ids) != len(set(track_ids)):
            raise ValueError("track ids must be unique within a world")
        if any(tid < 0 for tid in track_ids):
            raise ValueError("track ids must be non-negative")

    @property
    def class_count(self) -> int:
        return max(obj.class_id for obj in self.objects) + 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": WORLD_SCHEMA_VERSION,
            "image_width": self.image_width,
            "image_height": self.image_height,
            "fps": self.fps,
            "duration_frames": self.duration_frames,
            "seed": self.seed,
            "objects": [obj.to_dict() for obj in self.objects],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "WorldSpec":
        version = data.get("schema_version")
        if version != WORLD_SCHEMA_VERSION:
            raise SchemaVersionError(version, WORLD_SCHEMA_VERSION)
        return cls(
            duration_frames=int(data["duration_frames"]),
            objects=tuple(ObjectTrack.from_dict(obj) for obj in data["objects"]),
            image_width=float(data.get("image_width", DEFAULT_IMAGE_WIDTH)),
            image_height=float(data.get("image_height", DEFAULT_IMAGE_HEIGHT)),
            fps=float(data.get("fps", DEFAULT_FPS)),
            seed=int(data.get("seed", 0)),
        )


def load_world(path: Path) -> WorldSpec:
    """Read a world JSON document."""
    with open(path, encoding="utf-8") as f:
        return WorldSpec.from_dict(json.load(f))


def save_world(world: WorldSpec, path: Path) -> None:
    """Write a world JSON document."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(world.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")


# ============== Observer ==============


class ObserverKind(StrEnum):
    ORACLE = "oracle"
    NOISY = "noisy"


@dataclass(frozen=True)
class ObserverSpec:
    """Detector stand-in: exact (oracle) or with localization noise, misses and false positives."""

    kind: ObserverKind = ObserverKind.ORACLE
    position_noise_std: float = 0.0  # pixels, per coordinate
    miss_prob: float = 0.0  # [0, 1]
    false_positive_rate: float = 0.0  # Poisson mean per frame
    seed: int = 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.position_noise_std) and self.position_noise_std >= 0):
            raise ValueError(f"position_noise_std must be >= 0, got {self.position_noise_std}")
        if not 0.0 <= self.miss_prob <= 1.0:
            raise ValueError(f"miss_prob must be in [0, 1], got {self.miss_prob}")
        if not (math.isfinite(self.false_positive_rate) and self.false_positive_rate >= 0):
            raise ValueError(f"false_positive_rate must be >= 0, got {self.false_positive_rate}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "position_noise_std": self.position_noise_std,
            "miss_prob": self.miss_prob,
            "false_positive_rate": self.false_positive_rate,
            "seed": self.seed,
        }
