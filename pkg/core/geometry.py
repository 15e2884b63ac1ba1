"""Box geometry: the BBox type, IoU and COCO size classes.

Functions:
- iou(a, b) -> float
- iou_matrix(boxes_a, boxes_b) -> np.ndarray
- box_area_class(box) -> SizeClass
- clamp_box(box, width, height) -> Optional[BBox]
"""

import math
from dataclasses import dataclass, replace
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        def __str__(self) -> str:
            return str(self.value)

        def __format__(self, format_spec: str) -> str:
            return str.__format__(str(self.value), format_spec)

from typing import Any, Optional, Sequence

import numpy as np

from core.errors import InvalidBoxError

# COCO area thresholds in square pixels
SMALL_AREA_MAX = 32.0**2
LARGE_AREA_MIN = 96.0**2

# Boxes narrower than this after clamping are considered gone
MIN_BOX_SIDE = 1.0


class SizeClass(StrEnum):
    """COCO object size buckets."""

    SMALL = "S"
    MEDIUM = "M"
    LARGE = "L"


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in continuous pixel coordinates."""

    x1: float
    y1: float
    x2: float
    y2: float
    class_id: int = 0
    score: float = 1.0
    track_id: Optional[int] = None

    def __post_init__(self) -> None:
        coords = (self.x1, self.y1, self.x2, self.y2)
        if not all(math.isfinite(c) for c in coords):
            raise InvalidBoxError(f"non-finite coordinates {coords}")
        if not (self.x2 > self.x1 and self.y2 > self.y1):
            raise InvalidBoxError(f"degenerate box {coords}")
        if not 0.0 <= self.score <= 1.0:
            raise InvalidBoxError(f"score {self.score} outside [0, 1]")

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def coords(self) -> tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)

    def with_coords(self, x1: float, y1: float, x2: float, y2: float) -> "BBox":
        """Return a copy with new coordinates and the same identity fields."""
        return replace(self, x1=x1, y1=y1, x2=x2, y2=y2)

    def to_dict(self) -> dict[str, Any]:
        return {
            "x1": self.x1,
            "y1": self.y1,
            "x2": self.x2,
            "y2": self.y2,
            "class_id": self.class_id,
            "score": self.score,
            "track_id": self.track_id,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "BBox":
        return cls(
            x1=float(data["x1"]),
            y1=float(data["y1"]),
            x2=float(data["x2"]),
            y2=float(data["y2"]),
            class_id=int(data.get("class_id", 0)),
            score=float(data.get("score", 1.0)),
            track_id=data.get("track_id"),
        )


# ============== Overlap ==============


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union of two boxes."""
    inter_w = min(a.x2, b.x2) - max(a.x1, b.x1)
    inter_h = min(a.y2, b.y2) - max(a.y1, b.y1)
    if inter_w <= 0.0 or inter_h <= 0.0:
        return 0.0
    inter = inter_w * inter_h
    return inter / (a.area + b.area - inter)


def iou_matrix(boxes_a: Sequence[BBox], boxes_b: Sequence[BBox]) -> np.ndarray:
    """Pairwise IoU, shape (len(boxes_a), len(boxes_b)).

    Entries are computed with the same arithmetic as iou() so both agree bit-for-bit.
    """
    if not boxes_a or not boxes_b:
        return np.zeros((len(boxes_a), len(boxes_b)), dtype=np.float64)

    a = np.array([box.coords for box in boxes_a], dtype=np.float64)
    b = np.array([box.coords for box in boxes_b], dtype=np.float64)

    inter_w = np.minimum(a[:, None, 2], b[None, :, 2]) - np.maximum(a[:, None, 0], b[None, :, 0])
    inter_h = np.minimum(a[:, None, 3], b[None, :, 3]) - np.maximum(a[:, None, 1], b[None, :, 1])
    overlapping = (inter_w > 0.0) & (inter_h > 0.0)
    inter = np.where(overlapping, inter_w * inter_h, 0.0)

    area_a = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1])
    area_b = (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1])
    union = area_a[:, None] + area_b[None, :] - inter
    return np.where(overlapping, inter / union, 0.0)


# ============== Size And Bounds ==============


def box_area_class(box: BBox) -> SizeClass:
    """Bucket a box by area using the COCO thresholds."""
    if box.area < SMALL_AREA_MAX:
        return SizeClass.SMALL
    if box.area > LARGE_AREA_MIN:
        return SizeClass.LARGE
    return SizeClass.MEDIUM


def clamp_box(box: BBox, width: float, height: float) -> Optional[BBox]:
    """Clip a box to the image; None if less than a pixel of it remains."""
    x1 = min(max(box.x1, 0.0), width)
    y1 = min(max(box.y1, 0.0), height)
    x2 = min(max(box.x2, 0.0), width)
    y2 = min(max(box.y2, 0.0), height)
    if x2 - x1 < MIN_BOX_SIDE or y2 - y1 < MIN_BOX_SIDE:
        return None
    return box.with_coords(x1, y1, x2, y2)
