"""Shared domain types and geometry primitives."""

from core.errors import (
    ConfigError,
    DigestMismatchError,
    InvalidBoxError,
    SchemaVersionError,
    StreamSimError,
    TraceExhaustedError,
    TraceFormatError,
)
from core.frames import (
    TIME_EPSILON_MS,
    FeatureSnapshot,
    FrameClock,
    GroundTruthFrame,
)
from core.geometry import (
    BBox,
    SizeClass,
    box_area_class,
    clamp_box,
    iou,
    iou_matrix,
)

__all__ = [
    # Errors
    "StreamSimError",
    "InvalidBoxError",
    "TraceExhaustedError",
    "TraceFormatError",
    "ConfigError",
    "DigestMismatchError",
    "SchemaVersionError",
    # Frames
    "TIME_EPSILON_MS",
    "FrameClock",
    "FeatureSnapshot",
    "GroundTruthFrame",
    # Geometry
    "BBox",
    "SizeClass",
    "box_area_class",
    "clamp_box",
    "iou",
    "iou_matrix",
]
