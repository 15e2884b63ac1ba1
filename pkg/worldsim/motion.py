"""Two-point linear extrapolation of boxes between feature snapshots.

This is the analytic counterpart of fusing two frame features into a moving trend:
per-coordinate velocity from a (current, past) pair, projected forward_steps frames.
"""

import logging
from typing import Optional

import numpy as np

from core.errors import InvalidBoxError
from core.frames import FeatureSnapshot
from core.geometry import BBox, iou_matrix

logger = logging.getLogger(__name__)

ASSOCIATION_IOU_THRESHOLD = 0.3


def associate_by_iou(
    a: FeatureSnapshot,
    b: FeatureSnapshot,
    threshold: float = ASSOCIATION_IOU_THRESHOLD
) -> list[tuple[int, int]]:
    """Greedy one-to-one matching of a.boxes to b.boxes by descending IoU.

    Only boxes of the same class are paired. Ties are broken by the lower index in a,
    then the lower index in b. Returns (index_in_a, index_in_b) pairs.
    """
    overlaps = iou_matrix(a.boxes, b.boxes)
    candidates = [
        (float(overlaps[i, j]), i, j)
        for i, box_a in enumerate(a.boxes)
        for j, box_b in enumerate(b.boxes)
        if box_a.class_id == box_b.class_id and overlaps[i, j] >= threshold
    ]
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))

    used_a: set[int] = set()
    used_b: set[int] = set()
    pairs = []
    for _, i, j in candidates:
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        pairs.append((i, j))
    return pairs


def _match_past_boxes(current: FeatureSnapshot, past: FeatureSnapshot) -> list[Optional[BBox]]:
    """For each current box, its counterpart in past (None when unmatched)."""
    has_ids = all(box.track_id is not None for box in (*current.boxes, *past.boxes))
    if has_ids:
        by_id = {box.track_id: box for box in past.boxes}
        return [by_id.get(box.track_id) for box in current.boxes]

    matched: list[Optional[BBox]] = [None] * len(current.boxes)
    for i, j in associate_by_iou(current, past):
        matched[i] = past.boxes[j]
    return matched


def extrapolate(current: FeatureSnapshot, past: FeatureSnapshot, forward_steps: int) -> list[BBox]:
    """Project current boxes forward_steps frames using velocity from the past snapshot.

    Velocity per coordinate is (current - past) / gap with gap the frame-index difference.
    Boxes without a counterpart, a zero gap or zero forward steps leave boxes unmoved.
    """
    if forward_steps < 0:
        raise ValueError(f"forward_steps must be >= 0, got {forward_steps}")
    gap = current.frame_index - past.frame_index
    if gap < 0:
        raise ValueError(f"past frame {past.frame_index} is newer than current frame {current.frame_index}")
    if gap == 0 or forward_steps == 0:
        return list(current.boxes)

    projected = []
    for box, past_box in zip(current.boxes, _match_past_boxes(current, past)):
        if past_box is None:
            projected.append(box)
            continue
        now = np.array(box.coords)
        velocity = (now - np.array(past_box.coords)) / gap
        x1, y1, x2, y2 = (float(v) for v in now + velocity * forward_steps)
        try:
            projected.append(box.with_coords(x1, y1, x2, y2))
        except InvalidBoxError:
            # Shrinking noise can collapse a box; keep the observation instead
            logger.debug("Collapsed forecast for track %s, keeping current box", box.track_id)
            projected.append(box)
    return projected
