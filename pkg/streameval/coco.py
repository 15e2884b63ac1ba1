"""Ground-truth ingestion from COCO-format annotation files.

Frames are ordered by image id; frame k of the stream is the k-th image. Boxes use COCO's
[x, y, width, height] convention and are converted to corner coordinates. An optional
per-annotation `track_id` is carried over.
"""

import logging
from pathlib import Path

from pycocotools.coco import COCO

from core.frames import GroundTruthFrame
from core.geometry import BBox, clamp_box

logger = logging.getLogger(__name__)


def ground_truth_from_coco(coco: COCO) -> list[GroundTruthFrame]:
    """Convert an indexed COCO annotation set into ordered ground-truth frames."""
    for key in ("images", "annotations", "categories"):
        if key not in coco.dataset:
            raise ValueError(f"COCO document missing {key!r}")

    category_ids = set(coco.getCatIds())
    frames = []
    skipped = 0
    for frame_index, image_id in enumerate(sorted(coco.getImgIds())):
        image = coco.loadImgs(image_id)[0]
        width, height = float(image["width"]), float(image["height"])
        boxes = []
        for ann in coco.loadAnns(coco.getAnnIds(imgIds=[image_id])):
            if int(ann["category_id"]) not in category_ids:
                raise ValueError(f"annotation {ann.get('id')} uses unknown category {ann['category_id']}")
            x, y, w, h = (float(v) for v in ann["bbox"])
            if w <= 0 or h <= 0:
                skipped += 1
                continue
            box = clamp_box(
                BBox(x, y, x + w, y + h, class_id=int(ann["category_id"]), track_id=ann.get("track_id")),
                width,
                height,
            )
            if box is None:
                skipped += 1
                continue
            boxes.append(box)
        frames.append(GroundTruthFrame(frame_index, tuple(boxes), width, height))

    if skipped:
        logger.warning("Skipped %d degenerate COCO annotations", skipped)
    return frames


def load_coco_ground_truth(path: Path) -> list[GroundTruthFrame]:
    """Read COCO annotations as an ordered frame sequence."""
    frames = ground_truth_from_coco(COCO(str(path)))
    logger.info("Loaded %d ground-truth frames from %s", len(frames), path)
    return frames
