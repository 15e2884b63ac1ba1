"""COCO-style average precision over per-image box sets.

Functions:
- average_precision(predictions, truths, iou_threshold, size_class) -> Optional[float]
- count_matches(predictions, truths, iou_threshold) -> int
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from core.geometry import BBox, SizeClass, box_area_class, iou_matrix

# 0.50:0.05:0.95
IOU_THRESHOLDS: tuple[float, ...] = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))

# 101-point interpolation grid 0:0.01:1
RECALL_THRESHOLDS = np.linspace(0.0, 1.0, 101)

ImageBoxes = Sequence[Sequence[BBox]]


@dataclass
class _ImageState:
    """Per-image, per-class matching state."""

    detections: list[BBox]
    truths: list[BBox]
    truth_ignored: list[bool]
    overlaps: np.ndarray
    matched: list[bool]


def _prepare_image(
    predictions: Sequence[BBox],
    truths: Sequence[BBox],
    class_id: int,
    size_class: Optional[SizeClass]
) -> _ImageState:
    gts = [box for box in truths if box.class_id == class_id]
    ignored = [size_class is not None and box_area_class(box) != size_class for box in gts]
    # Non-ignored truths first so they win over ignored ones
    order = sorted(range(len(gts)), key=lambda g: ignored[g])
    gts = [gts[g] for g in order]
    ignored = [ignored[g] for g in order]
    dets = [box for box in predictions if box.class_id == class_id]
    return _ImageState(
        detections=dets,
        truths=gts,
        truth_ignored=ignored,
        overlaps=iou_matrix(dets, gts),
        matched=[False] * len(gts),
    )


def _best_truth(state: _ImageState, det_index: int, iou_threshold: float) -> int:
    """Index of the unmatched truth with the highest IoU >= threshold, or -1."""
    best_iou = iou_threshold
    best = -1
    for g in range(len(state.truths)):
        if state.matched[g]:
            continue
        # Once a real truth is matched, ignored truths cannot replace it
        if best > -1 and not state.truth_ignored[best] and state.truth_ignored[g]:
            break
        overlap = state.overlaps[det_index, g]
        if overlap < best_iou or (best > -1 and overlap == best_iou):
            continue
        best_iou = overlap
        best = g
    return best


def _interpolated_ap(is_tp: np.ndarray, truth_count: int) -> float:
    """101-point interpolated AP from the TP/FP sequence of score-ranked detections."""
    if is_tp.size == 0:
        return 0.0
    tp = np.cumsum(is_tp, dtype=np.float64)
    fp = np.cumsum(~is_tp, dtype=np.float64)
    recall = tp / truth_count
    precision = tp / (tp + fp)
    # Precision envelope: max over this and all later points
    precision = np.maximum.accumulate(precision[::-1])[::-1]

    indices = np.searchsorted(recall, RECALL_THRESHOLDS, side="left")
    sampled = np.where(indices < precision.size, precision[np.minimum(indices, precision.size - 1)], 0.0)
    return float(np.mean(sampled))


def _class_ap(
    predictions: ImageBoxes,
    truths: ImageBoxes,
    class_id: int,
    iou_threshold: float,
    size_class: Optional[SizeClass]
) -> float:
    states = [
        _prepare_image(preds, gts, class_id, size_class)
        for preds, gts in zip(predictions, truths)
    ]
    truth_count = sum(
        1 for state in states for ignored in state.truth_ignored if not ignored
    )

    ranked = sorted(
        (
            (-det.score, image, order)
            for image, state in enumerate(states)
            for order, det in enumerate(state.detections)
        )
    )

    outcomes: list[bool] = []
    for _, image, order in ranked:
        state = states[image]
        g = _best_truth(state, order, iou_threshold)
        if g > -1:
            state.matched[g] = True
            if state.truth_ignored[g]:
                continue
            outcomes.append(True)
            continue
        det = state.detections[order]
        if size_class is not None and box_area_class(det) != size_class:
            continue
        outcomes.append(False)

    return _interpolated_ap(np.array(outcomes, dtype=bool), truth_count)


def average_precision(
    predictions: ImageBoxes,
    truths: ImageBoxes,
    iou_threshold: float,
    size_class: Optional[SizeClass] = None
) -> Optional[float]:
    """Mean over ground-truth classes of the 101-point interpolated AP.

    Predictions are ranked by descending score, ties broken by image index then input
    order. When size_class is given, truths of other sizes are ignored (matching them
    neither helps nor hurts) and so are unmatched predictions of other sizes. Returns None
    when there is no ground truth to score against.
    """
    if len(predictions) != len(truths):
        raise ValueError(f"{len(predictions)} prediction images vs {len(truths)} truth images")
    for image in predictions:
        for box in image:
            if not 0.0 <= box.score <= 1.0:
                raise ValueError(f"prediction score {box.score} outside [0, 1]")

    classes = sorted({
        box.class_id
        for image in truths
        for box in image
        if size_class is None or box_area_class(box) == size_class
    })
    if not classes:
        return None

    per_class = [
        _class_ap(predictions, truths, class_id, iou_threshold, size_class)
        for class_id in classes
    ]
    return float(np.mean(per_class))


def count_matches(predictions: Sequence[BBox], truths: Sequence[BBox], iou_threshold: float) -> int:
    """Number of same-class prediction/truth pairs matched greedily by descending score."""
    matched = 0
    for class_id in sorted({box.class_id for box in truths}):
        state = _prepare_image(predictions, truths, class_id, None)
        ranked = sorted(range(len(state.detections)), key=lambda d: (-state.detections[d].score, d))
        for d in ranked:
            g = _best_truth(state, d, iou_threshold)
            if g > -1:
                state.matched[g] = True
                matched += 1
    return matched
