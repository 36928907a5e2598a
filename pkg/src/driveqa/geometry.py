"""Geometric scoring of visual elements: box overlap, displacement, and MSE."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .chains import ElementKind, VisualElement
from .errors import KindMismatch, LengthMismatch


@dataclass(frozen=True)
class ElementPairScore:
    mse: float
    kind: ElementKind


@dataclass(frozen=True)
class ElementSummary:
    """Corpus-level quality of predicted elements.

    box_accuracy is the fraction of reference boxes whose id-matched
    prediction clears the IoU threshold (a missing prediction counts as a
    miss); mean_ade is averaged over id-matched trajectory pairs of equal
    length and is None when no such pair exists.
    """

    box_accuracy: float | None
    mean_ade: float | None
    matched: int
    missing: int
    surplus: int
    length_mismatched: int = 0


def _box(box) -> tuple[float, float, float, float]:
    if hasattr(box, "as_tuple"):
        return box.as_tuple()
    return tuple(float(v) for v in box)


def iou(a, b) -> float:
    """Intersection-over-union of two xyxy boxes; 0 when disjoint."""
    ax1, ay1, ax2, ay2 = _box(a)
    bx1, by1, bx2, by2 = _box(b)
    iw = min(ax2, bx2) - max(ax1, bx1)
    ih = min(ay2, by2) - max(ay1, by1)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = (ax2 - ax1) * (ay2 - ay1) + (bx2 - bx1) * (by2 - by1) - inter
    return inter / union


def _points(traj) -> list[tuple[float, float]]:
    pts = traj.points if hasattr(traj, "points") else traj
    return [(float(x), float(y)) for x, y in pts]


def ade(a, b) -> float:
    """Average displacement error: mean distance over index-paired points."""
    pa, pb = _points(a), _points(b)
    if len(pa) != len(pb):
        raise LengthMismatch(f"trajectory lengths differ: {len(pa)} vs {len(pb)}")
    if not pa:
        raise LengthMismatch("trajectories are empty")
    return sum(math.hypot(p[0] - q[0], p[1] - q[1]) for p, q in zip(pa, pb)) / len(pa)


def element_mse(h: VisualElement, r: VisualElement, gap_penalty: float = 15.0) -> ElementPairScore:
    """Mean square error between two like-kind elements.

    Boxes average the squared differences of the four coordinates.
    Trajectories average squared point distances over the common leading
    prefix; when lengths differ, each surplus point contributes
    `gap_penalty` to the mean so the result is always defined (the default
    matches the visual-similarity cutoff, pushing similarity to zero).
    """
    if h.kind != r.kind:
        raise KindMismatch(f"cannot compare {h.kind.value} with {r.kind.value}")
    if h.kind == ElementKind.LOC:
        diffs = [(ha - ra) ** 2 for ha, ra in zip(h.payload, r.payload)]
        return ElementPairScore(mse=sum(diffs) / 4.0, kind=ElementKind.LOC)
    ph, pr = _points(h.payload), _points(r.payload)
    common = min(len(ph), len(pr))
    total = sum(
        (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 for p, q in zip(ph[:common], pr[:common])
    )
    surplus = max(len(ph), len(pr)) - common
    total += gap_penalty * surplus
    return ElementPairScore(mse=total / (common + surplus), kind=ElementKind.MOT)


def evaluate_elements(pred, gt, iou_threshold: float = 0.5) -> ElementSummary:
    """Score predicted elements against references matched by id.

    `pred` and `gt` are sequences of (id, VisualElement) with unique ids
    per list.  Boxes are judged by IoU at the threshold; trajectories by
    displacement error.  Counts report id-level matched / missing /
    surplus, plus trajectory pairs skipped for unequal length.
    """
    pred_by_id = dict(pred)
    gt_by_id = dict(gt)
    if len(pred_by_id) != len(list(pred)) or len(gt_by_id) != len(list(gt)):
        raise ValueError("element ids must be unique within each list")

    matched = missing = 0
    box_total = box_hits = 0
    ades: list[float] = []
    length_mismatched = 0
    for gid, gel in gt:
        pel = pred_by_id.get(gid)
        if pel is None or pel.kind != gel.kind:
            missing += 1
            if gel.kind == ElementKind.LOC:
                box_total += 1
            continue
        matched += 1
        if gel.kind == ElementKind.LOC:
            box_total += 1
            if iou(pel.payload, gel.payload) >= iou_threshold:
                box_hits += 1
        else:
            try:
                ades.append(ade(pel.payload, gel.payload))
            except LengthMismatch:
                length_mismatched += 1
    surplus = sum(1 for pid, _ in pred if pid not in gt_by_id)

    return ElementSummary(
        box_accuracy=(box_hits / box_total) if box_total else None,
        mean_ade=(sum(ades) / len(ades)) if ades else None,
        matched=matched,
        missing=missing,
        surplus=surplus,
        length_mismatched=length_mismatched,
    )
