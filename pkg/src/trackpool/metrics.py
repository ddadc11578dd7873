"""One-pass evaluation metrics: precision and success curves.

Precision: fraction of frames whose center error is within tau pixels, for
tau = 0..50 step 1; the 20-pixel value is the headline precision. Success:
fraction of frames with IoU strictly greater than theta, for theta = 0..1
in 21 steps; the AUC is the mean of those 21 values.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .boxes import BoundingBox

PRECISION_THRESHOLDS = np.arange(51, dtype=np.float64)
SUCCESS_THRESHOLDS = np.arange(21, dtype=np.float64) * 0.05
PRECISION_REFERENCE_PX = 20


def _check_pairs(pred: Sequence[BoundingBox], gt: Sequence[BoundingBox]):
    if len(pred) == 0 or len(pred) != len(gt):
        raise ValueError(f"need equal non-empty box lists, got {len(pred)} "
                         f"predictions and {len(gt)} ground truths")


def precision_curve(pred: Sequence[BoundingBox], gt: Sequence[BoundingBox]):
    """(51-value curve, precision at 20 px)."""
    _check_pairs(pred, gt)
    d = np.array([p.center_distance(g) for p, g in zip(pred, gt)])
    curve = (d[None, :] <= PRECISION_THRESHOLDS[:, None]).mean(axis=1)
    return curve, float(curve[PRECISION_REFERENCE_PX])


def success_auc(pred: Sequence[BoundingBox], gt: Sequence[BoundingBox]):
    """(21-value curve, area under it). Overlap comparisons are strict."""
    _check_pairs(pred, gt)
    iou = np.array([p.iou(g) for p, g in zip(pred, gt)])
    curve = (iou[None, :] > SUCCESS_THRESHOLDS[:, None]).mean(axis=1)
    return curve, float(curve.mean())


@dataclass
class EvalCurves:
    precision: np.ndarray
    success: np.ndarray
    precision_at_20: float
    auc: float


def evaluate(pred: Sequence[BoundingBox], gt: Sequence[BoundingBox]) -> EvalCurves:
    p_curve, p20 = precision_curve(pred, gt)
    s_curve, auc = success_auc(pred, gt)
    return EvalCurves(precision=p_curve, success=s_curve,
                      precision_at_20=p20, auc=auc)
