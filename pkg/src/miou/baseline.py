"""Area-based baseline metrics: IoU, precision/recall/F1, DSC and its logit.

All quantities are pixel-count ratios over masks sharing one frame. DSC
saturates near its bounds, so its logit (LTD) is reported alongside; at
exact saturation LTD is flagged with an explicit ``math.inf`` of the
matching sign rather than clamped or raised.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BothEmpty, EmptyDetection, EmptyGroundTruth
from .mask import Mask, pixel_count, require_same_frame


@dataclass(frozen=True)
class BaselineReport:
    """All area-based metrics for one gt/dt pair; ltd may be +-inf."""

    iou: float
    precision: float
    recall: float
    f1: float
    dsc: float
    ltd: float


def _intersection(gt: Mask, dt: Mask) -> int:
    return int(np.count_nonzero(gt.pixels & dt.pixels))


def iou(gt: Mask, dt: Mask) -> float:
    """|gt & dt| / |gt | dt| on pixel counts."""
    require_same_frame(gt, dt)
    union = int(np.count_nonzero(gt.pixels | dt.pixels))
    if union == 0:
        raise BothEmpty("IoU is undefined when both masks are empty")
    return _intersection(gt, dt) / union


def precision_recall_f1(gt: Mask, dt: Mask) -> tuple[float, float, float]:
    """Pixel precision, recall, and their harmonic mean (0 when P + R = 0)."""
    require_same_frame(gt, dt)
    n_gt = pixel_count(gt)
    n_dt = pixel_count(dt)
    if n_gt == 0:
        raise EmptyGroundTruth("recall is undefined for an empty ground truth")
    if n_dt == 0:
        raise EmptyDetection("precision is undefined for an empty detection")
    inter = _intersection(gt, dt)
    precision = inter / n_dt
    recall = inter / n_gt
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def dsc_ltd(gt: Mask, dt: Mask) -> tuple[float, float]:
    """Dice coefficient and its logit; saturation maps to a signed infinity."""
    require_same_frame(gt, dt)
    total = pixel_count(gt) + pixel_count(dt)
    if total == 0:
        raise BothEmpty("DSC is undefined when both masks are empty")
    dsc = 2 * _intersection(gt, dt) / total
    if dsc >= 1.0:
        ltd = math.inf
    elif dsc <= 0.0:
        ltd = -math.inf
    else:
        ltd = math.log(dsc / (1.0 - dsc))
    return dsc, ltd


def baseline_report(gt: Mask, dt: Mask) -> BaselineReport:
    """All baseline metrics at once; requires both masks nonempty."""
    precision, recall, f1 = precision_recall_f1(gt, dt)
    dsc, ltd = dsc_ltd(gt, dt)
    return BaselineReport(iou=iou(gt, dt), precision=precision, recall=recall, f1=f1, dsc=dsc, ltd=ltd)
