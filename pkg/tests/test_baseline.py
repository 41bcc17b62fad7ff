import math

import numpy as np
import pytest

from miou.baseline import baseline_report, dsc_ltd, iou, precision_recall_f1
from miou.errors import BothEmpty, DimensionMismatch, EmptyDetection, EmptyGroundTruth
from miou.mask import Mask

from support import random_mask

# 4x4 pair worked out by hand: |gt| = 6, |dt| = 6, overlap = 4.
GT = Mask.from_points(4, 4, [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)])
DT = Mask.from_points(4, 4, [(1, 0), (2, 0), (1, 1), (2, 1), (3, 0), (3, 1)])


def test_iou_hand_value():
    assert iou(GT, DT) == pytest.approx(4 / 8)


def test_precision_recall_f1_hand_values():
    precision, recall, f1 = precision_recall_f1(GT, DT)
    assert precision == pytest.approx(4 / 6)
    assert recall == pytest.approx(4 / 6)
    assert f1 == pytest.approx(4 / 6)


def test_dsc_and_ltd_hand_values():
    dsc, ltd = dsc_ltd(GT, DT)
    assert dsc == pytest.approx(8 / 12)
    assert ltd == pytest.approx(math.log((8 / 12) / (1 - 8 / 12)))


def test_identity_is_all_ones_with_infinite_ltd():
    report = baseline_report(GT, GT)
    assert report.iou == 1.0
    assert report.precision == report.recall == report.f1 == 1.0
    assert report.dsc == 1.0
    assert report.ltd == math.inf


def test_disjoint_masks_bottom_out():
    a = Mask.from_points(4, 4, [(0, 0)])
    b = Mask.from_points(4, 4, [(3, 3)])
    report = baseline_report(a, b)
    assert report.iou == 0.0
    assert report.f1 == 0.0  # precision + recall == 0 falls back to 0
    assert report.dsc == 0.0
    assert report.ltd == -math.inf


def test_empty_inputs_raise():
    empty = Mask.zeros(4, 4)
    with pytest.raises(BothEmpty):
        iou(empty, empty)
    with pytest.raises(EmptyGroundTruth):
        precision_recall_f1(empty, DT)
    with pytest.raises(EmptyDetection):
        precision_recall_f1(GT, empty)
    with pytest.raises(BothEmpty):
        dsc_ltd(empty, empty)


def test_empty_detection_against_nonempty_gt():
    empty = Mask.zeros(4, 4)
    assert iou(GT, empty) == 0.0
    dsc, ltd = dsc_ltd(GT, empty)
    assert dsc == 0.0 and ltd == -math.inf


def test_frame_mismatch():
    with pytest.raises(DimensionMismatch):
        iou(GT, Mask.zeros(5, 4))


def test_offset_squares_in_tiny_frame():
    # Two 2x2 squares sharing one corner pixel: union 7, overlap 1.
    gt = Mask.from_points(3, 3, [(0, 0), (1, 0), (0, 1), (1, 1)])
    dt = Mask.from_points(3, 3, [(1, 1), (2, 1), (1, 2), (2, 2)])
    report = baseline_report(gt, dt)
    assert report.iou == pytest.approx(1 / 7)
    assert report.dsc == pytest.approx(0.25)
    assert report.ltd == pytest.approx(math.log(1 / 3))


def test_half_covered_ground_truth():
    gt = Mask.from_points(4, 4, [(0, 0), (1, 0), (0, 1), (1, 1)])
    dt = Mask.from_points(4, 4, [(0, 0), (1, 0)])  # half of gt, nothing extra
    precision, recall, f1 = precision_recall_f1(gt, dt)
    assert precision == 1.0
    assert recall == pytest.approx(0.5)
    assert f1 == pytest.approx(2 / 3)


def test_dsc_is_a_function_of_iou():
    rng = np.random.default_rng(21)
    for _ in range(50):
        gt = random_mask(rng, 12, 12, 0.4)
        dt = random_mask(rng, 12, 12, 0.4)
        if not (gt.pixels.any() and dt.pixels.any()):
            continue
        j = iou(gt, dt)
        dsc, _ = dsc_ltd(gt, dt)
        assert abs(dsc - 2 * j / (1 + j)) <= 1e-12


def test_f1_equals_dsc():
    rng = np.random.default_rng(22)
    for _ in range(50):
        gt = random_mask(rng, 10, 14, 0.5)
        dt = random_mask(rng, 10, 14, 0.5)
        if not (gt.pixels.any() and dt.pixels.any()):
            continue
        _, _, f1 = precision_recall_f1(gt, dt)
        dsc, _ = dsc_ltd(gt, dt)
        assert f1 == pytest.approx(dsc, abs=1e-12)


def test_symmetry_of_symmetric_metrics():
    assert iou(GT, DT) == iou(DT, GT)
    assert dsc_ltd(GT, DT) == dsc_ltd(DT, GT)
    p1, r1, _ = precision_recall_f1(GT, DT)
    p2, r2, _ = precision_recall_f1(DT, GT)
    assert p1 == r2 and r1 == p2  # precision and recall swap roles
