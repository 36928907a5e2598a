"""Geometric element scoring: IoU, displacement error, element MSE."""

import random

import pytest

from driveqa.chains import ElementKind, VisualElement
from driveqa.errors import KindMismatch, LengthMismatch
from driveqa.geometry import ade, element_mse, evaluate_elements, iou


def _loc(*coords):
    return VisualElement(ElementKind.LOC, tuple(float(c) for c in coords))


def _mot(*points):
    return VisualElement(ElementKind.MOT, tuple((float(a), float(b)) for a, b in points))


class TestIoU:
    def test_identical_boxes(self):
        assert iou((0, 0, 10, 10), (0, 0, 10, 10)) == 1.0

    def test_disjoint_boxes(self):
        assert iou((0, 0, 10, 10), (20, 20, 30, 30)) == 0.0

    def test_half_overlap_case(self):
        assert iou((0, 0, 10, 10), (5, 0, 15, 10)) == pytest.approx(1 / 3, abs=1e-6)

    def test_symmetry_and_translation_invariance(self):
        rng = random.Random(3)
        for _ in range(100):
            a = sorted(rng.uniform(0, 50) for _ in range(2))
            b = sorted(rng.uniform(0, 50) for _ in range(2))
            box1 = (a[0], b[0], a[1] + 1, b[1] + 1)
            c = sorted(rng.uniform(0, 50) for _ in range(2))
            d = sorted(rng.uniform(0, 50) for _ in range(2))
            box2 = (c[0], d[0], c[1] + 1, d[1] + 1)
            assert iou(box1, box2) == iou(box2, box1)
            dx, dy = rng.uniform(-20, 20), rng.uniform(-20, 20)
            shifted1 = (box1[0] + dx, box1[1] + dy, box1[2] + dx, box1[3] + dy)
            shifted2 = (box2[0] + dx, box2[1] + dy, box2[2] + dx, box2[3] + dy)
            assert iou(shifted1, shifted2) == pytest.approx(iou(box1, box2), abs=1e-9)


class TestADE:
    def test_identical_trajectories(self):
        assert ade([(0, 0), (1, 1)], [(0, 0), (1, 1)]) == 0.0

    def test_three_four_five_shift(self):
        assert ade([(0, 0), (1, 0)], [(3, 4), (4, 4)]) == 5.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            ade([(0, 0), (1, 0)], [(0, 0), (1, 0), (2, 0)])

    def test_triangle_bound(self):
        rng = random.Random(9)
        for _ in range(100):
            n = rng.randint(1, 6)
            a = [(rng.uniform(-9, 9), rng.uniform(-9, 9)) for _ in range(n)]
            b = [(rng.uniform(-9, 9), rng.uniform(-9, 9)) for _ in range(n)]
            c = [(rng.uniform(-9, 9), rng.uniform(-9, 9)) for _ in range(n)]
            assert ade(a, c) <= ade(a, b) + ade(b, c) + 1e-12

    def test_scaling(self):
        a = [(1.0, 2.0), (3.0, 4.0)]
        b = [(0.0, 1.0), (5.0, 5.0)]
        for k in (0.5, 2.0, -3.0):
            ka = [(k * x, k * y) for x, y in a]
            kb = [(k * x, k * y) for x, y in b]
            assert ade(ka, kb) == pytest.approx(abs(k) * ade(a, b), rel=1e-12)


class TestElementMSE:
    def test_identical_elements_zero(self):
        assert element_mse(_loc(0, 0, 10, 10), _loc(0, 0, 10, 10)).mse == 0.0
        assert element_mse(_mot((1, 2), (3, 4)), _mot((1, 2), (3, 4))).mse == 0.0

    def test_unit_shifted_box(self):
        assert element_mse(_loc(0, 0, 10, 10), _loc(1, 1, 11, 11)).mse == 1.0

    def test_kind_mismatch(self):
        with pytest.raises(KindMismatch):
            element_mse(_loc(0, 0, 1, 1), _mot((0, 0), (1, 1)))

    def test_trajectory_mse_is_mean_squared_distance(self):
        value = element_mse(_mot((0, 0), (1, 0)), _mot((3, 4), (4, 4))).mse
        assert value == pytest.approx(25.0, abs=1e-12)

    def test_surplus_points_penalized(self):
        short = _mot((0, 0), (1, 0))
        long = _mot((0, 0), (1, 0), (2, 0))
        value = element_mse(short, long, gap_penalty=15.0).mse
        assert value == pytest.approx(15.0 / 3, abs=1e-12)
        assert element_mse(long, short, gap_penalty=15.0).mse == value

    def test_mse_scaling(self):
        a = _mot((1, 2), (3, 4))
        b = _mot((0, 1), (5, 5))
        for k in (0.5, 3.0):
            ka = _mot(*((k * x, k * y) for x, y in a.payload))
            kb = _mot(*((k * x, k * y) for x, y in b.payload))
            assert element_mse(ka, kb).mse == pytest.approx(k * k * element_mse(a, b).mse, rel=1e-12)


class TestEvaluateElements:
    def test_perfect_predictions(self):
        gt = [("a", _loc(0, 0, 10, 10)), ("b", _mot((0, 0), (1, 1)))]
        summary = evaluate_elements(gt, gt, 0.5)
        assert summary.box_accuracy == 1.0
        assert summary.mean_ade == 0.0
        assert summary.matched == 2 and summary.missing == 0 and summary.surplus == 0

    def test_no_predictions(self):
        gt = [("a", _loc(0, 0, 10, 10)), ("b", _mot((0, 0), (1, 1)))]
        summary = evaluate_elements([], gt, 0.5)
        assert summary.box_accuracy == 0.0
        assert summary.mean_ade is None
        assert summary.matched == 0 and summary.missing == 2

    def test_mixed_iou_fixture_accuracy_half(self):
        # constructed IoUs: 1.0, 0.6, 0.4, 0.0 at threshold 0.5 -> accuracy 0.5
        gt = [
            ("g0", _loc(0, 0, 10, 10)),
            ("g1", _loc(0, 0, 10, 10)),
            ("g2", _loc(0, 0, 10, 10)),
            ("g3", _loc(0, 0, 10, 10)),
        ]
        pred = [
            ("g0", _loc(0, 0, 10, 10)),
            ("g1", _loc(0, 0, 10, 6)),
            ("g2", _loc(0, 0, 10, 4)),
            ("g3", _loc(20, 20, 30, 30)),
        ]
        assert iou(pred[1][1].payload, gt[1][1].payload) == pytest.approx(0.6, abs=1e-12)
        assert iou(pred[2][1].payload, gt[2][1].payload) == pytest.approx(0.4, abs=1e-12)
        summary = evaluate_elements(pred, gt, 0.5)
        assert summary.box_accuracy == 0.5

    def test_surplus_counted(self):
        gt = [("a", _loc(0, 0, 10, 10))]
        pred = [("a", _loc(0, 0, 10, 10)), ("z", _loc(1, 1, 2, 2))]
        summary = evaluate_elements(pred, gt, 0.5)
        assert summary.surplus == 1

    def test_length_mismatched_trajectories_reported(self):
        gt = [("m", _mot((0, 0), (1, 1), (2, 2)))]
        pred = [("m", _mot((0, 0), (1, 1)))]
        summary = evaluate_elements(pred, gt, 0.5)
        assert summary.length_mismatched == 1
        assert summary.mean_ade is None
