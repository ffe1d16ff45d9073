import numpy as np
import pytest

from colorbench import detect
from colorbench.colorspace import convert
from colorbench.errors import (
    DimensionMismatchError,
    EmptyTemplateError,
    InvalidBinsError,
    SpaceMismatchError,
)


def solid(rgb, h=4, w=4):
    return np.tile(np.array(rgb, dtype=np.uint8), (h, w, 1))


# --------------------------------------------------------------- histograms


def test_single_pixel_template():
    t = detect.Template(solid((255, 0, 0), 1, 1), 0)
    h = detect.build_histogram(t, "RGB", 16)
    assert np.count_nonzero(h.counts) == 1
    assert h.max_count == 1
    assert h.ratio.max() == 1.0


def test_solid_template_single_bin():
    t = detect.Template(solid((10, 200, 60), 8, 8), 3)
    h = detect.build_histogram(t, "RGB", 32)
    assert np.count_nonzero(h.counts) == 1
    assert h.max_count == 64
    assert h.counts.sum() == 64


def test_two_pixel_template_distinct_bins():
    # (100,100,200) -> unit (0.392, 0.392, 0.784) -> bin (6, 6, 12)
    # (240, 10, 10) -> unit (0.941, 0.039, 0.039) -> bin (15, 0, 0)
    pixels = np.array([[[100, 100, 200]], [[240, 10, 10]]], dtype=np.uint8)
    h = detect.build_histogram(detect.Template(pixels, 0), "RGB", 16)
    assert h.counts[6, 6, 12] == 1
    assert h.counts[15, 0, 0] == 1
    assert h.counts.sum() == 2
    ratio = h.ratio
    assert ratio[6, 6, 12] == 1.0 and ratio[15, 0, 0] == 1.0


def test_histogram_errors():
    empty = detect.Template(np.zeros((0, 1, 3), dtype=np.uint8), 0)
    with pytest.raises(EmptyTemplateError):
        detect.build_histogram(empty, "RGB", 16)
    t = detect.Template(solid((1, 2, 3)), 0)
    with pytest.raises(InvalidBinsError):
        detect.build_histogram(t, "RGB", 20)


# ------------------------------------------------------------ backprojection


def test_backproject_solid_match_is_ones():
    t = detect.Template(solid((30, 99, 200)), 0)
    h = detect.build_histogram(t, "RGB", 16)
    plane = convert(solid((30, 99, 200), 6, 6), "RGB")
    np.testing.assert_array_equal(detect.backproject(plane, h), np.ones((6, 6)))


def test_backproject_disjoint_is_zero():
    t = detect.Template(solid((255, 0, 0)), 0)
    h = detect.build_histogram(t, "RGB", 16)
    plane = convert(solid((0, 255, 0), 5, 3), "RGB")
    np.testing.assert_array_equal(detect.backproject(plane, h), np.zeros((5, 3)))


def test_backproject_half_match_2x2():
    img = np.array(
        [[[255, 0, 0], [255, 0, 0]], [[0, 255, 0], [0, 255, 0]]], dtype=np.uint8
    )
    t = detect.Template(solid((255, 0, 0)), 0)
    h = detect.build_histogram(t, "RGB", 16)
    bp = detect.backproject(convert(img, "RGB"), h)
    np.testing.assert_array_equal(bp, [[1.0, 1.0], [0.0, 0.0]])


def test_backproject_space_mismatch():
    h = detect.build_histogram(detect.Template(solid((1, 2, 3)), 0), "HSV", 16)
    with pytest.raises(SpaceMismatchError):
        detect.backproject(convert(solid((1, 2, 3)), "RGB"), h)


def test_backproject_values_subset_of_ratio_values():
    rng = np.random.default_rng(0)
    tpl = detect.Template(
        rng.integers(0, 256, size=(12, 12, 3)).astype(np.uint8), 0
    )
    h = detect.build_histogram(tpl, "RGB", 16)
    img = rng.integers(0, 256, size=(20, 20, 3)).astype(np.uint8)
    bp = detect.backproject(convert(img, "RGB"), h)
    assert set(np.unique(bp)) <= set(np.unique(h.ratio))


def test_backproject_invariant_space_scales():
    rng = np.random.default_rng(1)
    img = rng.integers(0, 64, size=(10, 10, 3)).astype(np.uint8)
    tpl = detect.Template(img[:4, :4], 0)
    for space in ("C1C2C3", "rg", "NOPP"):
        h = detect.build_histogram(tpl, space, 32)
        a = detect.backproject(convert(img.astype(np.float64) / 255.0, space), h)
        b = detect.backproject(
            convert(img.astype(np.float64) / 255.0 * 2.0, space), h
        )
        np.testing.assert_array_equal(a, b)


# ------------------------------------------------------------------ binarize


def test_binarize_all_and_none():
    ones = np.ones((3, 3))
    zeros = np.zeros((3, 3))
    assert detect.binarize(ones, 0.5).all()
    assert not detect.binarize(zeros, 0.5).any()


def test_binarize_threshold_inclusive():
    m = np.array([[0.2, 0.6]])
    np.testing.assert_array_equal(detect.binarize(m, 0.5), [[False, True]])
    np.testing.assert_array_equal(detect.binarize(m, 0.6), [[False, True]])


# -------------------------------------------------------------------- score


def test_score_perfect():
    truth = np.full((4, 4), 255, dtype=np.uint8)
    truth[1:3, 1:3] = 5
    s = detect.score(truth == 5, truth, 5)
    assert (s.recall, s.precision, s.fmeasure) == (1.0, 1.0, 1.0)


def test_score_empty_mask_zero_convention():
    truth = np.zeros((3, 3), dtype=np.uint8)
    s = detect.score(np.zeros((3, 3), dtype=bool), truth, 0)
    assert (s.recall, s.precision, s.fmeasure) == (0.0, 0.0, 0.0)


def test_score_3x3_worked_example():
    # class 0 occupies 4 pixels; mask hits 2 of them plus 1 background pixel
    truth = np.full((3, 3), 255, dtype=np.uint8)
    truth[0, 0] = truth[0, 1] = truth[1, 0] = truth[1, 1] = 0
    mask = np.zeros((3, 3), dtype=bool)
    mask[0, 0] = mask[0, 1] = True
    mask[2, 2] = True
    s = detect.score(mask, truth, 0)
    assert (s.true_pos, s.false_pos, s.false_neg) == (2, 1, 2)
    assert s.recall == 0.5
    assert s.precision == pytest.approx(2 / 3)
    assert s.fmeasure == pytest.approx(4 / 7)


def brute_force_score(mask, truth, cls):
    tp = fp = fn = 0
    for i in range(mask.shape[0]):
        for j in range(mask.shape[1]):
            is_cls = truth[i, j] == cls
            if mask[i, j] and is_cls:
                tp += 1
            elif mask[i, j] and not is_cls:
                fp += 1
            elif not mask[i, j] and is_cls:
                fn += 1
    return tp, fp, fn


def test_score_matches_brute_force_fuzz():
    rng = np.random.default_rng(2)
    for _ in range(50):
        mask = rng.random((16, 16)) < 0.4
        truth = rng.integers(0, 13, size=(16, 16)).astype(np.uint8)
        truth[truth == 12] = 255
        cls = int(rng.integers(0, 12))
        s = detect.score(mask, truth, cls)
        assert (s.true_pos, s.false_pos, s.false_neg) == brute_force_score(
            mask, truth, cls
        )
        if s.recall + s.precision > 0:
            assert s.fmeasure == pytest.approx(
                2 * s.recall * s.precision / (s.recall + s.precision)
            )


def test_score_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        detect.score(np.zeros((2, 2), bool), np.zeros((3, 3), np.uint8), 0)


def test_lower_tau_monotone():
    rng = np.random.default_rng(3)
    tpl = detect.Template(rng.integers(0, 256, size=(10, 10, 3)).astype(np.uint8), 0)
    h = detect.build_histogram(tpl, "RGB", 16)
    img = rng.integers(0, 256, size=(16, 16, 3)).astype(np.uint8)
    truth = rng.integers(0, 2, size=(16, 16)).astype(np.uint8)
    bp = detect.backproject(convert(img, "RGB"), h)
    prev_recall, prev_fp = None, None
    for tau in (0.9, 0.5, 0.1, 0.0):
        s = detect.score(detect.binarize(bp, tau), truth, 0)
        if prev_recall is not None:
            assert s.recall >= prev_recall
            assert s.false_pos >= prev_fp
        prev_recall, prev_fp = s.recall, s.false_pos


# ---------------------------------------------------------------- averaging


def test_mean_score_arithmetic():
    scores = [
        detect.DetectionScore(r, 0.5, 0.5, 1, 1, 1) for r in (0.2, 0.4, 0.6, 0.8)
    ]
    avg = detect.mean_score(scores)
    assert avg.recall == pytest.approx(0.5)
    assert avg.precision == pytest.approx(0.5)


def test_mean_score_identical_is_identity():
    s = detect.DetectionScore(0.7, 0.6, 0.646, 7, 4, 3)
    avg = detect.mean_score([s] * 4)
    assert avg.recall == pytest.approx(s.recall)
    assert avg.fmeasure == pytest.approx(s.fmeasure)


def test_score_averaged_solid_scene_is_perfect():
    img = solid((0, 255, 128), 8, 8)
    truth = np.full((8, 8), 7, dtype=np.uint8)
    tpl = detect.Template(solid((0, 255, 128)), 7)
    s = detect.score_averaged(img, truth, tpl, "RGB", 0.5)
    assert (s.recall, s.precision, s.fmeasure) == (1.0, 1.0, 1.0)
