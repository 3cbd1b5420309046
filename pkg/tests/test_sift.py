import math

import numpy as np
import pytest

from chplane.errors import ImageTooSmall
from chplane.sift import (
    DescriptorSet,
    Keypoint,
    detect_and_describe,
    jaccard_detail,
    jaccard_similarity,
    load_descriptors,
    match_descriptors,
    save_descriptors,
)
from chplane.synthetic import textured_image

from oracles import oracle_match


def random_set(rng, k):
    descs = rng.random((k, 128)).astype(np.float32)
    descs /= np.linalg.norm(descs, axis=1, keepdims=True)
    kps = [Keypoint(float(i), float(i), 1.0, 0.0) for i in range(k)]
    return DescriptorSet(kps, descs)


# ---------------------------------------------------------------------------
# detection
# ---------------------------------------------------------------------------

def test_uniform_image_has_no_keypoints():
    ds = detect_and_describe(np.full((64, 64), 128.0))
    assert len(ds) == 0
    assert ds.descriptors.shape == (0, 128)


def test_too_small_raises():
    with pytest.raises(ImageTooSmall):
        detect_and_describe(np.zeros((15, 30)))


def test_detection_is_deterministic(texture_bank):
    a = detect_and_describe(texture_bank[0])
    b = detect_and_describe(texture_bank[0].copy())
    assert a.keypoints == b.keypoints
    assert np.array_equal(a.descriptors, b.descriptors)


def test_descriptor_invariants(texture_bank):
    ds = detect_and_describe(texture_bank[1])
    assert len(ds) >= 10
    assert np.all(ds.descriptors >= 0.0)
    norms = np.linalg.norm(ds.descriptors.astype(np.float64), axis=1)
    assert np.all(np.abs(norms - 1.0) < 1e-6)
    for kp in ds.keypoints:
        assert 0 <= kp.x <= texture_bank[1].shape[1] - 1
        assert 0 <= kp.y <= texture_bank[1].shape[0] - 1
        assert kp.scale > 0
        assert 0 <= kp.orientation < 2 * math.pi


# ---------------------------------------------------------------------------
# matching
# ---------------------------------------------------------------------------

def test_self_match_full(rng):
    ds = random_set(rng, 12)
    matches = match_descriptors(ds, ds, ratio=0.6)
    assert len(matches) == 12
    assert all(ia == ib for ia, ib, _ in matches.pairs)


def test_empty_side_matches_nothing(rng):
    empty = DescriptorSet([], np.zeros((0, 128), dtype=np.float32))
    ds = random_set(rng, 5)
    assert len(match_descriptors(ds, empty)) == 0
    assert len(match_descriptors(empty, ds)) == 0


def test_matcher_equals_oracle(rng):
    for trial in range(25):
        ka = int(rng.integers(1, 21))
        kb = int(rng.integers(1, 21))
        a = random_set(rng, ka)
        b = random_set(rng, kb)
        ratio = float(rng.uniform(0.5, 1.0))
        got = match_descriptors(a, b, ratio=ratio)
        expected = oracle_match(a.descriptors.astype(np.float64), b.descriptors.astype(np.float64), ratio)
        assert [(ia, ib) for ia, ib, _ in got.pairs] == [(ia, ib) for ia, ib, _ in expected]
        for (_, _, d_got), (_, _, d_exp) in zip(got.pairs, expected):
            assert d_got == pytest.approx(d_exp, abs=1e-9)


def test_match_count_bounded(rng):
    a = random_set(rng, 15)
    b = random_set(rng, 7)
    matches = match_descriptors(a, b, ratio=1.0)
    assert len(matches) <= 7


def test_kdtree_mode_recall(rng):
    a = random_set(rng, 200)
    b = random_set(rng, 300)
    exact = {(ia, ib) for ia, ib, _ in match_descriptors(a, b, ratio=0.9, exact=True).pairs}
    approx = {(ia, ib) for ia, ib, _ in match_descriptors(a, b, ratio=0.9, exact=False).pairs}
    if exact:
        recall = len(exact & approx) / len(exact)
        assert recall >= 0.95


# ---------------------------------------------------------------------------
# Jaccard similarity
# ---------------------------------------------------------------------------

def test_jaccard_identical_images(texture_bank):
    ds = detect_and_describe(texture_bank[0])
    assert len(ds) >= 10
    assert jaccard_similarity(ds, ds) == 1.0


def test_jaccard_empty_sets_flagged():
    empty = DescriptorSet([], np.zeros((0, 128), dtype=np.float32))
    detail = jaccard_detail(empty, empty)
    assert detail.value == 0.0
    assert detail.no_keypoints


def test_jaccard_zero_matches(rng):
    a = random_set(rng, 6)
    b = random_set(rng, 6)
    # random unit descriptors are near-equidistant: ratio test rejects all
    detail = jaccard_detail(a, b, ratio=0.5)
    assert detail.matches == 0
    assert detail.value == 0.0


def test_jaccard_symmetric(rng, texture_bank):
    a = detect_and_describe(texture_bank[0])
    b = detect_and_describe(texture_bank[2])
    assert jaccard_similarity(a, b) == jaccard_similarity(b, a)
    # equal-size random sets exercise the lexicographic tiebreak
    c = random_set(rng, 9)
    d = random_set(rng, 9)
    assert jaccard_similarity(c, d, ratio=0.95) == jaccard_similarity(d, c, ratio=0.95)


def test_jaccard_in_unit_interval(rng):
    for _ in range(10):
        a = random_set(rng, int(rng.integers(1, 12)))
        b = random_set(rng, int(rng.integers(1, 12)))
        v = jaccard_similarity(a, b, ratio=0.9)
        assert 0.0 <= v <= 1.0


def test_jaccard_additive_union(rng):
    a = random_set(rng, 8)
    detail = jaccard_detail(a, a, ratio=0.6, union="additive")
    assert detail.matches == 8
    assert detail.value == pytest.approx(8 / 16)


def test_rotation_invariance(texture_bank):
    img = texture_bank[0]
    ds = detect_and_describe(img)
    ds_rot = detect_and_describe(np.rot90(img))
    assert jaccard_similarity(ds, ds_rot) >= 0.7


def test_brightness_shift_invariance():
    img = textured_image(321, size=140, kind="smooth")
    scaled = np.clip(img, 10, 245)  # headroom so the shift cannot clip
    a = detect_and_describe(scaled)
    b = detect_and_describe(scaled + 10.0)
    assert jaccard_similarity(a, b) >= 0.9


def test_noise_images_dissimilar():
    a = detect_and_describe(textured_image(11, size=128, kind="noise"))
    b = detect_and_describe(textured_image(12, size=128, kind="noise"))
    assert jaccard_similarity(a, b) < 0.05


# ---------------------------------------------------------------------------
# cache format
# ---------------------------------------------------------------------------

def test_cache_round_trip(tmp_path, texture_bank):
    ds = detect_and_describe(texture_bank[1])
    path = tmp_path / "img.sft"
    save_descriptors(path, ds)
    back = load_descriptors(path)
    assert np.array_equal(back.descriptors, ds.descriptors)
    got = np.array([[k.x, k.y, k.scale, k.orientation] for k in back.keypoints], dtype=np.float32)
    expected = np.array([[k.x, k.y, k.scale, k.orientation] for k in ds.keypoints], dtype=np.float32)
    assert np.array_equal(got, expected)


def test_cache_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.sft"
    path.write_bytes(b"NOPE" + b"\x00" * 16)
    with pytest.raises(ValueError):
        load_descriptors(path)


def test_cache_empty_set(tmp_path):
    empty = DescriptorSet([], np.zeros((0, 128), dtype=np.float32))
    path = tmp_path / "empty.sft"
    save_descriptors(path, empty)
    assert len(load_descriptors(path)) == 0
