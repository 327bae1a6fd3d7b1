import numpy as np
import pytest

from texseg import texture
from texseg.texture import (
    extract_patch,
    gaussian_mask,
    signature_field,
    smooth_cosupport,
    textural_representative,
    tsm,
)


class TestExtractPatch:
    def test_constant_window_is_flat(self):
        assert extract_patch(np.full((7, 7), 50.0), (3, 3), 3) is None

    def test_textured_window_normalized(self):
        rng = np.random.default_rng(0)
        gray = rng.uniform(0, 1, (11, 11))
        p = extract_patch(gray, (5, 5), 5, mask_std=1.25)
        assert abs(p.sum()) < 1e-9
        assert abs(np.linalg.norm(p) - 1.0) < 1e-9

    def test_vertical_step_hand_values(self):
        # [[0,0,0],[1,1,1],[0,0,0]] with uniform mask: subtract mean 1/3,
        # then scale by 1/sqrt(2)
        gray = np.array([[0.0, 0, 0], [1, 1, 1], [0, 0, 0]])
        p = extract_patch(gray, (1, 1), 3, mask_std=None)
        lo = -1.0 / (3.0 * np.sqrt(2.0))
        hi = 2.0 / (3.0 * np.sqrt(2.0))
        expected = np.array([lo] * 3 + [hi] * 3 + [lo] * 3)
        assert np.abs(p - expected).max() < 1e-12

    def test_even_side_rejected(self):
        with pytest.raises(ValueError):
            extract_patch(np.zeros((8, 8)), (4, 4), 4)

    def test_center_outside_rejected(self):
        with pytest.raises(ValueError):
            extract_patch(np.zeros((8, 8)), (8, 0), 3)

    def test_bias_gain_invariance(self):
        rng = np.random.default_rng(1)
        gray = rng.uniform(0, 1, (9, 9))
        base = extract_patch(gray, (4, 4), 5, mask_std=1.0)
        for alpha, beta in [(2.0, 0.1), (0.5, -3.0), (7.3, 40.0)]:
            shifted = extract_patch(alpha * gray + beta, (4, 4), 5, mask_std=1.0)
            assert np.abs(shifted - base).max() < 1e-9

    def test_border_mirrors(self):
        gray = np.arange(25, dtype=float).reshape(5, 5)
        p = extract_patch(gray, (0, 0), 3, mask_std=None)
        padded = np.pad(gray, 1, mode="reflect")
        window = padded[0:3, 0:3].ravel()
        v = window - window.mean()
        assert np.abs(p - v / np.linalg.norm(v)).max() < 1e-12


class TestSmoothCosupport:
    def test_zero_vector_all_ones(self):
        assert np.array_equal(smooth_cosupport(np.zeros(6), 0.01), np.ones(6))

    def test_analytic_value(self):
        sigma = 0.25
        out = smooth_cosupport(np.array([np.sqrt(sigma)]), sigma)
        assert abs(out[0] - np.exp(-1.0)) < 1e-12

    def test_hard_indicator_limit(self):
        a = np.array([0.0, 0.3, -0.5, 1e-9])
        out = smooth_cosupport(a, 1e-12)
        assert np.array_equal(out > 0.5, np.abs(a) < 1e-6)

    def test_range(self):
        # responses of unit-norm patches under unit-norm rows stay in [-1, 1]
        rng = np.random.default_rng(3)
        out = smooth_cosupport(rng.uniform(-1, 1, size=100), 0.01)
        assert (out > 0).all() and (out <= 1).all()

    def test_bad_sigma(self):
        with pytest.raises(ValueError):
            smooth_cosupport(np.zeros(3), 0.0)


class TestTsm:
    def test_identity_zero(self):
        rng = np.random.default_rng(4)
        x = rng.uniform(0, 1, 20)
        assert tsm(x, x) == 0.0

    def test_maximal_separation(self):
        k = 33
        assert abs(tsm(np.ones(k), np.zeros(k)) - k) < 1e-12

    def test_pseudometric_on_random_triples(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            a, b, c = rng.integers(0, 2**20, size=(3, 16)) / 2.0**20
            assert tsm(a, b) == tsm(b, a)
            assert tsm(a, c) <= tsm(a, b) + tsm(b, c)

    def test_hard_cosupport_agreement(self, op_small):
        # analyzed vectors snapped so every entry is either 0 or >= 5e-4;
        # at sigma=1e-8 the smooth indicator is then exactly the hard one
        rng = np.random.default_rng(6)
        for _ in range(25):
            s1, s2 = rng.normal(size=(2, 9))
            a1, a2 = op_small.analyze(s1), op_small.analyze(s2)
            a1[np.abs(a1) < 5e-4] = 0.0
            a2[np.abs(a2) < 5e-4] = 0.0
            hamming = np.sum((np.abs(a1) < 1e-6) != (np.abs(a2) < 1e-6))
            smooth = tsm(smooth_cosupport(a1, 1e-8), smooth_cosupport(a2, 1e-8))
            assert abs(smooth - hamming) < 1e-6

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            tsm(np.ones(3), np.ones(4))


class TestRepresentative:
    def test_majority_example(self):
        sigs = [np.array([1.0, 0.0]), np.array([1.0, 1.0]), np.array([0.0, 0.0])]
        assert np.array_equal(textural_representative(sigs), np.array([1.0, 0.0]))

    def test_single_signature_identity(self):
        s = np.array([0.2, 0.9, 0.4])
        assert np.array_equal(textural_representative([s]), s)

    def test_even_count_midpoint(self):
        sigs = [np.array([0.0]), np.array([1.0])]
        assert textural_representative(sigs)[0] == 0.5

    def test_median_minimizes_l1_cost_vs_grid(self):
        rng = np.random.default_rng(7)
        sigs = rng.uniform(0, 1, (5, 8))
        rep = textural_representative(sigs)
        grid = np.linspace(0.0, 1.0, 2001)
        for j in range(sigs.shape[1]):
            costs = np.abs(grid[:, None] - sigs[None, :, j]).sum(axis=1)
            assert np.abs(rep[j] - sigs[:, j]).sum() <= costs.min() + 1e-12

    def test_component_within_member_hull(self):
        rng = np.random.default_rng(8)
        sigs = rng.uniform(0, 1, (6, 12))
        rep = textural_representative(sigs)
        assert (rep >= sigs.min(axis=0) - 1e-15).all()
        assert (rep <= sigs.max(axis=0) + 1e-15).all()

    def test_representative_cost_not_above_members(self):
        rng = np.random.default_rng(9)
        sigs = rng.uniform(0, 1, (7, 10))
        rep = textural_representative(sigs)
        rep_cost = np.abs(sigs - rep).sum()
        member_costs = [np.abs(sigs - m).sum() for m in sigs]
        assert rep_cost <= min(member_costs) + 1e-12

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            textural_representative([])


class TestSignatureField:
    def test_matches_per_pixel_path(self, op_small):
        rng = np.random.default_rng(10)
        gray = rng.uniform(0, 1, (9, 7))
        sig, flat = signature_field(gray, op_small, 3, mask_std=0.75, sigma=0.01)
        assert not flat.any()
        for r in range(9):
            for c in range(7):
                p = extract_patch(gray, (r, c), 3, mask_std=0.75)
                ref = smooth_cosupport(op_small.analyze(p), 0.01)
                assert np.abs(sig[r, c].astype(np.float64) - ref).max() < 1e-6

    def test_flat_pixels_all_ones(self, op_small):
        gray = np.full((8, 8), 0.5)
        gray[0, 0] = 0.9
        sig, flat = signature_field(gray, op_small, 3)
        assert flat[5, 5]
        assert np.array_equal(sig[5, 5], np.ones(op_small.rows, dtype=np.float32))
        assert not flat[0, 0]

    def test_uniform_mask_from_none_std(self):
        assert np.array_equal(gaussian_mask(5, None), np.ones(25))
        assert np.array_equal(gaussian_mask(5, np.inf), np.ones(25))


def test_rec601_gray_weights():
    img = np.zeros((2, 2, 3))
    img[0, 0] = [1.0, 0.0, 0.0]
    img[0, 1] = [0.0, 1.0, 0.0]
    img[1, 0] = [0.0, 0.0, 1.0]
    gray = texture.rec601_gray(img)
    assert abs(gray[0, 0] - 0.299) < 1e-12
    assert abs(gray[0, 1] - 0.587) < 1e-12
    assert abs(gray[1, 0] - 0.114) < 1e-12
