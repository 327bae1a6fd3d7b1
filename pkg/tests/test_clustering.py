import numpy as np
import pytest

from texseg.clustering import kmeans_colors, kmedians_signatures, stride_subsample


def blob_instance(rng, centers, spread, per=40):
    pts = np.concatenate([c + rng.normal(0, spread, (per, len(c))) for c in centers])
    return pts


class TestKmeansColors:
    def test_two_blobs_recover_means(self):
        rng = np.random.default_rng(0)
        pts = blob_instance(rng, [np.array([0.1, 0.1, 0.1]), np.array([0.9, 0.9, 0.9])], 0.01)
        cents, assign, _ = kmeans_colors(pts, 2, seed=1)
        means = np.stack([pts[:40].mean(axis=0), pts[40:].mean(axis=0)])
        # order-free comparison
        d = np.abs(cents[:, None, :] - means[None, :, :]).sum(-1)
        assert d.min(axis=1).max() < 1e-6
        assert len(np.unique(assign)) == 2

    def test_single_cluster_is_global_mean(self):
        rng = np.random.default_rng(1)
        pts = rng.uniform(0, 1, (50, 3))
        cents, assign, _ = kmeans_colors(pts, 1, seed=0)
        assert np.abs(cents[0] - pts.mean(axis=0)).max() < 1e-12
        assert (assign == 0).all()

    def test_seed_reproducibility_bitwise(self):
        rng = np.random.default_rng(2)
        pts = rng.uniform(0, 1, (120, 3))
        a = kmeans_colors(pts, 4, seed=7)
        b = kmeans_colors(pts, 4, seed=7)
        assert np.array_equal(a[0], b[0])
        assert np.array_equal(a[1], b[1])

    def test_objective_non_increasing(self):
        rng = np.random.default_rng(3)
        for trial in range(5):
            pts = rng.uniform(0, 1, (200, 3))
            _, _, hist = kmeans_colors(pts, 5, seed=trial)
            assert all(b <= a + 1e-9 for a, b in zip(hist, hist[1:]))

    def test_too_many_clusters_rejected(self):
        with pytest.raises(ValueError):
            kmeans_colors(np.zeros((3, 2)), 4, seed=0)


class TestKmediansSignatures:
    def test_two_groups_recover_medians(self):
        rng = np.random.default_rng(4)
        lo = rng.uniform(0.0, 0.2, (30, 6))
        hi = rng.uniform(0.8, 1.0, (30, 6))
        sigs = np.concatenate([lo, hi])
        reps, assign, _ = kmedians_signatures(sigs, 2, seed=0)
        meds = np.stack([np.median(lo, axis=0), np.median(hi, axis=0)])
        d = np.abs(reps[:, None, :] - meds[None, :, :]).sum(-1)
        assert d.min(axis=1).max() < 1e-9

    def test_single_cluster_is_global_median(self):
        rng = np.random.default_rng(5)
        sigs = rng.uniform(0, 1, (41, 8))
        reps, _, _ = kmedians_signatures(sigs, 1, seed=0)
        assert np.abs(reps[0] - np.median(sigs, axis=0)).max() < 1e-12

    def test_objective_non_increasing(self):
        rng = np.random.default_rng(6)
        for trial in range(5):
            sigs = rng.uniform(0, 1, (150, 10))
            _, _, hist = kmedians_signatures(sigs, 4, seed=trial)
            assert all(b <= a + 1e-9 for a, b in zip(hist, hist[1:]))

    def test_seed_reproducibility_bitwise(self):
        rng = np.random.default_rng(7)
        sigs = rng.uniform(0, 1, (90, 12))
        a = kmedians_signatures(sigs, 3, seed=11)
        b = kmedians_signatures(sigs, 3, seed=11)
        assert np.array_equal(a[0], b[0])
        assert np.array_equal(a[1], b[1])


def test_stride_subsample_properties():
    assert np.array_equal(stride_subsample(10, None), np.arange(10))
    assert np.array_equal(stride_subsample(10, 20), np.arange(10))
    idx = stride_subsample(100000, 1000)
    assert len(idx) <= 1000
    assert idx[0] == 0 and idx[-1] > 98000
