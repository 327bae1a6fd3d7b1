"""Prototype initialization for unsupervised segmentation.

Colors are clustered by Lloyd k-means (squared Euclidean), signatures by
alternating k-medians in the l1 metric, whose cluster centroid is the
component-wise median. Seeding is deterministic farthest-point sampling
from a seeded RNG so repeated runs are bitwise identical.
"""

from __future__ import annotations

import numpy as np


def _farthest_point_seed(points, k, rng, dist_fn):
    centers = [int(rng.integers(len(points)))]
    d = dist_fn(points, points[centers[0]])
    for _ in range(1, k):
        nxt = int(np.argmax(d))
        centers.append(nxt)
        d = np.minimum(d, dist_fn(points, points[nxt]))
    return points[np.array(centers)].copy()


def _sq_dist(points, center):
    diff = points - center[None, :]
    return np.einsum("ij,ij->i", diff, diff)


def _l1_dist(points, center):
    return np.abs(points - center[None, :]).sum(axis=1)


def _lloyd(points, k, seed, dist_fn, update_fn, max_iter):
    if k < 1:
        raise ValueError(f"cluster count must be >= 1, got {k}")
    if len(points) < k:
        raise ValueError(f"{len(points)} points cannot fill {k} clusters")
    points = np.asarray(points, dtype=np.float64)
    rng = np.random.default_rng(seed)
    centers = _farthest_point_seed(points, k, rng, dist_fn)
    assign = np.full(len(points), -1)
    history = []
    for _ in range(max_iter):
        dists = np.stack([dist_fn(points, c) for c in centers])
        new_assign = np.argmin(dists, axis=0)
        history.append(float(np.take_along_axis(dists, new_assign[None], axis=0).sum()))
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        nearest = np.take_along_axis(dists, assign[None], axis=0)[0]
        for c in range(k):
            members = points[assign == c]
            if len(members) == 0:
                # re-seed a starved cluster at the worst-served point
                centers[c] = points[int(np.argmax(nearest))]
            else:
                centers[c] = update_fn(members)
    return centers, assign, history


def kmeans_colors(pixels, k_c, seed=0, max_iter=100):
    """Color centroids + assignments; objective is the summed squared distance.

    Returns (centroids (k_c, d), assignments (m,), history) where history
    holds the objective after every assignment step (non-increasing).
    """
    return _lloyd(pixels, k_c, seed, _sq_dist, lambda mem: mem.mean(axis=0), max_iter)


def kmedians_signatures(signatures, k_t, seed=0, max_iter=100):
    """Texture representatives + assignments under the l1 metric.

    The update step is the component-wise median, the l1-optimal centroid
    of the members; history holds the summed l1 objective per assignment
    step.
    """
    return _lloyd(signatures, k_t, seed, _l1_dist, lambda mem: np.median(mem, axis=0), max_iter)


def stride_subsample(count, cap):
    """Deterministic index subset of size <= cap covering the range evenly."""
    if cap is None or count <= cap:
        return np.arange(count)
    stride = int(np.ceil(count / cap))
    return np.arange(0, count, stride)
