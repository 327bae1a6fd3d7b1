"""Patch extraction and co-support texture descriptors.

A patch is a Gaussian-weighted gray window, centered on a pixel, reduced
to zero mean and unit norm so that the descriptor is invariant to bias and
gain changes of the image. Its texture signature is the component-wise
soft indicator exp(-a_j^2 / sigma) of the analyzed vector a = O s; the
near-one entries mark operator rows the patch is (almost) orthogonal to.
Textural similarity is the l1 distance between signatures.
"""

from __future__ import annotations

import numpy as np

# masked, mean-removed windows with variance below this carry no texture
FLAT_VARIANCE = 1e-12


def gaussian_mask(side, std=None):
    """Centered 2-D Gaussian weight mask flattened to (side*side,).

    std is in pixels; None (or inf) gives the uniform mask.
    """
    if std is None or not np.isfinite(std):
        return np.ones(side * side)
    if std <= 0:
        raise ValueError(f"mask std must be positive, got {std}")
    r = np.arange(side) - side // 2
    d2 = r[:, None] ** 2 + r[None, :] ** 2
    return np.exp(-d2 / (2.0 * std * std)).ravel()


def _normalize_windows(windows, mask):
    """Weighted-mean removal, masking and unit-norm scaling for (m, N) windows.

    Subtracting the mask-weighted mean before masking keeps the result
    invariant under gray bias (I + b) and keeps the plain sum of the
    output exactly zero. Returns (patches, flat) where flat marks windows
    whose masked deviations have variance below FLAT_VARIANCE; flat rows
    are left as zero vectors.
    """
    w = np.asarray(windows, dtype=np.float64)
    wmean = (w @ mask) / mask.sum()
    v = (w - wmean[:, None]) * mask
    sq = np.einsum("ij,ij->i", v, v)
    flat = sq < FLAT_VARIANCE * w.shape[1]
    norm = np.sqrt(np.where(flat, 1.0, sq))
    return v / norm[:, None], flat


def extract_patch(gray, center, side, mask_std=None):
    """Normalized patch at `center` = (row, col), or None for a flat window.

    The window is mirror-padded at image borders. Raises ValueError for an
    even side or a center outside the image.
    """
    gray = np.asarray(gray, dtype=np.float64)
    if side % 2 == 0 or side < 3:
        raise ValueError(f"patch side must be odd and >= 3, got {side}")
    r, c = int(center[0]), int(center[1])
    h, wdt = gray.shape
    if not (0 <= r < h and 0 <= c < wdt):
        raise ValueError(f"center {center} outside image of shape {gray.shape}")
    half = side // 2
    rows = _reflect_indices(np.arange(r - half, r + half + 1), h)
    cols = _reflect_indices(np.arange(c - half, c + half + 1), wdt)
    window = gray[np.ix_(rows, cols)].ravel()
    patches, flat = _normalize_windows(window[None, :], gaussian_mask(side, mask_std))
    return None if flat[0] else patches[0]


def _reflect_indices(idx, size):
    # mirror about the border pixel without duplicating it (matches
    # np.pad mode="reflect"); valid while |overhang| < size
    idx = np.where(idx < 0, -idx, idx)
    return np.where(idx >= size, 2 * size - 2 - idx, idx)


def smooth_cosupport(a, sigma):
    """Soft co-support indicator exp(-a_j^2 / sigma), component-wise in (0, 1]."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    a = np.asarray(a, dtype=np.float64)
    if not np.isfinite(a).all():
        raise ValueError("analyzed vector has non-finite entries")
    return np.exp(-(a * a) / sigma)


def tsm(s1, s2):
    """Textural similarity: l1 distance of two signatures (a pseudometric)."""
    s1 = np.asarray(s1, dtype=np.float64)
    s2 = np.asarray(s2, dtype=np.float64)
    if s1.shape != s2.shape:
        raise ValueError(f"signature shapes differ: {s1.shape} vs {s2.shape}")
    return float(np.abs(s1 - s2).sum())


def textural_representative(signatures):
    """Component-wise median of a non-empty set of signatures.

    The median minimizes the summed l1 distance to the members; for an
    even count the midpoint of the two middle values is used, which stays
    inside the members' component-wise hull.
    """
    sigs = np.asarray(signatures, dtype=np.float64)
    if sigs.ndim != 2 or sigs.shape[0] == 0:
        raise ValueError("need a non-empty list of equal-length signatures")
    return np.median(sigs, axis=0)


def signature_field(gray, op, side, mask_std=None, sigma=0.01, chunk=8192):
    """Per-pixel signatures for a whole gray image.

    Returns (signatures, flat): signatures is (H, W, k) float32, flat is a
    (H, W) bool mask of windows without textural evidence. Flat pixels get
    the all-ones signature (the response of the zero patch). Matches
    extract_patch + smooth_cosupport per pixel.
    """
    gray = np.asarray(gray, dtype=np.float64)
    if side % 2 == 0 or side < 3:
        raise ValueError(f"patch side must be odd and >= 3, got {side}")
    h, wdt = gray.shape
    half = side // 2
    if min(h, wdt) <= half:
        raise ValueError(f"image {gray.shape} too small for side {side}")
    mask = gaussian_mask(side, mask_std)
    padded = np.pad(gray, half, mode="reflect")
    windows = np.lib.stride_tricks.sliding_window_view(padded, (side, side))
    windows = windows.reshape(h * wdt, side * side)

    out = np.empty((h * wdt, op.rows), dtype=np.float32)
    flat = np.empty(h * wdt, dtype=bool)
    for lo in range(0, h * wdt, chunk):
        hi = min(lo + chunk, h * wdt)
        patches, fl = _normalize_windows(windows[lo:hi], mask)
        a = op.analyze_many(patches)
        out[lo:hi] = np.exp(-(a * a) / sigma)
        out[lo:hi][fl] = 1.0
        flat[lo:hi] = fl
    return out.reshape(h, wdt, op.rows), flat.reshape(h, wdt)


def rec601_gray(image):
    """Luma of an (H, W, d) image in [0, 1]; d=1 or gray input passes through."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim == 2:
        return img
    if img.shape[2] == 1:
        return img[:, :, 0]
    if img.shape[2] < 3:
        raise ValueError(f"unsupported channel count {img.shape[2]}")
    return img[:, :, 0] * 0.299 + img[:, :, 1] * 0.587 + img[:, :, 2] * 0.114
