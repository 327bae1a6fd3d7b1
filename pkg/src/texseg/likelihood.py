"""Per-pixel, per-class negative log-likelihood fields.

Supervised: each class likelihood is the product of a spatially adaptive
Parzen color density over its scribble samples and a texture posterior
built from the class signature medians, with the softness of both tied to
the distance from the nearest scribble of that class.

Unsupervised: no location evidence exists, so color and texture enter
through softmin posteriors over the cluster prototypes with constant
temperatures, one class per (color cluster, texture cluster) pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import distance_transform_edt

from texseg.texture import textural_representative

# color likelihood floor before the log, keeps the data term finite in
# colors no scribble ever produced
LIKELIHOOD_FLOOR = 1e-12


class ScribbleConfigError(ValueError):
    """Scribble labels missing or not contiguous from 1."""


@dataclass(frozen=True)
class ScribbleSet:
    """Samples of one class: locations (m, 2) as (row, col), colors (m, d),
    signatures (m, k), and a flat mask for samples without texture."""

    label: int
    locations: np.ndarray
    colors: np.ndarray
    signatures: np.ndarray
    flat: np.ndarray

    def __post_init__(self):
        if len(self.locations) == 0:
            raise ScribbleConfigError(f"label {self.label} has no scribble samples")

    @property
    def count(self):
        return len(self.locations)

    def representative(self):
        """Signature median over non-flat samples; all-ones if all are flat."""
        good = self.signatures[~self.flat]
        if len(good) == 0:
            return np.ones(self.signatures.shape[1])
        return textural_representative(good)


def build_scribble_sets(scribble_mask, image, signatures, flat, max_samples=None):
    """Collect per-label samples from an indexed scribble mask (0 = unlabeled).

    Labels present must be exactly {1..n}; otherwise a ScribbleConfigError
    lists what is missing. max_samples caps each label by deterministic
    stride subsampling.
    """
    mask = np.asarray(scribble_mask)
    labels = np.unique(mask[mask > 0])
    if labels.size == 0:
        raise ScribbleConfigError("no scribbles present")
    n = int(labels.max())
    missing = sorted(set(range(1, n + 1)) - set(int(v) for v in labels))
    if missing:
        raise ScribbleConfigError(f"scribble labels must be contiguous from 1; missing {missing}")
    sets = []
    sig2d = signatures.reshape(-1, signatures.shape[-1])
    img2d = np.asarray(image, dtype=np.float64).reshape(-1, image.shape[-1])
    flat1d = flat.ravel()
    width = mask.shape[1]
    for i in range(1, n + 1):
        idx = np.flatnonzero(mask.ravel() == i)
        if max_samples is not None and idx.size > max_samples:
            stride = int(np.ceil(idx.size / max_samples))
            idx = idx[::stride]
        locs = np.stack([idx // width, idx % width], axis=1)
        sets.append(
            ScribbleSet(
                label=i,
                locations=locs,
                colors=img2d[idx],
                signatures=sig2d[idx].astype(np.float64),
                flat=flat1d[idx],
            )
        )
    return sets


def scribble_distance_fields(scribbles, shape, alpha=1.3, rho_floor=1.0):
    """Spatial kernel widths rho_i(x) = max(rho_floor, alpha * d_i(x)).

    d_i is the exact Euclidean distance to the nearest scribble pixel of
    class i. rho_floor keeps the kernel defined on the scribbles
    themselves.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    rho = np.empty((len(scribbles), *shape))
    for j, s in enumerate(scribbles):
        occupied = np.zeros(shape, dtype=bool)
        occupied[s.locations[:, 0], s.locations[:, 1]] = True
        dist = distance_transform_edt(~occupied)
        rho[j] = np.maximum(rho_floor, alpha * dist)
    return rho


def color_likelihood(x, color, scrib, alpha=1.3, sigma_color=1.3 / 255.0, rho_floor=1.0):
    """Parzen color-and-location density of one class at a single pixel.

    Mean over samples j of a 2-D spatial Gaussian of std rho(x) at x - x_j
    times a d-dim color Gaussian of std sigma_color at color - c_j; both
    kernels are normalized densities.
    """
    if scrib.count < 1:
        raise ScribbleConfigError(f"label {scrib.label} has no scribble samples")
    if alpha <= 0 or sigma_color <= 0:
        raise ValueError("alpha and sigma_color must be positive")
    x = np.asarray(x, dtype=np.float64)
    color = np.atleast_1d(np.asarray(color, dtype=np.float64))
    d = color.shape[0]
    dx = x[None, :] - scrib.locations.astype(np.float64)
    ds = np.einsum("ij,ij->i", dx, dx)
    rho = max(rho_floor, alpha * np.sqrt(ds.min()))
    dc = color[None, :] - scrib.colors
    dcs = np.einsum("ij,ij->i", dc, dc)
    spatial = np.exp(-ds / (2.0 * rho * rho)) / (2.0 * np.pi * rho * rho)
    chroma = np.exp(-dcs / (2.0 * sigma_color**2)) * (2.0 * np.pi * sigma_color**2) ** (-d / 2.0)
    return float(np.mean(spatial * chroma))


def _pairwise_sq(a, b):
    """Squared Euclidean distances (len(a), len(b)) via the inner-product
    expansion; one BLAS call instead of a 3-D temporary."""
    sq = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :]
    sq -= 2.0 * (a @ b.T)
    return np.maximum(sq, 0.0, out=sq)


def color_likelihood_field(image, scribbles, rho, sigma_color=1.3 / 255.0, chunk=4096):
    """Vectorized Parzen color likelihood (n, H, W) for all classes.

    rho is the (n, H, W) spatial width field from scribble_distance_fields;
    values are unclamped densities. Heavy lifting happens in two reused
    (chunk, samples) buffers per class, with distances expanded through
    BLAS inner products.
    """
    if sigma_color <= 0:
        raise ValueError(f"sigma_color must be positive, got {sigma_color}")
    img = np.asarray(image, dtype=np.float64)
    h, w, d = img.shape
    pix = img.reshape(-1, d)
    pix_sq = 0.5 * np.einsum("ij,ij->i", pix, pix)
    coords = np.stack(np.meshgrid(np.arange(h), np.arange(w), indexing="ij"), axis=-1)
    coords = coords.reshape(-1, 2).astype(np.float64)
    coords_sq = 0.5 * np.einsum("ij,ij->i", coords, coords)
    inv_s2 = 1.0 / (sigma_color * sigma_color)
    color_norm = (2.0 * np.pi * sigma_color**2) ** (-d / 2.0)
    out = np.empty((len(scribbles), h * w))
    for j, s in enumerate(scribbles):
        locs = s.locations.astype(np.float64)
        # single precision once the pair count gets large: the kernel sums
        # feed a log with modeling error far above 1e-7, and it halves the
        # memory traffic of the dominant buffers
        dt = np.float32 if h * w * len(locs) > 4e7 else np.float64
        locs_sq = (0.5 * np.einsum("ij,ij->i", locs, locs)).astype(dt)
        cols = s.colors
        cols_sq = (0.5 * np.einsum("ij,ij->i", cols, cols)).astype(dt)
        mean_w = np.full(len(locs), 1.0 / len(locs), dtype=dt)
        pix_d = pix.astype(dt, copy=False)
        colsT = cols.T.astype(dt, copy=False)
        coords_d = coords.astype(dt, copy=False)
        locsT = locs.T.astype(dt, copy=False)
        pix_sq_d = pix_sq.astype(dt, copy=False)
        coords_sq_d = coords_sq.astype(dt, copy=False)
        rho_j = rho[j].ravel()
        inv_r2 = (1.0 / (rho_j * rho_j)).astype(dt)
        buf = np.empty((min(chunk, h * w), len(locs)), dtype=dt)
        spat = np.empty_like(buf)
        acc = np.empty(min(chunk, h * w), dtype=dt)
        for lo in range(0, h * w, chunk):
            hi = min(lo + chunk, h * w)
            m = hi - lo
            e = buf[:m]
            sp = spat[:m]
            # -|c - c_j|^2 / (2 sigma^2), expanded so the cross term is a GEMM
            np.matmul(pix_d[lo:hi], colsT, out=e)
            e -= cols_sq[None, :]
            e -= pix_sq_d[lo:hi, None]
            e *= dt(inv_s2)
            # -|x - x_j|^2 / (2 rho(x)^2), same expansion with row-wise scale
            np.matmul(coords_d[lo:hi], locsT, out=sp)
            sp -= locs_sq[None, :]
            sp -= coords_sq_d[lo:hi, None]
            sp *= inv_r2[lo:hi, None]
            e += sp
            np.exp(e, out=e)
            np.matmul(e, mean_w, out=acc[:m])
            out[j, lo:hi] = acc[:m]
            out[j, lo:hi] *= color_norm / (2.0 * np.pi * rho_j[lo:hi] ** 2)
    return out.reshape(len(scribbles), h, w)


def texture_posterior(sig, representatives, betas):
    """Softmin class posterior from l1 signature distances.

    sig=None is the flat marker: no textural evidence, uniform posterior.
    betas (one per class, > 0) control how sharply the nearest
    representative wins.
    """
    reps = np.asarray(representatives, dtype=np.float64)
    n = reps.shape[0]
    if n < 2:
        raise ValueError("need at least two classes for a posterior")
    betas = np.broadcast_to(np.asarray(betas, dtype=np.float64), (n,))
    if (betas <= 0).any():
        raise ValueError("betas must be positive")
    if sig is None:
        return np.full(n, 1.0 / n)
    dist = np.abs(reps - np.asarray(sig, dtype=np.float64)[None, :]).sum(axis=1)
    z = -dist / betas
    z -= z.max()
    e = np.exp(z)
    return e / e.sum()


def _log_softmin(dist, betas):
    """Row-stable log softmax of -dist/betas along axis 0."""
    z = -dist / betas
    z -= z.max(axis=0, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=0, keepdims=True))


def _l1_distances(sig2d, reps, chunk=8192):
    """l1 distances (n, M) between pixel signatures and class signatures,
    accumulated in float64 regardless of the field dtype."""
    n = reps.shape[0]
    m = sig2d.shape[0]
    dist = np.empty((n, m))
    for lo in range(0, m, chunk):
        hi = min(lo + chunk, m)
        block = sig2d[lo:hi].astype(np.float64, copy=False)
        for j in range(n):
            dist[j, lo:hi] = np.abs(block - reps[j][None, :]).sum(axis=1)
    return dist


def texture_log_posterior_field(signatures, flat, representatives, betas):
    """Log texture posterior (n, H, W); flat pixels get log(1/n).

    betas may be (n,) constants or an (n, H, W) field (supervised case,
    proportional to scribble distance).
    """
    reps = np.asarray(representatives, dtype=np.float64)
    n, k = reps.shape
    h, w, _ = signatures.shape
    dist = _l1_distances(signatures.reshape(-1, k), reps)
    betas = np.asarray(betas, dtype=np.float64)
    b = betas.reshape(n, -1) if betas.ndim == 3 else betas[:, None]
    logp = _log_softmin(dist, b)
    logp[:, flat.ravel()] = -np.log(n)
    return logp.reshape(n, h, w)


def build_data_term_supervised(
    image,
    signatures,
    flat,
    scribbles,
    alpha=1.3,
    sigma_color=1.3 / 255.0,
    beta0=0.05,
    rho_floor=1.0,
    use_texture=True,
    use_color=True,
):
    """Negative log joint likelihood f_i(x), shape (n, H, W), finite everywhere.

    beta_i(x) = beta0 * rho_i(x) makes the texture posterior trust nearby
    scribbles more. use_texture/use_color drop one factor for ablations.
    """
    if beta0 <= 0:
        raise ValueError(f"beta0 must be positive, got {beta0}")
    shape = image.shape[:2]
    rho = scribble_distance_fields(scribbles, shape, alpha=alpha, rho_floor=rho_floor)
    n = len(scribbles)
    f = np.zeros((n, *shape))
    if use_color:
        lik = color_likelihood_field(image, scribbles, rho, sigma_color=sigma_color)
        f -= np.log(np.maximum(lik, LIKELIHOOD_FLOOR))
    if use_texture and n >= 2:
        reps = np.stack([s.representative() for s in scribbles])
        f -= texture_log_posterior_field(signatures, flat, reps, beta0 * rho)
    return f


def build_data_term_unsupervised(
    image,
    signatures,
    flat,
    color_centroids,
    texture_representatives,
    beta_color=0.1,
    beta_tex=None,
    max_classes=64,
):
    """Negative log likelihood for all (color cluster, texture cluster) pairs.

    Class (c, t) maps to row c * k_t + t. Color enters through a softmin
    on Euclidean centroid distances, texture through a softmin on l1
    signature distances; beta_tex defaults to k/20.
    """
    cc = np.asarray(color_centroids, dtype=np.float64)
    reps = np.asarray(texture_representatives, dtype=np.float64)
    k_c, k_t = cc.shape[0], reps.shape[0]
    n = k_c * k_t
    if n > max_classes:
        raise ValueError(f"{n} classes exceed the configured maximum {max_classes}")
    if beta_color <= 0:
        raise ValueError(f"beta_color must be positive, got {beta_color}")
    if beta_tex is None:
        beta_tex = reps.shape[1] / 20.0
    if beta_tex <= 0:
        raise ValueError(f"beta_tex must be positive, got {beta_tex}")
    img = np.asarray(image, dtype=np.float64)
    h, w, d = img.shape

    if k_c > 1:
        cdist = np.sqrt(_pairwise_sq(cc, img.reshape(-1, d)))
        log_pc = _log_softmin(cdist, np.full((k_c, 1), beta_color))
    else:
        log_pc = np.zeros((1, h * w))
    if k_t > 1:
        tdist = _l1_distances(signatures.reshape(-1, reps.shape[1]), reps)
        log_pt = _log_softmin(tdist, np.full((k_t, 1), beta_tex))
        log_pt[:, flat.ravel()] = -np.log(k_t)
    else:
        log_pt = np.zeros((1, h * w))

    f = -(log_pc[:, None, :] + log_pt[None, :, :]).reshape(n, h * w)
    return f.reshape(n, h, w)
