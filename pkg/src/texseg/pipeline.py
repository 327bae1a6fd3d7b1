"""End-to-end segmentation runs, scoring, and the benchmark harness."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from texseg import clustering, imgio, likelihood, solver
from texseg.analysis import default_operator
from texseg.texture import rec601_gray, signature_field


@dataclass
class SegConfig:
    """Tunable parameters of a segmentation run.

    lam and nu default per mode when left as None: supervised uses
    lam=2000, nu=0; unsupervised uses lam=6, nu=1100. mask_std of None
    means patch_side / 4. The edge metric reads gray values on the 0..255
    scale, so gamma defaults to 5 there.
    """

    patch_side: int = 9
    overcompleteness: float = 2.0
    sigma_tex: float = 0.01
    sigma_color: float = 1.3 / 255.0
    alpha: float = 1.3
    gamma: float = 5.0
    use_mean_gamma: bool = False
    lam: float | None = None
    nu: float | None = None
    k_c: int = 4
    k_t: int = 4
    max_iters: int = 2000
    tol: float = 1e-5
    seed: int = 0
    mask_std: float | None = None
    beta0: float = 0.05
    rho_floor: float = 1.0
    beta_color: float = 0.1
    beta_tex: float | None = None
    max_scribble_samples: int = 1000
    max_classes: int = 64
    cluster_sample_cap: int = 50000
    use_texture: bool = True
    use_color: bool = True

    def resolved(self, mode):
        cfg = replace(self)
        if cfg.lam is None:
            cfg.lam = 2000.0 if mode == "supervised" else 6.0
        if cfg.nu is None:
            cfg.nu = 0.0 if mode == "supervised" else 1100.0
        if cfg.mask_std is None:
            cfg.mask_std = cfg.patch_side / 4.0
        for name in ("sigma_tex", "sigma_color", "alpha", "beta0", "rho_floor", "tol"):
            if getattr(cfg, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if cfg.lam < 0 or cfg.nu < 0:
            raise ValueError("lam and nu must be non-negative")
        if mode == "unsupervised" and (cfg.k_c < 1 or cfg.k_t < 1):
            raise ValueError("k_c and k_t must be >= 1")
        return cfg


@dataclass
class Segmentation:
    """Hard labeling: labels (H, W) with values in 1..n."""

    labels: np.ndarray

    @property
    def active_labels(self):
        return sorted(int(v) for v in np.unique(self.labels))


@dataclass
class Diagnostics:
    energy: float
    relaxed_energy: float
    gap: float
    iterations: int
    millis: float
    active_labels: list
    residuals: list = field(default_factory=list, repr=False)

    def as_dict(self):
        return {
            "energy": self.energy,
            "relaxed_energy": self.relaxed_energy,
            "gap": self.gap,
            "iterations": self.iterations,
            "millis": self.millis,
            "active_labels": self.active_labels,
        }


def _prepare(image, config, mode, operator):
    cfg = config.resolved(mode)
    img = np.asarray(image, dtype=np.float64)
    if img.ndim == 2:
        img = img[:, :, None]
    op = operator if operator is not None else default_operator(cfg.patch_side, cfg.overcompleteness)
    gray = rec601_gray(img)
    signatures, flat = signature_field(
        gray, op, cfg.patch_side, mask_std=cfg.mask_std, sigma=cfg.sigma_tex
    )
    return cfg, img, op, gray, signatures, flat


def _finish(f, gray, cfg, t0):
    g = solver.edge_metric(gray * 255.0, gamma=cfg.gamma, use_mean_gamma=cfg.use_mean_gamma)
    state = solver.solve(f, g, cfg.lam, cfg.nu, max_iters=cfg.max_iters, tol=cfg.tol)
    labels = solver.binarize(state)
    seg = Segmentation(labels=labels)
    diag = Diagnostics(
        energy=solver.energy(labels, f, g, cfg.lam, cfg.nu),
        relaxed_energy=solver.relaxed_energy(state, f, g, cfg.lam, cfg.nu),
        gap=solver.optimality_gap(state, labels, f, g, cfg.lam, cfg.nu),
        iterations=state.iterations,
        millis=(time.perf_counter() - t0) * 1000.0,
        active_labels=seg.active_labels,
        residuals=state.residuals,
    )
    return seg, diag


def segment_supervised(image, scribbles, config=None, operator=None):
    """Scribble-driven segmentation of an (H, W, 3) image in [0, 1].

    scribbles: (H, W) int mask, 0 unlabeled, labels contiguous from 1.
    Returns (Segmentation, Diagnostics).
    """
    t0 = time.perf_counter()
    scribbles = np.asarray(scribbles)
    if scribbles.shape != np.asarray(image).shape[:2]:
        raise ValueError(
            f"scribble shape {scribbles.shape} does not match image {np.asarray(image).shape[:2]}"
        )
    cfg, img, op, gray, signatures, flat = _prepare(image, config or SegConfig(), "supervised", operator)
    sets = likelihood.build_scribble_sets(
        scribbles, img, signatures, flat, max_samples=cfg.max_scribble_samples
    )
    f = likelihood.build_data_term_supervised(
        img,
        signatures,
        flat,
        sets,
        alpha=cfg.alpha,
        sigma_color=cfg.sigma_color,
        beta0=cfg.beta0,
        rho_floor=cfg.rho_floor,
        use_texture=cfg.use_texture,
        use_color=cfg.use_color,
    )
    return _finish(f, gray, cfg, t0)


def segment_unsupervised(image, config=None, operator=None):
    """Fully automatic segmentation; label count is pruned by the nu cost.

    Classes start as all (color cluster, texture cluster) pairs from
    deterministic seeded clustering. Returns (Segmentation, Diagnostics).
    """
    t0 = time.perf_counter()
    cfg, img, op, gray, signatures, flat = _prepare(image, config or SegConfig(), "unsupervised", operator)
    h, w, d = img.shape
    idx = clustering.stride_subsample(h * w, cfg.cluster_sample_cap)
    centroids, _, _ = clustering.kmeans_colors(img.reshape(-1, d)[idx], cfg.k_c, seed=cfg.seed)
    sig2d = signatures.reshape(-1, signatures.shape[-1]).astype(np.float64)
    reps, _, _ = clustering.kmedians_signatures(sig2d[idx], cfg.k_t, seed=cfg.seed + 1)
    f = likelihood.build_data_term_unsupervised(
        img,
        signatures,
        flat,
        centroids,
        reps,
        beta_color=cfg.beta_color,
        beta_tex=cfg.beta_tex,
        max_classes=cfg.max_classes,
    )
    return _finish(f, gray, cfg, t0)


# ---------------------------------------------------------------------------
# scoring
# ---------------------------------------------------------------------------


def dice_score(result, truth):
    """Mean per-label overlap 2|A n B| / (|A| + |B|), labels matched by index.

    Labels both empty count as perfect agreement. Raises on shape mismatch.
    """
    a = np.asarray(result)
    b = np.asarray(truth)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    n = int(max(a.max(), b.max()))
    scores = []
    for i in range(1, n + 1):
        ai = a == i
        bi = b == i
        denom = ai.sum() + bi.sum()
        scores.append(1.0 if denom == 0 else 2.0 * np.logical_and(ai, bi).sum() / denom)
    return float(np.mean(scores))


def match_labels_greedy(result, truth):
    """Relabel `result` by greedy maximum-overlap matching against `truth`.

    Used before Dice when label indices are arbitrary (unsupervised runs).
    Unmatched result labels are moved above the truth range.
    """
    a = np.asarray(result)
    b = np.asarray(truth)
    ra = [int(v) for v in np.unique(a)]
    rb = [int(v) for v in np.unique(b)]
    overlap = {(x, y): int(np.logical_and(a == x, b == y).sum()) for x in ra for y in rb}
    mapping = {}
    free_a, free_b = set(ra), set(rb)
    for (x, y), cnt in sorted(overlap.items(), key=lambda kv: (-kv[1], kv[0])):
        if cnt == 0:
            break
        if x in free_a and y in free_b:
            mapping[x] = y
            free_a.discard(x)
            free_b.discard(y)
    spare = int(max(rb, default=0))
    for x in sorted(free_a):
        spare += 1
        mapping[x] = spare
    out = np.zeros_like(a)
    for x, y in mapping.items():
        out[a == x] = y
    return out


# ---------------------------------------------------------------------------
# file-level entry points
# ---------------------------------------------------------------------------


def segment_supervised_files(image_path, scribbles_path, config=None, operator=None):
    image = imgio.load_image(image_path)
    scribbles = imgio.load_label_map(scribbles_path)
    seg, diag = segment_supervised(image, scribbles, config=config, operator=operator)
    return image, seg, diag


def segment_unsupervised_files(image_path, config=None, operator=None):
    image = imgio.load_image(image_path)
    seg, diag = segment_unsupervised(image, config=config, operator=operator)
    return image, seg, diag


def read_manifest(path):
    """Benchmark manifest: one `image scribbles truth` triple per line
    (tabs or spaces); blank lines and #-comments are skipped. Relative
    paths resolve against the manifest location."""
    import os

    base = os.path.dirname(os.path.abspath(path))
    triples = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t") if "\t" in line else line.split()
            if len(parts) != 3:
                raise ValueError(f"manifest line {lineno}: expected 3 paths, got {len(parts)}")
            triples.append(tuple(p if os.path.isabs(p) else os.path.join(base, p) for p in parts))
    return triples
