"""Image and label-map IO plus scribble-stroke rasterization.

Inputs are 8-bit PNG or PPM. Label maps travel as indexed (palette) PNG
whose pixel index IS the label; 0 is reserved for "unlabeled" in scribble
masks.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image

# 13 visually distinct label colors (enough for the densest stroke sets
# the interactive tool targets); label v uses PALETTE[v - 1]
PALETTE = [
    (230, 25, 75),
    (60, 180, 75),
    (0, 130, 200),
    (255, 225, 25),
    (245, 130, 48),
    (145, 30, 180),
    (70, 240, 240),
    (240, 50, 230),
    (210, 245, 60),
    (170, 110, 40),
    (128, 128, 128),
    (255, 250, 200),
    (0, 0, 128),
]


def load_image(path_or_bytes):
    """RGB image as float64 (H, W, 3) in [0, 1]."""
    src = io.BytesIO(path_or_bytes) if isinstance(path_or_bytes, bytes) else path_or_bytes
    with Image.open(src) as im:
        rgb = im.convert("RGB")
        return np.asarray(rgb, dtype=np.float64) / 255.0


def load_label_map(path):
    """Integer label map from an indexed or grayscale PNG/PPM."""
    with Image.open(path) as im:
        if im.mode not in ("P", "L"):
            im = im.convert("L")
        return np.asarray(im, dtype=np.int32)


def label_png_bytes(labels):
    """Encode a (H, W) label map as indexed PNG bytes (index = label)."""
    labels = np.asarray(labels)
    if labels.max() > 255 or labels.min() < 0:
        raise ValueError("label values must fit 8 bits")
    im = Image.fromarray(labels.astype(np.uint8), mode="P")
    pal = [0, 0, 0]
    for r, g, b in PALETTE * 20:
        pal.extend([r, g, b])
    im.putpalette(pal[: 256 * 3])
    buf = io.BytesIO()
    im.save(buf, format="PNG")
    return buf.getvalue()


def save_label_png(labels, path):
    with open(path, "wb") as fh:
        fh.write(label_png_bytes(labels))


def overlay_image(image, labels, alpha=0.5):
    """Blend label colors over the image; returns float64 (H, W, 3) in [0, 1]."""
    img = np.asarray(image, dtype=np.float64)
    lab = np.asarray(labels)
    colors = np.zeros((*lab.shape, 3))
    for v in np.unique(lab):
        if v <= 0:
            continue
        colors[lab == v] = np.array(PALETTE[(v - 1) % len(PALETTE)]) / 255.0
    mask = (lab > 0)[..., None]
    return np.where(mask, (1.0 - alpha) * img + alpha * colors, img)


def save_overlay_png(image, labels, path, alpha=0.5):
    blended = (overlay_image(image, labels, alpha) * 255.0).round().astype(np.uint8)
    Image.fromarray(blended, mode="RGB").save(path, format="PNG")


def rasterize_strokes(strokes, shape, default_width=13.0):
    """Paint polyline strokes with a round brush into a label mask.

    strokes: iterable of (label, points, width) where points is a sequence
    of (x, y) pixel positions (x = column). A pixel is covered when its
    center lies within width/2 of the polyline. Later strokes overwrite
    earlier ones. Returns (H, W) uint8, 0 where untouched.
    """
    h, w = shape
    mask = np.zeros((h, w), dtype=np.uint8)
    for label, points, width in strokes:
        if label < 1 or label > 255:
            raise ValueError(f"stroke label {label} out of range 1..255")
        if width is None:
            width = default_width
        r = float(width) / 2.0
        pts = [(float(x), float(y)) for x, y in points]
        if not pts:
            continue
        segments = list(zip(pts, pts[1:])) or [(pts[0], pts[0])]
        for (ax, ay), (bx, by) in segments:
            x0 = max(0, int(np.floor(min(ax, bx) - r)))
            x1 = min(w - 1, int(np.ceil(max(ax, bx) + r)))
            y0 = max(0, int(np.floor(min(ay, by) - r)))
            y1 = min(h - 1, int(np.ceil(max(ay, by) + r)))
            if x1 < x0 or y1 < y0:
                continue
            xs = np.arange(x0, x1 + 1, dtype=np.float64)
            ys = np.arange(y0, y1 + 1, dtype=np.float64)
            px, py = np.meshgrid(xs, ys)
            vx, vy = bx - ax, by - ay
            seg2 = vx * vx + vy * vy
            if seg2 == 0.0:
                t = np.zeros_like(px)
            else:
                t = np.clip(((px - ax) * vx + (py - ay) * vy) / seg2, 0.0, 1.0)
            dx = px - (ax + t * vx)
            dy = py - (ay + t * vy)
            hit = dx * dx + dy * dy <= r * r
            mask[y0 : y1 + 1, x0 : x1 + 1][hit] = label
    return mask
