"""Shared synthetic instances for the test suite."""

import numpy as np
import pytest

from texseg.analysis import default_operator


def stripe_pattern(shape, period, horizontal, lo=0.35, hi=0.65):
    """Square-wave stripes; equal mean and variance for both orientations."""
    h, w = shape
    idx = np.arange(h)[:, None] if horizontal else np.arange(w)[None, :]
    pat = ((idx // (period // 2)) % 2).astype(float)
    return np.broadcast_to(lo + (hi - lo) * pat, shape).copy()


def two_texture_case(size=64, period=4):
    """Gray image whose diagonal quadrant pairs differ only by stripe
    orientation, plus ground truth and one scribble stroke per class.

    Label 1 owns the top-left and bottom-right quadrants (vertical
    stripes), label 2 the other diagonal (horizontal). The disconnected
    region pairs make pure location reasoning useless, so color-only
    segmentation degrades while texture resolves it.
    """
    half = size // 2
    vert = stripe_pattern((size, size), period, horizontal=False)
    horz = stripe_pattern((size, size), period, horizontal=True)
    truth = np.full((size, size), 2, dtype=np.int32)
    truth[:half, :half] = 1
    truth[half:, half:] = 1
    gray = np.where(truth == 1, vert, horz)
    image = np.stack([gray] * 3, axis=-1)
    scribbles = np.zeros((size, size), dtype=np.int32)
    row = half // 2
    scribbles[row - 1 : row + 2, half // 8 : half - half // 4] = 1
    scribbles[row - 1 : row + 2, half + half // 8 : size - half // 4] = 2
    return image, scribbles, truth


def quadrant_color_texture_case(size=64, period=4, amp=0.05):
    """Four quadrants spanning 2 base colors x 2 stripe orientations.

    Quadrant ids 0..3 (TL, TR, BL, BR) map to (red, vert), (red, horiz),
    (blue, horiz), (blue, vert); stripes modulate each base color by
    +-amp so every quadrant is a distinct combination and textured.
    """
    half = size // 2
    vert = stripe_pattern((size, size), period, horizontal=False, lo=-1.0, hi=1.0)
    horz = stripe_pattern((size, size), period, horizontal=True, lo=-1.0, hi=1.0)
    quad = np.zeros((size, size), dtype=np.int32)
    quad[:half, half:] = 1
    quad[half:, :half] = 2
    quad[half:, half:] = 3
    red = np.array([0.75, 0.30, 0.30])
    blue = np.array([0.30, 0.35, 0.75])
    pat = np.where((quad == 0) | (quad == 3), vert, horz)
    base = np.where(((quad == 0) | (quad == 1))[..., None], red, blue)
    image = base * (1.0 + amp * pat[..., None])
    return image, quad


@pytest.fixture(scope="session")
def op_default():
    return default_operator(9, 2.0)


@pytest.fixture(scope="session")
def op_small():
    return default_operator(3, 1.2)
