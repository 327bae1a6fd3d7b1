"""Texture-aware interactive and unsupervised image segmentation.

Texture is described by the near-zero response pattern of an overcomplete
analysis operator applied to normalized gray patches. Per-pixel class
likelihoods fuse that descriptor with color and location, and a convex
multilabel solver with boundary and label-count penalties produces the
final segmentation.
"""

from texseg.analysis import AnalysisOperator, default_operator, load_operator, write_operator
from texseg.pipeline import SegConfig, Segmentation, dice_score, segment_supervised, segment_unsupervised

__version__ = "0.1.0"

__all__ = [
    "AnalysisOperator",
    "default_operator",
    "load_operator",
    "write_operator",
    "SegConfig",
    "Segmentation",
    "dice_score",
    "segment_supervised",
    "segment_unsupervised",
]
