"""Run artifacts: label/overlay images, diagnostics, and report figures."""

from __future__ import annotations

import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from texseg import imgio


def write_run_outputs(out_dir, image, seg, diag, stem="segmentation"):
    """Write labels.png (indexed), overlay.png, diagnostics.json and a
    convergence/overlay figure; returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "labels": os.path.join(out_dir, f"{stem}_labels.png"),
        "overlay": os.path.join(out_dir, f"{stem}_overlay.png"),
        "diagnostics": os.path.join(out_dir, f"{stem}_diagnostics.json"),
        "figure": os.path.join(out_dir, f"{stem}_report.png"),
    }
    imgio.save_label_png(seg.labels, paths["labels"])
    imgio.save_overlay_png(image, seg.labels, paths["overlay"])
    with open(paths["diagnostics"], "w", encoding="utf-8") as fh:
        json.dump(diag.as_dict(), fh, indent=2)
        fh.write("\n")

    fig, axes = plt.subplots(1, 3, figsize=(12, 4))
    axes[0].imshow(image)
    axes[0].set_title("input")
    axes[1].imshow(imgio.overlay_image(image, seg.labels))
    axes[1].set_title(f"{len(diag.active_labels)} labels, gap {diag.gap:.2%}")
    if diag.residuals:
        axes[2].semilogy(diag.residuals)
    axes[2].set_title(f"residual, {diag.iterations} iters")
    axes[2].set_xlabel("iteration")
    for ax in axes[:2]:
        ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(paths["figure"], dpi=110)
    plt.close(fig)
    return paths


BENCH_COLUMNS = ["case", "dice", "energy", "gap", "iterations", "millis", "active_labels"]


def write_bench_outputs(out_dir, rows):
    """Tab-separated score table plus a Dice bar chart; returns the paths.

    rows: list of dicts with BENCH_COLUMNS keys; a `mean` row is appended.
    """
    os.makedirs(out_dir, exist_ok=True)
    tsv_path = os.path.join(out_dir, "bench_scores.tsv")
    fig_path = os.path.join(out_dir, "bench_scores.png")
    with open(tsv_path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(BENCH_COLUMNS) + "\n")
        for row in rows:
            fh.write("\t".join(_fmt(row[c]) for c in BENCH_COLUMNS) + "\n")
        if rows:
            mean_dice = float(np.mean([r["dice"] for r in rows]))
            fh.write("mean\t" + _fmt(mean_dice) + "\t" + "\t".join([""] * 5) + "\n")

    fig, ax = plt.subplots(figsize=(max(4, 0.8 * len(rows) + 2), 3.5))
    names = [r["case"] for r in rows]
    ax.bar(range(len(rows)), [r["dice"] for r in rows], color="#3f7fbf")
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    ax.set_ylim(0, 1)
    ax.set_ylabel("Dice")
    if rows:
        ax.axhline(float(np.mean([r["dice"] for r in rows])), color="k", ls="--", lw=0.8)
    fig.tight_layout()
    fig.savefig(fig_path, dpi=110)
    plt.close(fig)
    return {"table": tsv_path, "figure": fig_path}


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v)
    return str(v)
