"""Command-line interface: seg supervised | unsupervised | dice | bench | serve."""

from __future__ import annotations

import argparse
import math
import os
import sys

from texseg import imgio, pipeline, report
from texseg.analysis import load_operator
from texseg.pipeline import SegConfig


def _add_config_flags(p, mode):
    p.add_argument("--operator", help="operator file overriding the built-in cosine operator")
    p.add_argument("--patch-side", type=int, default=9)
    p.add_argument("--overcompleteness", type=float, default=2.0)
    p.add_argument("--sigma-tex", type=float, default=0.01)
    p.add_argument("--sigma-color", type=float, default=1.3 / 255.0)
    p.add_argument("--alpha", type=float, default=1.3)
    p.add_argument("--gamma", type=float, default=5.0)
    p.add_argument("--use-mean-gamma", action="store_true")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="boundary weight (default 2000 supervised, 6 unsupervised)")
    p.add_argument("--nu", type=float, default=None,
                   help="per-label cost (default 0 supervised, 1100 unsupervised)")
    p.add_argument("--mask-std", type=float, default=None)
    p.add_argument("--beta0", type=float, default=0.05)
    p.add_argument("--rho-floor", type=float, default=1.0)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-scribble-samples", type=int, default=1000)
    p.add_argument("--no-texture", action="store_true", help="color-only data term")
    p.add_argument("--no-color", action="store_true", help="texture-only data term")
    if mode == "unsupervised":
        p.add_argument("--n", type=int, default=None,
                       help="initial class count (perfect square; sets --kc and --kt)")
        p.add_argument("--kc", type=int, default=4)
        p.add_argument("--kt", type=int, default=4)
        p.add_argument("--beta-color", type=float, default=0.1)
        p.add_argument("--beta-tex", type=float, default=None)
        p.add_argument("--max-classes", type=int, default=64)
        p.add_argument("--cluster-sample-cap", type=int, default=50000)


def _config_from(args, mode):
    kc, kt = 4, 4
    if mode == "unsupervised":
        kc, kt = args.kc, args.kt
        if args.n is not None:
            root = math.isqrt(args.n)
            if root * root != args.n:
                raise SystemExit(f"error: --n {args.n} is not a perfect square; use --kc/--kt")
            kc = kt = root
    return SegConfig(
        patch_side=args.patch_side,
        overcompleteness=args.overcompleteness,
        sigma_tex=args.sigma_tex,
        sigma_color=args.sigma_color,
        alpha=args.alpha,
        gamma=args.gamma,
        use_mean_gamma=args.use_mean_gamma,
        lam=args.lam,
        nu=args.nu,
        k_c=kc,
        k_t=kt,
        max_iters=args.max_iters,
        tol=args.tol,
        seed=args.seed,
        mask_std=args.mask_std,
        beta0=args.beta0,
        rho_floor=args.rho_floor,
        beta_color=getattr(args, "beta_color", 0.1),
        beta_tex=getattr(args, "beta_tex", None),
        max_scribble_samples=args.max_scribble_samples,
        max_classes=getattr(args, "max_classes", 64),
        cluster_sample_cap=getattr(args, "cluster_sample_cap", 50000),
        use_texture=not args.no_texture,
        use_color=not args.no_color,
    )


def _operator_from(args):
    return load_operator(args.operator) if args.operator else None


def _print_diag(diag):
    print(
        f"energy={diag.energy:.6g} gap={diag.gap:.4%} iterations={diag.iterations} "
        f"time={diag.millis / 1000.0:.2f}s labels={len(diag.active_labels)}"
    )


def cmd_supervised(args):
    cfg = _config_from(args, "supervised")
    image, seg, diag = pipeline.segment_supervised_files(
        args.image, args.scribbles, config=cfg, operator=_operator_from(args)
    )
    paths = report.write_run_outputs(args.out, image, seg, diag)
    _print_diag(diag)
    print(f"wrote {paths['labels']}")
    return 0


def cmd_unsupervised(args):
    cfg = _config_from(args, "unsupervised")
    image, seg, diag = pipeline.segment_unsupervised_files(
        args.image, config=cfg, operator=_operator_from(args)
    )
    paths = report.write_run_outputs(args.out, image, seg, diag)
    _print_diag(diag)
    print(f"surviving labels: {len(diag.active_labels)}")
    print(f"wrote {paths['labels']}")
    return 0


def cmd_dice(args):
    result = imgio.load_label_map(args.result)
    truth = imgio.load_label_map(args.truth)
    if args.greedy:
        result = pipeline.match_labels_greedy(result, truth)
    print(f"{pipeline.dice_score(result, truth):.6f}")
    return 0


def cmd_bench(args):
    cfg = _config_from(args, "supervised")
    rows = []
    for image_path, scrib_path, truth_path in pipeline.read_manifest(args.manifest):
        image, seg, diag = pipeline.segment_supervised_files(
            image_path, scrib_path, config=cfg, operator=_operator_from(args)
        )
        truth = imgio.load_label_map(truth_path)
        case = os.path.splitext(os.path.basename(image_path))[0]
        rows.append(
            {
                "case": case,
                "dice": pipeline.dice_score(seg.labels, truth),
                "energy": diag.energy,
                "gap": diag.gap,
                "iterations": diag.iterations,
                "millis": diag.millis,
                "active_labels": diag.active_labels,
            }
        )
        report.write_run_outputs(args.out, image, seg, diag, stem=case)
        print(f"{case}\tdice={rows[-1]['dice']:.4f}")
    paths = report.write_bench_outputs(args.out, rows)
    print(f"wrote {paths['table']} and {paths['figure']}")
    return 0


def cmd_serve(args):
    import uvicorn

    from texseg.service import create_app

    app = create_app(max_pixels=args.max_pixels, static_dir=args.frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="seg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("supervised", help="segment an image from a scribble mask")
    p.add_argument("--image", required=True)
    p.add_argument("--scribbles", required=True)
    p.add_argument("--out", default="seg-out")
    _add_config_flags(p, "supervised")
    p.set_defaults(fn=cmd_supervised)

    p = sub.add_parser("unsupervised", help="segment an image with automatic classes")
    p.add_argument("--image", required=True)
    p.add_argument("--out", default="seg-out")
    _add_config_flags(p, "unsupervised")
    p.set_defaults(fn=cmd_unsupervised)

    p = sub.add_parser("dice", help="mean per-label overlap of two label maps")
    p.add_argument("--result", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--greedy", action="store_true", help="match labels by maximum overlap first")
    p.set_defaults(fn=cmd_dice)

    p = sub.add_parser("bench", help="run a manifest of (image, scribbles, truth) triples")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", default="seg-bench")
    _add_config_flags(p, "supervised")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("serve", help="run the interactive HTTP service")
    p.add_argument("--host", default=os.environ.get("SEG_HOST", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(os.environ.get("SEG_PORT", "8765")))
    p.add_argument("--max-pixels", type=int,
                   default=int(os.environ.get("SEG_MAX_PIXELS", "4000000")))
    p.add_argument("--frontend", default=None, help="static directory to serve at /")
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
