"""Command-line front end.

Subcommands:
  eval        metrics for one gt/dt mask pair
  batch       metrics for a directory of pairs matched by filename
  synth grid  write the perturbation variant grid and its manifest
  experiment  run the grid or distribution experiment from a JSON config
  fractal     box-counting fractal dimension of one mask

Exit codes: 0 success, 2 input error, 3 metric undefined for the inputs.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .errors import InputError, MetricUndefinedError
from .mask import Frame, Mask, load_mask, save_mask
from .multiscale import ScaleSet, fractal_dimension
from .synth import (
    DEFAULT_SMOOTHING_LEVELS,
    JaggedShapeParams,
    PerturbationSpec,
    generate_jagged,
    grid_specs,
    apply_perturbations,
    rotate_spec,
    scale_spec,
    smooth_spec,
    translate_spec,
)


def _parse_scales(text: str | None) -> ScaleSet | None:
    if text is None:
        return None
    try:
        return ScaleSet(tuple(int(part) for part in text.split(",") if part))
    except ValueError as exc:
        raise InputError(f"bad --scales value {text!r}: {exc}") from exc


def _parse_row_token(token: str) -> PerturbationSpec:
    """Row transform syntax: identity | translate:DX:DY | scale:F | rotate:DEG | smooth:SIGMA."""
    parts = token.split(":")
    kind, args = parts[0], parts[1:]
    try:
        if kind == "identity" and not args:
            return translate_spec(0, 0)
        if kind == "translate" and len(args) == 2:
            return translate_spec(int(args[0]), int(args[1]))
        if kind == "scale" and len(args) == 1:
            return scale_spec(float(args[0]))
        if kind == "rotate" and len(args) == 1:
            return rotate_spec(float(args[0]))
        if kind == "smooth" and len(args) == 1:
            return smooth_spec(float(args[0]))
    except ValueError as exc:
        raise InputError(f"bad row transform {token!r}: {exc}") from exc
    raise InputError(f"bad row transform {token!r}")


def _load_mask_arg(path: str, annotation_id: int | None) -> Mask:
    return load_mask(path, annotation_id=annotation_id)


def _cmd_eval(args: argparse.Namespace) -> int:
    gt = _load_mask_arg(args.gt, args.gt_annotation)
    dt = _load_mask_arg(args.dt, args.dt_annotation)
    report = harness.evaluate_pair(
        gt,
        dt,
        scales=_parse_scales(args.scales),
        use_contour=not args.area,
        pair_id=Path(args.gt).stem,
    )
    if args.format == "csv":
        harness.write_report_csv([report], sys.stdout)
    else:
        json.dump(harness.report_to_dict(report), sys.stdout, indent=2)
        sys.stdout.write("\n")
    return 0


def _cmd_batch(args: argparse.Namespace) -> int:
    gt_dir, dt_dir = Path(args.gt_dir), Path(args.dt_dir)
    if not gt_dir.is_dir():
        raise InputError(f"--gt-dir {gt_dir} is not a directory")
    if not dt_dir.is_dir():
        raise InputError(f"--dt-dir {dt_dir} is not a directory")
    names = sorted(
        p.name for p in gt_dir.iterdir() if p.suffix.lower() in (".png", ".txt")
    )
    pairs = []
    for name in names:
        dt_path = dt_dir / name
        if not dt_path.exists():
            continue
        pairs.append((Path(name).stem, load_mask(gt_dir / name), load_mask(dt_path)))
    if not pairs:
        raise InputError(f"no filename-matched mask pairs under {gt_dir} and {dt_dir}")
    reports = harness.evaluate_batch(
        pairs,
        scales=_parse_scales(args.scales),
        use_contour=not args.area,
        max_workers=args.workers,
    )
    with open(args.out, "w", newline="") as handle:
        harness.write_report_csv(reports, handle)
    print(f"wrote {len(reports)} rows to {args.out}")
    return 0


def _cmd_synth_grid(args: argparse.Namespace) -> int:
    frame = Frame(args.frame[0], args.frame[1])
    params = JaggedShapeParams(
        center=(frame.width / 2, frame.height / 2),
        base_radius=args.radius,
        tooth_amplitude=args.amplitude,
        tooth_count=args.teeth,
        frame=frame,
        seed=args.seed,
    )
    rows = [_parse_row_token(token) for token in args.rows] if args.rows else None
    sigmas = args.sigmas if args.sigmas is not None else list(DEFAULT_SMOOTHING_LEVELS)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    suffix = ".png" if args.format == "png" else ".txt"

    ground_truth = generate_jagged(params)
    gt_file = f"gt{suffix}"
    save_mask(ground_truth, out_dir / gt_file)
    cells = []
    for ri, ci, specs in grid_specs(rows, sigmas):
        cell_file = f"r{ri}c{ci}{suffix}"
        save_mask(apply_perturbations(ground_truth, specs), out_dir / cell_file)
        cells.append(
            {"row": ri, "col": ci, "spec": [s.to_dict() for s in specs], "file": cell_file}
        )
    manifest = {
        "frame": [frame.width, frame.height],
        "seed": args.seed,
        "ground_truth": gt_file,
        "smoothing_levels": [float(s) for s in sigmas],
        "cells": cells,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(cells)} variants to {out_dir}")
    return 0


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"config {path} is not valid JSON: {exc}") from exc


def _cmd_experiment(args: argparse.Namespace) -> int:
    payload = _load_config(args.config)
    if args.which == "grid":
        config = harness.GridExperimentConfig.from_dict(payload)
        rows = harness.run_grid_experiment(config)
        with open(args.out, "w", newline="") as handle:
            harness.write_grid_csv(rows, handle)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        config = harness.DistributionExperimentConfig.from_dict(payload)
        summaries = harness.run_distribution_config(config)
        with open(args.out, "w", newline="") as handle:
            harness.write_distribution_csv(summaries, handle)
        print(f"wrote {len(summaries)} rows to {args.out}")
    return 0


def _cmd_fractal(args: argparse.Namespace) -> int:
    mask = _load_mask_arg(args.mask, args.annotation)
    result = fractal_dimension(mask, scales=_parse_scales(args.scales), mode=args.mode)
    json.dump(
        {
            "dimension": result.dimension,
            "r_squared": result.r_squared,
            "mode": args.mode,
            "samples": [[size, count] for size, count in result.samples],
        },
        sys.stdout,
        indent=2,
    )
    sys.stdout.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="miou", description="Multiscale IoU and baseline mask metrics."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one gt/dt mask pair")
    p_eval.add_argument("--gt", required=True, help="ground-truth mask (png/txt/coco json)")
    p_eval.add_argument("--dt", required=True, help="detected mask (png/txt/coco json)")
    p_eval.add_argument("--gt-annotation", type=int, default=None, help="COCO annotation id for --gt")
    p_eval.add_argument("--dt-annotation", type=int, default=None, help="COCO annotation id for --dt")
    p_eval.add_argument("--scales", default=None, help="comma-separated cell sizes, e.g. 1,2,4")
    p_eval.add_argument("--area", action="store_true", help="multiscale on areas instead of contours")
    p_eval.add_argument("--format", choices=("json", "csv"), default="json")
    p_eval.set_defaults(func=_cmd_eval)

    p_batch = sub.add_parser("batch", help="evaluate directories of pairs matched by filename")
    p_batch.add_argument("--gt-dir", required=True)
    p_batch.add_argument("--dt-dir", required=True)
    p_batch.add_argument("--out", required=True, help="output CSV path")
    p_batch.add_argument("--scales", default=None)
    p_batch.add_argument("--area", action="store_true")
    p_batch.add_argument("--workers", type=int, default=1)
    p_batch.set_defaults(func=_cmd_batch)

    p_synth = sub.add_parser("synth", help="synthetic data generators")
    synth_sub = p_synth.add_subparsers(dest="synth_command", required=True)
    p_grid = synth_sub.add_parser("grid", help="write the perturbation variant grid")
    p_grid.add_argument("--out", required=True, help="output directory")
    p_grid.add_argument(
        "--rows",
        nargs="+",
        default=None,
        metavar="TRANSFORM",
        help="row transforms: identity translate:DX:DY scale:F rotate:DEG smooth:SIGMA",
    )
    p_grid.add_argument("--sigmas", nargs="+", type=float, default=None, help="smoothing ladder")
    p_grid.add_argument("--seed", type=int, default=7)
    p_grid.add_argument("--frame", nargs=2, type=int, default=(512, 512), metavar=("W", "H"))
    p_grid.add_argument("--radius", type=float, default=160.0)
    p_grid.add_argument("--amplitude", type=float, default=28.0)
    p_grid.add_argument("--teeth", type=int, default=28)
    p_grid.add_argument("--format", choices=("png", "text-grid"), default="png")
    p_grid.set_defaults(func=_cmd_synth_grid)

    p_exp = sub.add_parser("experiment", help="run an experiment from a JSON config")
    p_exp.add_argument("which", choices=("grid", "distribution"))
    p_exp.add_argument("--config", default=None, help="JSON config; defaults apply when omitted")
    p_exp.add_argument("--out", required=True, help="output CSV path")
    p_exp.set_defaults(func=_cmd_experiment)

    p_fractal = sub.add_parser("fractal", help="box-counting fractal dimension of one mask")
    p_fractal.add_argument("--mask", required=True)
    p_fractal.add_argument("--annotation", type=int, default=None, help="COCO annotation id")
    p_fractal.add_argument("--mode", choices=("contour", "area"), default="contour")
    p_fractal.add_argument("--scales", default=None)
    p_fractal.set_defaults(func=_cmd_fractal)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MetricUndefinedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
