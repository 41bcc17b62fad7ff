"""Batch evaluation and experiment reproduction.

Composes the baseline and multiscale metrics over pairs of masks, runs the
two desk-scale experiments (the perturbation variant grid and the perturbed
mask distribution study), and renders deterministic CSV tables. Reports are
partial rather than absent: a metric that is undefined for a pair is left
unset and recorded in the report's flags instead of aborting the batch.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import baseline
from .errors import (
    DegenerateRegression,
    EmptyDetection,
    EmptyMask,
    EmptyGroundTruth,
    InputError,
    MalformedFormat,
    UnreadableFile,
)
from .mask import Frame, Mask, coco_annotation_mask, pixel_count, require_same_frame
from .multiscale import (
    MODE_AREA,
    MODE_CONTOUR,
    RatioCurve,
    ScaleSet,
    as_scale_set,
    fractal_dimension,
    miou,
)
from .synth import (
    DEFAULT_GRID_ROWS,
    DEFAULT_SMOOTHING_LEVELS,
    JaggedShapeParams,
    PerturbationSpec,
    apply_perturbations,
    generate_jagged,
    generate_variant_grid,
    rotate_spec,
    smooth_spec,
    translate_spec,
)

GROUP_RIGID = "rigid"
GROUP_SMOOTH = "smooth"

REPORT_CSV_COLUMNS = (
    "pair_id",
    "iou",
    "precision",
    "recall",
    "f1",
    "dsc",
    "ltd",
    "miou",
    "fractal_dim_gt",
    "fractal_dim_dt",
    "flags",
)
GRID_CSV_COLUMNS = ("row", "col", "iou", "precision", "recall", "f1", "dsc", "miou")
DISTRIBUTION_CSV_COLUMNS = (
    "group",
    "category",
    "metric",
    "median",
    "q1",
    "q3",
    "min",
    "max",
    "n",
)


@dataclass(frozen=True)
class MetricReport:
    """All metrics for one gt/dt pair; unset fields are explained in ``flags``."""

    pair_id: str
    iou: float | None
    precision: float | None
    recall: float | None
    f1: float | None
    dsc: float | None
    ltd: float | None
    miou: float | None
    ratio_curve: RatioCurve | None
    fractal_dim_gt: float | None
    fractal_dim_dt: float | None
    used_contour: bool
    scale_set: ScaleSet
    flags: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class DistributionSummary:
    """Five-number summary of one metric over one category's perturbed pairs."""

    group: str
    category: str
    metric: str
    median: float
    q1: float
    q3: float
    min: float
    max: float
    n: int


def evaluate_pair(
    gt: Mask,
    dt: Mask,
    scales: ScaleSet | Iterable[int] | None = None,
    use_contour: bool = True,
    pair_id: str = "pair",
) -> MetricReport:
    """All metrics on one pair: baselines on areas, multiscale IoU on contours.

    Raises ``DimensionMismatch`` and ``EmptyGroundTruth`` outright; every
    other undefined metric is flagged in the report instead.
    """
    require_same_frame(gt, dt)
    scale_set = as_scale_set(scales)
    if pixel_count(gt) == 0:
        raise EmptyGroundTruth("pair evaluation needs a nonempty ground truth")
    flags: dict[str, str] = {}

    iou_value = baseline.iou(gt, dt)
    try:
        precision, recall, f1 = baseline.precision_recall_f1(gt, dt)
    except EmptyDetection:
        precision = None
        recall = 0.0
        f1 = 0.0
        flags["precision"] = "empty-detection"
    dsc, ltd = baseline.dsc_ltd(gt, dt)
    if math.isinf(ltd):
        flags["ltd"] = "saturated-high" if ltd > 0 else "saturated-low"

    miou_result = miou(gt, dt, scale_set, use_contour=use_contour)
    fractal_mode = MODE_CONTOUR if use_contour else MODE_AREA
    fractal_gt, fractal_dt = None, None
    try:
        fractal_gt = fractal_dimension(gt, scale_set, mode=fractal_mode).dimension
    except DegenerateRegression:
        flags["fractal_dim_gt"] = "degenerate-regression"
    try:
        fractal_dt = fractal_dimension(dt, scale_set, mode=fractal_mode).dimension
    except EmptyMask:
        flags["fractal_dim_dt"] = "empty-mask"
    except DegenerateRegression:
        flags["fractal_dim_dt"] = "degenerate-regression"

    return MetricReport(
        pair_id=pair_id,
        iou=iou_value,
        precision=precision,
        recall=recall,
        f1=f1,
        dsc=dsc,
        ltd=ltd,
        miou=miou_result.miou,
        ratio_curve=miou_result.curve,
        fractal_dim_gt=fractal_gt,
        fractal_dim_dt=fractal_dt,
        used_contour=use_contour,
        scale_set=scale_set,
        flags=flags,
    )


def evaluate_batch(
    pairs: Sequence[tuple[str, Mask, Mask]],
    scales: ScaleSet | Iterable[int] | None = None,
    use_contour: bool = True,
    max_workers: int = 1,
) -> list[MetricReport]:
    """Evaluate pairs (optionally concurrently) and return reports sorted by pair_id."""
    scale_set = as_scale_set(scales)

    def one(item: tuple[str, Mask, Mask]) -> MetricReport:
        pair_id, gt, dt = item
        return evaluate_pair(gt, dt, scale_set, use_contour=use_contour, pair_id=pair_id)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            reports = list(pool.map(one, pairs))
    else:
        reports = [one(item) for item in pairs]
    return sorted(reports, key=lambda r: r.pair_id)


def _json_value(value: float | None) -> float | str | None:
    if value is None:
        return None
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    return value


def report_to_dict(report: MetricReport) -> dict:
    """JSON-safe dict; non-finite floats become the strings 'inf'/'-inf'/'nan'."""
    return {
        "pair_id": report.pair_id,
        "iou": _json_value(report.iou),
        "precision": _json_value(report.precision),
        "recall": _json_value(report.recall),
        "f1": _json_value(report.f1),
        "dsc": _json_value(report.dsc),
        "ltd": _json_value(report.ltd),
        "miou": _json_value(report.miou),
        "fractal_dim_gt": _json_value(report.fractal_dim_gt),
        "fractal_dim_dt": _json_value(report.fractal_dim_dt),
        "used_contour": report.used_contour,
        "scales": list(report.scale_set.cell_sizes),
        "ratio_curve": [
            {"normalized_scale": x, "ratio": r} for x, r in report.ratio_curve.points
        ]
        if report.ratio_curve is not None
        else None,
        "flags": dict(report.flags),
    }


def _cell(value: float | int | str | None) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_csv_row(report: MetricReport) -> list[str]:
    flags = ";".join(f"{k}={v}" for k, v in sorted(report.flags.items()))
    values = (
        report.pair_id,
        report.iou,
        report.precision,
        report.recall,
        report.f1,
        report.dsc,
        report.ltd,
        report.miou,
        report.fractal_dim_gt,
        report.fractal_dim_dt,
        flags,
    )
    return [_cell(v) for v in values]


def write_report_csv(reports: Sequence[MetricReport], destination) -> None:
    writer = csv.writer(destination, lineterminator="\n")
    writer.writerow(REPORT_CSV_COLUMNS)
    for report in reports:
        writer.writerow(report_csv_row(report))


# ---------------------------------------------------------------------------
# Variant-grid experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridExperimentConfig:
    shape: JaggedShapeParams
    rows: tuple[PerturbationSpec, ...] = DEFAULT_GRID_ROWS
    smoothing_levels: tuple[float, ...] = DEFAULT_SMOOTHING_LEVELS
    scales: ScaleSet = field(default_factory=ScaleSet.default)
    use_contour: bool = True

    @classmethod
    def from_dict(cls, payload: Mapping) -> "GridExperimentConfig":
        payload = dict(payload)
        width, height = payload.pop("frame", (512, 512))
        frame = Frame(int(width), int(height))
        shape_payload = dict(payload.pop("shape", {}))
        rows = payload.pop("rows", None)
        sigmas = payload.pop("smoothing_levels", None)
        scales = as_scale_set(payload.pop("scales", None))
        use_contour = bool(payload.pop("use_contour", True))
        # Reject stray keys before building the shape: a misplaced key must not
        # surface as a confusing ShapeExceedsFrame from the default radius.
        if payload:
            raise InputError(f"unknown grid config keys: {sorted(payload)}")
        center = shape_payload.pop("center", (frame.width / 2, frame.height / 2))
        base_radius = float(shape_payload.pop("base_radius", 160.0))
        tooth_amplitude = float(shape_payload.pop("tooth_amplitude", 28.0))
        tooth_count = int(shape_payload.pop("tooth_count", 28))
        shape_seed = int(shape_payload.pop("seed", 7))
        if shape_payload:
            raise InputError(f"unknown shape config keys: {sorted(shape_payload)}")
        shape = JaggedShapeParams(
            center=(float(center[0]), float(center[1])),
            base_radius=base_radius,
            tooth_amplitude=tooth_amplitude,
            tooth_count=tooth_count,
            frame=frame,
            seed=shape_seed,
        )
        row_specs = (
            tuple(PerturbationSpec.from_dict(r) for r in rows)
            if rows is not None
            else DEFAULT_GRID_ROWS
        )
        levels = tuple(float(s) for s in sigmas) if sigmas is not None else DEFAULT_SMOOTHING_LEVELS
        return cls(
            shape=shape,
            rows=row_specs,
            smoothing_levels=levels,
            scales=scales,
            use_contour=use_contour,
        )


def _pair_row_metrics(
    gt: Mask, dt: Mask, scales: ScaleSet, use_contour: bool
) -> dict[str, float | None]:
    """The grid table's metric columns for one pair; empty dt leaves precision unset."""
    metrics: dict[str, float | None] = {}
    metrics["iou"] = baseline.iou(gt, dt)
    try:
        precision, recall, f1 = baseline.precision_recall_f1(gt, dt)
    except EmptyDetection:
        precision, recall, f1 = None, 0.0, 0.0
    metrics["precision"] = precision
    metrics["recall"] = recall
    metrics["f1"] = f1
    metrics["dsc"], _ = baseline.dsc_ltd(gt, dt)
    metrics["miou"] = miou(gt, dt, scales, use_contour=use_contour).miou
    return metrics


def run_grid_experiment(config: GridExperimentConfig) -> list[dict]:
    """One table row per grid variant, in (row, col) order."""
    ground_truth = generate_jagged(config.shape)
    rows = []
    for ri, ci, variant in generate_variant_grid(
        config.shape, config.rows, config.smoothing_levels
    ):
        metrics = _pair_row_metrics(ground_truth, variant, config.scales, config.use_contour)
        rows.append({"row": ri, "col": ci, **metrics})
    return rows


def write_grid_csv(rows: Sequence[Mapping], destination) -> None:
    writer = csv.writer(destination, lineterminator="\n")
    writer.writerow(GRID_CSV_COLUMNS)
    for row in rows:
        writer.writerow([_cell(row[column]) for column in GRID_CSV_COLUMNS])


# ---------------------------------------------------------------------------
# Distribution experiment
# ---------------------------------------------------------------------------

# Synthetic stand-ins for real object categories: five shape families with
# distinct size and boundary-detail regimes. Sizes are drawn per mask from a
# wide factor range so within-category size spread resembles a real category.
SYNTHETIC_CATEGORY_FAMILIES: tuple[tuple[str, float, float, int], ...] = (
    # (name, base_radius, tooth_amplitude, tooth_count)
    ("tiny_coarse", 24.0, 7.0, 8),
    ("small_coarse", 30.0, 9.0, 10),
    ("small_mid", 34.0, 8.0, 12),
    ("mid_coarse", 40.0, 11.0, 9),
    ("mid_mid", 46.0, 10.0, 12),
)


@dataclass(frozen=True)
class DistributionExperimentConfig:
    groups: tuple[str, ...] = (GROUP_RIGID, GROUP_SMOOTH)
    masks_per_category: int = 20
    frame: Frame = Frame(192, 192)
    seed: int = 0
    scales: ScaleSet = field(default_factory=ScaleSet.default)
    use_contour: bool = True
    rigid_max_rotation: float = 10.0  # degrees, drawn uniform in [-max, +max]
    rigid_max_translation: int = 10  # pixels per axis, drawn uniform in [-max, +max]
    smooth_sigma_range: tuple[float, float] = (0.5, 3.0)
    coco_file: str | None = None
    coco_categories: tuple[str, ...] | None = None

    @classmethod
    def from_dict(cls, payload: Mapping) -> "DistributionExperimentConfig":
        payload = dict(payload)
        groups = tuple(payload.pop("groups", (GROUP_RIGID, GROUP_SMOOTH)))
        for group in groups:
            if group not in (GROUP_RIGID, GROUP_SMOOTH):
                raise InputError(f"unknown distribution group {group!r}")
        width, height = payload.pop("frame", (192, 192))
        sigma_range = payload.pop("smooth_sigma_range", (0.5, 3.0))
        config = cls(
            groups=groups,
            masks_per_category=int(payload.pop("masks_per_category", 20)),
            frame=Frame(int(width), int(height)),
            seed=int(payload.pop("seed", 0)),
            scales=as_scale_set(payload.pop("scales", None)),
            use_contour=bool(payload.pop("use_contour", True)),
            rigid_max_rotation=float(payload.pop("rigid_max_rotation", 10.0)),
            rigid_max_translation=int(payload.pop("rigid_max_translation", 10)),
            smooth_sigma_range=(float(sigma_range[0]), float(sigma_range[1])),
            coco_file=payload.pop("coco_file", None),
            coco_categories=tuple(payload.pop("coco_categories"))
            if "coco_categories" in payload
            else None,
        )
        if payload:
            raise InputError(f"unknown distribution config keys: {sorted(payload)}")
        return config


def synthetic_category_masks(
    frame: Frame, masks_per_category: int, seed: int
) -> dict[str, list[Mask]]:
    """Seeded jagged shapes for each synthetic category family."""
    rng = np.random.default_rng(seed)
    categories: dict[str, list[Mask]] = {}
    for name, radius, amplitude, teeth in SYNTHETIC_CATEGORY_FAMILIES:
        masks = []
        for _ in range(masks_per_category):
            jitter = rng.uniform(-8.0, 8.0, size=2)
            radius_factor = rng.uniform(0.6, 1.5)
            params = JaggedShapeParams(
                center=(frame.width / 2 + jitter[0], frame.height / 2 + jitter[1]),
                base_radius=radius * radius_factor,
                tooth_amplitude=amplitude,
                tooth_count=teeth,
                frame=frame,
                seed=int(rng.integers(0, 2**63 - 1)),
            )
            masks.append(generate_jagged(params))
        categories[name] = masks
    return categories


def load_coco_category_masks(
    path: str | Path,
    categories: Sequence[str] | None = None,
    per_category: int | None = None,
) -> dict[str, list[Mask]]:
    """Rasterize COCO annotations grouped by category name, in file order."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise UnreadableFile(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedFormat(f"{path}: invalid JSON: {exc}") from exc
    names = {c.get("id"): c.get("name") for c in doc.get("categories", [])}
    wanted = set(categories) if categories is not None else None
    grouped: dict[str, list[Mask]] = {}
    for annotation in doc.get("annotations", []):
        name = names.get(annotation.get("category_id"))
        if name is None or (wanted is not None and name not in wanted):
            continue
        if per_category is not None and len(grouped.get(name, ())) >= per_category:
            continue
        grouped.setdefault(name, []).append(coco_annotation_mask(doc, annotation["id"]))
    if not grouped:
        raise MalformedFormat(f"{path}: no matching annotations found")
    return grouped


def _draw_perturbations(
    group: str, config: DistributionExperimentConfig, rng: np.random.Generator
) -> list[PerturbationSpec]:
    if group == GROUP_RIGID:
        degrees = rng.uniform(-config.rigid_max_rotation, config.rigid_max_rotation)
        shift = rng.integers(
            -config.rigid_max_translation, config.rigid_max_translation, endpoint=True, size=2
        )
        return [rotate_spec(float(degrees)), translate_spec(int(shift[0]), int(shift[1]))]
    low, high = config.smooth_sigma_range
    return [smooth_spec(float(rng.uniform(low, high)))]


def run_distribution_experiment(
    masks_by_category: Mapping[str, Sequence[Mask]],
    group: str,
    scales: ScaleSet | Iterable[int] | None = None,
    seed: int = 0,
    config: DistributionExperimentConfig | None = None,
) -> list[DistributionSummary]:
    """Perturb every mask once and summarize IoU and multiscale IoU per category.

    The rigid group draws a rotation uniform in +-rigid_max_rotation degrees
    and a translation uniform in +-rigid_max_translation pixels per axis; the
    smooth group draws a gaussian sigma from smooth_sigma_range. Draws are
    seeded and consumed in category order, so results are reproducible.
    Perturbations that annihilate the detection record both metrics as 0.
    """
    if config is None:
        config = DistributionExperimentConfig(seed=seed, scales=as_scale_set(scales))
    if group not in (GROUP_RIGID, GROUP_SMOOTH):
        raise InputError(f"unknown distribution group {group!r}")
    rng = np.random.default_rng(seed)
    summaries = []
    for category, masks in masks_by_category.items():
        if not masks:
            raise InputError(f"category {category!r} has no masks")
        iou_values, miou_values = [], []
        for gt in masks:
            perturbed = apply_perturbations(gt, _draw_perturbations(group, config, rng))
            if pixel_count(perturbed) == 0:
                iou_values.append(0.0)
                miou_values.append(0.0)
                continue
            iou_values.append(baseline.iou(gt, perturbed))
            miou_values.append(
                miou(gt, perturbed, config.scales, use_contour=config.use_contour).miou
            )
        for metric, values in (("iou", iou_values), ("miou", miou_values)):
            array = np.asarray(values)
            summaries.append(
                DistributionSummary(
                    group=group,
                    category=category,
                    metric=metric,
                    median=float(np.median(array)),
                    q1=float(np.percentile(array, 25)),
                    q3=float(np.percentile(array, 75)),
                    min=float(array.min()),
                    max=float(array.max()),
                    n=len(values),
                )
            )
    return summaries


def run_distribution_config(config: DistributionExperimentConfig) -> list[DistributionSummary]:
    """Full distribution experiment from a config: load or synthesize masks, run groups."""
    if config.coco_file is not None:
        masks = load_coco_category_masks(
            config.coco_file, config.coco_categories, config.masks_per_category
        )
    else:
        masks = synthetic_category_masks(config.frame, config.masks_per_category, config.seed)
    summaries = []
    for index, group in enumerate(config.groups):
        summaries.extend(
            run_distribution_experiment(
                masks, group, config.scales, seed=config.seed + index, config=config
            )
        )
    return summaries


def write_distribution_csv(summaries: Sequence[DistributionSummary], destination) -> None:
    writer = csv.writer(destination, lineterminator="\n")
    writer.writerow(DISTRIBUTION_CSV_COLUMNS)
    for s in summaries:
        writer.writerow(
            [
                s.group,
                s.category,
                s.metric,
                repr(s.median),
                repr(s.q1),
                repr(s.q3),
                repr(s.min),
                repr(s.max),
                str(s.n),
            ]
        )
