"""Multiscale IoU and companion mask metrics."""
from .baseline import (
    BaselineReport,
    baseline_report,
    dsc_ltd,
    iou,
    precision_recall_f1,
)
from .contour import extract_contour
from .errors import (
    InputError,
    MetricUndefinedError,
    MiouError,
)
from .mask import Frame, Mask, load_mask, save_mask
from .multiscale import (
    FractalDimResult,
    MiouResult,
    RatioCurve,
    ScaleSet,
    downsample,
    fractal_dimension,
    intersection_ratio,
    miou,
)
from .synth import (
    JaggedShapeParams,
    PerturbationSpec,
    apply_perturbation,
    apply_perturbations,
    generate_jagged,
    generate_variant_grid,
)

__all__ = [
    "BaselineReport",
    "Frame",
    "FractalDimResult",
    "InputError",
    "JaggedShapeParams",
    "Mask",
    "MetricUndefinedError",
    "MiouError",
    "MiouResult",
    "PerturbationSpec",
    "RatioCurve",
    "ScaleSet",
    "apply_perturbation",
    "apply_perturbations",
    "baseline_report",
    "downsample",
    "dsc_ltd",
    "extract_contour",
    "fractal_dimension",
    "generate_jagged",
    "generate_variant_grid",
    "intersection_ratio",
    "iou",
    "load_mask",
    "miou",
    "precision_recall_f1",
    "save_mask",
]

__version__ = "0.1.0"
