"""Multiscale intersection metrics and box-counting fractal dimension.

The central quantity is the intersection ratio at one cell size: both masks
are reduced onto a grid of square cells anchored at the top-left pixel, and
the ratio is the number of cells they share divided by the number of cells
the ground truth occupies. Sweeping the cell size over an ordered scale set
and integrating the ratio over normalized scale yields the multiscale IoU;
regressing log cell counts against log inverse cell size yields the
box-counting fractal dimension.

Grid placement is deterministic: cells are anchored at pixel (0, 0) and
clipped at the right/bottom frame edges. Cell sizes larger than the frame
are legal and degenerate toward a single cell.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .contour import extract_contour
from .errors import (
    DegenerateRegression,
    EmptyGroundTruth,
    EmptyMask,
    InvalidCellSize,
    ScaleSetTooSmall,
)
from .mask import Mask, pixel_count, require_same_frame

MODE_CONTOUR = "contour"
MODE_AREA = "area"


@dataclass(frozen=True)
class ScaleSet:
    """Strictly increasing cell sizes in pixels; at least two are required."""

    cell_sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.cell_sizes)
        if len(sizes) < 2:
            raise ScaleSetTooSmall(f"need at least 2 cell sizes, got {len(sizes)}")
        if sizes[0] < 1:
            raise InvalidCellSize(f"cell sizes must be >= 1, got {sizes[0]}")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise InvalidCellSize(f"cell sizes must be strictly increasing, got {sizes}")
        object.__setattr__(self, "cell_sizes", sizes)

    @classmethod
    def powers_of_two(cls, count: int = 10, start_exponent: int = 0) -> "ScaleSet":
        """Cell sizes 2^start_exponent ... 2^(start_exponent + count - 1)."""
        return cls(tuple(2 ** (start_exponent + i) for i in range(count)))

    @classmethod
    def default(cls) -> "ScaleSet":
        return cls.powers_of_two(10)

    def __len__(self) -> int:
        return len(self.cell_sizes)

    def __iter__(self):
        return iter(self.cell_sizes)


def as_scale_set(scales: "ScaleSet | Iterable[int] | None") -> ScaleSet:
    if scales is None:
        return ScaleSet.default()
    if isinstance(scales, ScaleSet):
        return scales
    return ScaleSet(tuple(scales))


@dataclass(frozen=True)
class RatioCurve:
    """Intersection ratios over normalized scale, ascending cell size.

    Abscissae are uniformly spaced on [0, 1] with spacing 1/(len - 1); the
    i-th point came from raw_scales[i].
    """

    points: tuple[tuple[float, float], ...]
    raw_scales: tuple[int, ...]

    @classmethod
    def from_ratios(cls, scales: ScaleSet, ratios: Sequence[float]) -> "RatioCurve":
        n = len(scales)
        step = 1.0 / (n - 1)
        points = tuple((i * step, float(r)) for i, r in enumerate(ratios))
        return cls(points=points, raw_scales=scales.cell_sizes)

    @property
    def ratios(self) -> tuple[float, ...]:
        return tuple(r for _, r in self.points)

    def integral(self) -> float:
        """Trapezoidal integral over the uniform abscissae; exact 1.0 for an all-ones curve."""
        values = self.ratios
        n = len(values)
        acc = values[0] + values[-1] + 2.0 * sum(values[1:-1])
        return acc / (2 * (n - 1))


@dataclass(frozen=True)
class MiouResult:
    miou: float
    curve: RatioCurve
    used_contour: bool


@dataclass(frozen=True)
class FractalDimResult:
    dimension: float
    samples: tuple[tuple[int, int], ...]  # (cell_size, cell_count)
    r_squared: float


def downsample(mask: Mask, cell_size: int) -> Mask:
    """Reduce resolution by marking each cell occupied iff it contains foreground.

    The output frame is ceil(width / cell_size) x ceil(height / cell_size);
    edge cells are clipped at the frame boundary. cell_size 1 is the identity.
    """
    if cell_size < 1:
        raise InvalidCellSize(f"cell size must be >= 1, got {cell_size}")
    if cell_size == 1:
        return mask
    counts = mask.pixels.astype(np.int64)
    counts = np.add.reduceat(counts, np.arange(0, mask.height, cell_size), axis=0)
    counts = np.add.reduceat(counts, np.arange(0, mask.width, cell_size), axis=1)
    return Mask(counts > 0)


def cell_count(mask: Mask) -> int:
    """Occupied cell count of an already-downsampled mask (its pixel count)."""
    return pixel_count(mask)


def intersection_ratio(gt: Mask, dt: Mask, cell_size: int) -> float:
    """Shared cell count over ground-truth cell count at one cell size.

    Asymmetric by construction: the denominator counts only the ground-truth
    cells, so the value is 1 whenever the detection covers every cell the
    ground truth occupies, and never exceeds 1.
    """
    require_same_frame(gt, dt)
    if pixel_count(gt) == 0:
        raise EmptyGroundTruth("intersection ratio needs a nonempty ground truth")
    gt_cells = downsample(gt, cell_size)
    dt_cells = downsample(dt, cell_size)
    shared = int(np.count_nonzero(gt_cells.pixels & dt_cells.pixels))
    return shared / cell_count(gt_cells)


def miou(
    gt: Mask,
    dt: Mask,
    scales: ScaleSet | Iterable[int] | None = None,
    use_contour: bool = True,
) -> MiouResult:
    """Area under the intersection-ratio curve over normalized scale.

    With ``use_contour`` (the default) both masks are reduced to their inner
    boundaries before any downsampling, so the comparison tracks boundary
    structure instead of bulk area. Cell sizes map in ascending order onto
    uniformly spaced abscissae on [0, 1] and the curve is integrated with
    the trapezoidal rule. An empty detection contour is not an error; the
    ratio is simply 0 wherever no cells are shared.
    """
    scale_set = as_scale_set(scales)
    require_same_frame(gt, dt)
    if pixel_count(gt) == 0:
        raise EmptyGroundTruth("multiscale IoU needs a nonempty ground truth")
    if use_contour:
        gt = extract_contour(gt)
        dt = extract_contour(dt)
    ratios = [intersection_ratio(gt, dt, cell_size) for cell_size in scale_set]
    curve = RatioCurve.from_ratios(scale_set, ratios)
    return MiouResult(miou=curve.integral(), curve=curve, used_contour=use_contour)


def fractal_dimension(
    mask: Mask,
    scales: ScaleSet | Iterable[int] | None = None,
    mode: str = MODE_CONTOUR,
) -> FractalDimResult:
    """Box-counting dimension: least-squares slope of log(count) vs log(1/cell size).

    Args:
        mask: nonempty binary mask.
        scales: cell sizes to sample; defaults to powers of two up to 512.
        mode: ``contour`` (default) counts boundary cells, ``area`` counts
            all occupied cells.

    Returns:
        The slope (reported as a positive dimension for ordinary shapes),
        the (cell_size, cell_count) samples, and the regression r-squared.
    """
    if mode not in (MODE_CONTOUR, MODE_AREA):
        raise ValueError(f"mode must be '{MODE_CONTOUR}' or '{MODE_AREA}', got {mode!r}")
    scale_set = as_scale_set(scales)
    if pixel_count(mask) == 0:
        raise EmptyMask("fractal dimension needs a nonempty mask")
    if mode == MODE_CONTOUR:
        mask = extract_contour(mask)
    samples = tuple(
        (cell_size, cell_count(downsample(mask, cell_size))) for cell_size in scale_set
    )
    if all(n == 1 for _, n in samples):
        raise DegenerateRegression("every scale yields a single occupied cell")
    log_inv_size = np.log(1.0 / np.array([s for s, _ in samples], dtype=float))
    log_count = np.log(np.array([n for _, n in samples], dtype=float))
    slope, intercept = np.polyfit(log_inv_size, log_count, 1)
    predicted = slope * log_inv_size + intercept
    ss_res = float(np.sum((log_count - predicted) ** 2))
    ss_tot = float(np.sum((log_count - log_count.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FractalDimResult(dimension=float(slope), samples=samples, r_squared=r_squared)
