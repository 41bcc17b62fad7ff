"""Synthetic region generation and perturbation.

The canonical test shape is a star polygon whose radius oscillates as a
triangle wave around a base circle, giving a controllable amount of boundary
jaggedness with a smooth disk as the zero-amplitude limit. Perturbations are
declarative specs (scale, translate, rotate, smooth) that compose in order;
every operation preserves the frame and clips pixels pushed outside it.
A perturbation that annihilates the mask is legal; emptiness is handled by
the metrics layer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from scipy.ndimage import convolve1d

from .errors import ShapeExceedsFrame
from .mask import Frame, Mask, pixel_count

KIND_SCALE = "scale"
KIND_TRANSLATE = "translate"
KIND_ROTATE = "rotate"
KIND_SMOOTH = "smooth"

DEFAULT_SMOOTH_THRESHOLD = 0.5


@dataclass(frozen=True)
class JaggedShapeParams:
    """Star polygon with triangle-wave teeth; seed perturbs tooth phase only."""

    center: tuple[float, float]  # (x, y) in pixels
    base_radius: float
    tooth_amplitude: float
    tooth_count: int
    frame: Frame
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tooth_count < 3:
            raise ValueError(f"tooth_count must be >= 3, got {self.tooth_count}")
        if self.base_radius <= 0 or self.tooth_amplitude < 0:
            raise ValueError("base_radius must be positive and tooth_amplitude non-negative")
        cx, cy = self.center
        reach = self.base_radius + self.tooth_amplitude
        if cx - reach < 0 or cy - reach < 0 or cx + reach > self.frame.width or cy + reach > self.frame.height:
            raise ShapeExceedsFrame(
                f"radius {reach} around center ({cx}, {cy}) leaves the "
                f"{self.frame.width}x{self.frame.height} frame"
            )


@dataclass(frozen=True)
class PerturbationSpec:
    """One declarative transform; magnitude is kind-specific.

    scale: real resize factor about the centroid
    translate: (dx, dy) integer pixel shift
    rotate: degrees about the centroid
    smooth: gaussian sigma in pixels, followed by thresholding
    """

    kind: str
    magnitude: Any
    threshold: float = DEFAULT_SMOOTH_THRESHOLD
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind == KIND_TRANSLATE:
            dx, dy = self.magnitude
            object.__setattr__(self, "magnitude", (int(dx), int(dy)))
        elif self.kind in (KIND_SCALE, KIND_ROTATE, KIND_SMOOTH):
            object.__setattr__(self, "magnitude", float(self.magnitude))
            if self.kind == KIND_SCALE and self.magnitude <= 0:
                raise ValueError(f"scale factor must be positive, got {self.magnitude}")
        else:
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if not 0 < self.threshold < 1:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold}")

    def to_dict(self) -> dict:
        payload: dict[str, Any] = {"kind": self.kind, "magnitude": self.magnitude}
        if self.kind == KIND_TRANSLATE:
            payload["magnitude"] = list(self.magnitude)
        if self.kind == KIND_SMOOTH:
            payload["threshold"] = self.threshold
        return payload

    @classmethod
    def from_dict(cls, payload: dict) -> "PerturbationSpec":
        return cls(
            kind=payload["kind"],
            magnitude=payload["magnitude"],
            threshold=payload.get("threshold", DEFAULT_SMOOTH_THRESHOLD),
            seed=payload.get("seed", 0),
        )


def scale_spec(factor: float) -> PerturbationSpec:
    return PerturbationSpec(kind=KIND_SCALE, magnitude=factor)


def translate_spec(dx: int, dy: int) -> PerturbationSpec:
    return PerturbationSpec(kind=KIND_TRANSLATE, magnitude=(dx, dy))


def rotate_spec(degrees: float) -> PerturbationSpec:
    return PerturbationSpec(kind=KIND_ROTATE, magnitude=degrees)


def smooth_spec(sigma: float, threshold: float = DEFAULT_SMOOTH_THRESHOLD) -> PerturbationSpec:
    return PerturbationSpec(kind=KIND_SMOOTH, magnitude=sigma, threshold=threshold)


# Default variant-grid layout: two translation rows, the identity row, one
# scaling row, each swept over an ascending ladder of smoothing sigmas.
DEFAULT_GRID_ROWS: tuple[PerturbationSpec, ...] = (
    translate_spec(8, 8),
    translate_spec(4, 4),
    translate_spec(0, 0),
    scale_spec(1.15),
)
DEFAULT_SMOOTHING_LEVELS: tuple[float, ...] = (0.0, 2.0, 3.5, 5.0, 7.0, 9.0, 12.0)


def _triangle_wave(t: np.ndarray) -> np.ndarray:
    """Unit triangle wave with period 2*pi: +1 at t = 0, -1 at t = pi, linear between."""
    frac = (t / (2.0 * math.pi)) % 1.0
    return 4.0 * np.abs(frac - 0.5) - 1.0


def generate_jagged(params: JaggedShapeParams) -> Mask:
    """Rasterize the star polygon, sampling at pixel centers; deterministic per seed."""
    phase = np.random.default_rng(params.seed).uniform(0.0, 2.0 * math.pi)
    cx, cy = params.center
    rows, cols = np.indices((params.frame.height, params.frame.width))
    dx = cols + 0.5 - cx
    dy = rows + 0.5 - cy
    theta = np.arctan2(dy, dx)
    radius = params.base_radius + params.tooth_amplitude * _triangle_wave(
        params.tooth_count * theta + phase
    )
    return Mask(np.hypot(dx, dy) <= radius)


def _centroid(pixels: np.ndarray) -> tuple[float, float]:
    rows, cols = np.nonzero(pixels)
    return float(cols.mean()) + 0.5, float(rows.mean()) + 0.5


def _resample_inverse(mask: Mask, inverse_map) -> Mask:
    """Fill each output pixel from the source pixel its center maps back into."""
    height, width = mask.pixels.shape
    rows, cols = np.indices((height, width))
    src_x, src_y = inverse_map(cols + 0.5, rows + 0.5)
    src_c = np.floor(src_x).astype(np.int64)
    src_r = np.floor(src_y).astype(np.int64)
    valid = (src_c >= 0) & (src_c < width) & (src_r >= 0) & (src_r < height)
    out = np.zeros_like(mask.pixels)
    out[valid] = mask.pixels[src_r[valid], src_c[valid]]
    return Mask(out)


def _translate(mask: Mask, dx: int, dy: int) -> Mask:
    if dx == 0 and dy == 0:
        return mask
    height, width = mask.pixels.shape
    out = np.zeros_like(mask.pixels)
    src_c0, src_c1 = max(0, -dx), min(width, width - dx)
    src_r0, src_r1 = max(0, -dy), min(height, height - dy)
    if src_c0 < src_c1 and src_r0 < src_r1:
        out[src_r0 + dy : src_r1 + dy, src_c0 + dx : src_c1 + dx] = mask.pixels[
            src_r0:src_r1, src_c0:src_c1
        ]
    return Mask(out)


def _scale(mask: Mask, factor: float) -> Mask:
    if factor == 1.0 or pixel_count(mask) == 0:
        return mask
    cx, cy = _centroid(mask.pixels)

    def inverse(px, py):
        return cx + (px - cx) / factor, cy + (py - cy) / factor

    return _resample_inverse(mask, inverse)


def _rotate(mask: Mask, degrees: float) -> Mask:
    if degrees % 360.0 == 0.0 or pixel_count(mask) == 0:
        return mask
    cx, cy = _centroid(mask.pixels)
    theta = math.radians(degrees)
    cos_t, sin_t = math.cos(theta), math.sin(theta)

    def inverse(px, py):
        # Rotate output centers by -theta about the centroid.
        rx, ry = px - cx, py - cy
        return cx + cos_t * rx + sin_t * ry, cy - sin_t * rx + cos_t * ry

    return _resample_inverse(mask, inverse)


def _smooth(mask: Mask, sigma: float, threshold: float) -> Mask:
    if sigma <= 0.0:
        return mask
    radius = math.ceil(3.0 * sigma)
    offsets = np.arange(-radius, radius + 1, dtype=float)
    kernel = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    kernel /= kernel.sum()
    blurred = convolve1d(mask.pixels.astype(float), kernel, axis=0, mode="constant", cval=0.0)
    blurred = convolve1d(blurred, kernel, axis=1, mode="constant", cval=0.0)
    return Mask(blurred > threshold)


def apply_perturbation(mask: Mask, spec: PerturbationSpec) -> Mask:
    """Apply one transform; the frame is preserved and clipped pixels are dropped."""
    if spec.kind == KIND_TRANSLATE:
        return _translate(mask, *spec.magnitude)
    if spec.kind == KIND_SCALE:
        return _scale(mask, spec.magnitude)
    if spec.kind == KIND_ROTATE:
        return _rotate(mask, spec.magnitude)
    return _smooth(mask, spec.magnitude, spec.threshold)


def apply_perturbations(mask: Mask, specs: Sequence[PerturbationSpec]) -> Mask:
    for spec in specs:
        mask = apply_perturbation(mask, spec)
    return mask


def grid_specs(
    rows: Sequence[PerturbationSpec] | None = None,
    smoothing_levels: Sequence[float] | None = None,
) -> list[tuple[int, int, tuple[PerturbationSpec, ...]]]:
    """Composed (row, col, specs) layout for the variant grid."""
    row_transforms = tuple(rows) if rows is not None else DEFAULT_GRID_ROWS
    sigmas = tuple(smoothing_levels) if smoothing_levels is not None else DEFAULT_SMOOTHING_LEVELS
    layout = []
    for ri, row_spec in enumerate(row_transforms):
        for ci, sigma in enumerate(sigmas):
            layout.append((ri, ci, (row_spec, smooth_spec(sigma))))
    return layout


def generate_variant_grid(
    gt_params: JaggedShapeParams,
    rows: Sequence[PerturbationSpec] | None = None,
    smoothing_levels: Sequence[float] | None = None,
) -> list[tuple[int, int, Mask]]:
    """Systematically perturbed copies of the ground-truth shape.

    Each row applies one transform, each column one smoothing level from an
    ascending sigma ladder, composed in that order. With the defaults this
    yields the 4x7 layout whose identity-row first column reproduces the
    ground truth exactly.
    """
    ground_truth = generate_jagged(gt_params)
    return [
        (ri, ci, apply_perturbations(ground_truth, specs))
        for ri, ci, specs in grid_specs(rows, smoothing_levels)
    ]
