"""Shared fixtures and brute-force oracles for the test suite.

The oracles here recompute results by direct enumeration, trading speed for
obviousness, so the library implementations can be checked against something
independently simple.
"""
from __future__ import annotations

import numpy as np

from miou.contour import extract_contour
from miou.mask import Frame, Mask


def random_mask(rng: np.random.Generator, width: int, height: int, density: float = 0.5) -> Mask:
    return Mask((rng.random((height, width)) < density).astype(np.uint8))


def occupied_cells(mask: Mask, cell_size: int) -> set[tuple[int, int]]:
    """Brute-force downsampling oracle: enumerate every pixel's cell."""
    cells = set()
    pixels = mask.pixels
    for row in range(mask.height):
        for col in range(mask.width):
            if pixels[row, col]:
                cells.add((row // cell_size, col // cell_size))
    return cells


def intersection_ratio_oracle(gt: Mask, dt: Mask, cell_size: int) -> float:
    """Cell-set arithmetic straight from the definition; undefined for empty gt."""
    gt_cells = occupied_cells(gt, cell_size)
    dt_cells = occupied_cells(dt, cell_size)
    if not gt_cells:
        raise ZeroDivisionError("empty ground truth")
    return len(gt_cells & dt_cells) / len(gt_cells)


def contour_oracle(mask: Mask) -> Mask:
    """Per-pixel 4-neighborhood scan; frame border counts as background."""
    pixels = mask.pixels
    out = np.zeros_like(pixels)
    for row in range(mask.height):
        for col in range(mask.width):
            if not pixels[row, col]:
                continue
            for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                nr, nc = row + dr, col + dc
                if not (0 <= nr < mask.height and 0 <= nc < mask.width) or not pixels[nr, nc]:
                    out[row, col] = 1
                    break
    return Mask(out)


# ---------------------------------------------------------------------------
# Deterministic shapes with known properties
# ---------------------------------------------------------------------------

def straight_line_mask(side: int, length: int) -> Mask:
    """A 1-pixel horizontal segment; box counts scale like dimension 1."""
    pixels = np.zeros((side, side), dtype=np.uint8)
    pixels[side // 2, :length] = 1
    return Mask(pixels)


def filled_square_mask(side: int) -> Mask:
    return Mask(np.ones((side, side), dtype=np.uint8))


def sierpinski_mask(side: int, frame_side: int) -> Mask:
    """Sierpinski triangle raster: cell (i, j) is filled iff i & j == 0.

    Placed at the top-left corner of a frame_side x frame_side frame. With
    side a power of two, the box count at cell size 2^k is exactly 3^(m-k)
    for side = 2^m, so the fitted slope is log(3)/log(2) with r^2 = 1.
    """
    i = np.arange(side)
    block = ((i[:, None] & i[None, :]) == 0).astype(np.uint8)
    pixels = np.zeros((frame_side, frame_side), dtype=np.uint8)
    pixels[:side, :side] = block
    return Mask(pixels)


# ---------------------------------------------------------------------------
# Comb construction: one ground truth, two detections with identical
# area-overlap metrics but very different boundary fidelity.
# ---------------------------------------------------------------------------

def comb_masks(
    tooth_depth: int, extension: int, width: int = 60, base_rows: int = 20, margin: int = 2
) -> tuple[Mask, Mask, Mask]:
    """Build (gt, dt1, dt2) in one shared frame.

    gt is a comb: a solid base with teeth of the given depth on alternating
    columns, pointing up. dt1 is the comb's bounding box. dt2 is the comb
    plus a solid slab of `extension` rows appended below the base.
    """
    height = tooth_depth + base_rows + extension
    frame_h, frame_w = height + 2 * margin, width + 2 * margin
    gt = np.zeros((frame_h, frame_w), dtype=np.uint8)
    top, left = margin, margin
    base_top = top + tooth_depth
    gt[base_top : base_top + base_rows, left : left + width] = 1
    for col in range(0, width, 2):
        gt[top:base_top, left + col] = 1

    dt1 = np.zeros_like(gt)
    dt1[top : base_top + base_rows, left : left + width] = 1

    dt2 = gt.copy()
    dt2[base_top + base_rows : base_top + base_rows + extension, left : left + width] = 1
    return Mask(gt), Mask(dt1), Mask(dt2)


def find_matched_comb_pair(max_depth: int = 40) -> tuple[Mask, Mask, Mask]:
    """Search tooth depths and extensions until both detections tie on IoU.

    Deepest teeth first: the deeper the comb, the more boundary structure the
    bounding box throws away, which is the contrast the pair exists to show.
    """
    from miou.baseline import iou

    for depth in range(max_depth, 1, -2):
        for extension in range(1, depth + 1):
            gt, dt1, dt2 = comb_masks(depth, extension)
            if abs(iou(gt, dt1) - iou(gt, dt2)) < 1e-9:
                return gt, dt1, dt2
    raise AssertionError("no IoU-matched comb pair found in search range")
