"""Boundary pixel extraction.

The multiscale metric compares object boundaries rather than areas, so this
module reduces masks to their inner boundary: the foreground pixels with at
least one 4-neighbor that is background or outside the frame. The rule is
local, so every connected component (and every hole) contributes its own
boundary, and the contour is always a subset of the input mask.
"""
from __future__ import annotations

import numpy as np

from .mask import Mask


def extract_contour(mask: Mask) -> Mask:
    """Inner boundary of ``mask`` in the same frame; empty input yields empty output."""
    fg = mask.pixels
    padded = np.pad(fg, 1)
    interior = (
        padded[:-2, 1:-1]  # north
        & padded[2:, 1:-1]  # south
        & padded[1:-1, :-2]  # west
        & padded[1:-1, 2:]  # east
    )
    return Mask(fg & ~interior)
