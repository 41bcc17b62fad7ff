"""Binary mask data model, file I/O, and frame management.

A mask is an immutable binary raster in a fixed frame. All pairwise
operations in this package require identical frames and raise
``DimensionMismatch`` instead of auto-padding; callers that want padding
must pad explicitly.

Supported interchange formats:
  * PNG -- any channel count; a pixel is foreground iff any channel is nonzero.
  * text-grid -- newline-separated rows of '0'/'1' characters.
  * COCO annotation JSON -- polygon segmentations (even-odd fill, pixel-center
    sampling) and uncompressed RLE (column-major counts). Compressed RLE
    strings raise ``UnsupportedEncoding``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    DimensionMismatch,
    MalformedFormat,
    UnreadableFile,
    UnsupportedEncoding,
    UnwritableDestination,
)

FORMAT_PNG = "png"
FORMAT_TEXT_GRID = "text-grid"
FORMAT_COCO_JSON = "coco-json"

_SUFFIX_FORMATS = {
    ".png": FORMAT_PNG,
    ".txt": FORMAT_TEXT_GRID,
    ".json": FORMAT_COCO_JSON,
}


@dataclass(frozen=True)
class Frame:
    """Pixel dimensions shared by a group of masks."""

    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"frame must be at least 1x1, got {self.width}x{self.height}")


@dataclass(frozen=True, eq=False)
class Mask:
    """Immutable binary raster; ``pixels`` is a read-only (height, width) bool array."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.ndim != 2:
            raise ValueError(f"mask grid must be 2-dimensional, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"mask frame must be at least 1x1, got shape {arr.shape}")
        if arr.dtype != bool:
            values = np.unique(arr)
            if not np.isin(values, (0, 1)).all():
                raise ValueError("mask grid values must be exactly 0 or 1")
            arr = arr.astype(bool)
        else:
            arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def frame(self) -> Frame:
        return Frame(self.width, self.height)

    @classmethod
    def zeros(cls, width: int, height: int) -> "Mask":
        return cls(np.zeros((height, width), dtype=bool))

    @classmethod
    def ones(cls, width: int, height: int) -> "Mask":
        return cls(np.ones((height, width), dtype=bool))

    @classmethod
    def from_points(cls, width: int, height: int, points: Iterable[tuple[int, int]]) -> "Mask":
        """Build a mask from (x, y) foreground coordinates, x = column, y = row."""
        grid = np.zeros((height, width), dtype=bool)
        for x, y in points:
            grid[y, x] = True
        return cls(grid)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mask):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __repr__(self) -> str:
        return f"Mask(width={self.width}, height={self.height}, foreground={pixel_count(self)})"


def pixel_count(mask: Mask) -> int:
    """Number of foreground pixels."""
    return int(np.count_nonzero(mask.pixels))


def complement(mask: Mask) -> Mask:
    return Mask(~mask.pixels)


def require_same_frame(a: Mask, b: Mask) -> None:
    if a.pixels.shape != b.pixels.shape:
        raise DimensionMismatch(
            f"masks have different frames: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def load_mask(path: str | Path, format: str | None = None, annotation_id: int | None = None) -> Mask:
    """Load a mask from ``path``.

    ``format`` is one of ``png``, ``text-grid``, ``coco-json`` and is
    inferred from the file suffix when omitted. ``annotation_id`` selects
    the annotation inside a COCO JSON file and is required for that format.
    """
    path = Path(path)
    fmt = format or _SUFFIX_FORMATS.get(path.suffix.lower())
    if fmt is None:
        raise MalformedFormat(f"cannot infer mask format from suffix of {path}")
    if fmt == FORMAT_PNG:
        return _load_png(path)
    if fmt == FORMAT_TEXT_GRID:
        return _load_text_grid(path)
    if fmt == FORMAT_COCO_JSON:
        if annotation_id is None:
            raise MalformedFormat("coco-json format requires an annotation id")
        return _load_coco(path, annotation_id)
    raise MalformedFormat(f"unknown mask format {fmt!r}")


def save_mask(mask: Mask, path: str | Path, format: str | None = None) -> None:
    """Write ``mask`` to ``path`` as PNG or text-grid; round-trips bit-exactly."""
    path = Path(path)
    fmt = format or _SUFFIX_FORMATS.get(path.suffix.lower())
    if fmt == FORMAT_PNG:
        image = Image.fromarray(mask.pixels.astype(np.uint8) * 255, mode="L")
        try:
            image.save(path, format="PNG")
        except OSError as exc:
            raise UnwritableDestination(f"cannot write {path}: {exc}") from exc
    elif fmt == FORMAT_TEXT_GRID:
        rows = ["".join("1" if v else "0" for v in row) for row in mask.pixels]
        try:
            path.write_text("\n".join(rows) + "\n")
        except OSError as exc:
            raise UnwritableDestination(f"cannot write {path}: {exc}") from exc
    else:
        raise MalformedFormat(f"unsupported save format {fmt!r} for {path}")


def _load_png(path: Path) -> Mask:
    try:
        with Image.open(path) as image:
            arr = np.asarray(image)
    except FileNotFoundError as exc:
        raise UnreadableFile(f"cannot read {path}: {exc}") from exc
    except UnidentifiedImageError as exc:
        raise MalformedFormat(f"{path} is not a decodable image: {exc}") from exc
    except OSError as exc:
        raise UnreadableFile(f"cannot read {path}: {exc}") from exc
    if arr.ndim == 3:
        arr = arr.any(axis=2)
    return Mask(arr != 0)


def _load_text_grid(path: Path) -> Mask:
    try:
        text = path.read_text()
    except OSError as exc:
        raise UnreadableFile(f"cannot read {path}: {exc}") from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines = lines[:-1]
    if not lines:
        raise MalformedFormat(f"{path}: empty text-grid")
    width = len(lines[0])
    grid = np.zeros((len(lines), width), dtype=bool)
    for i, line in enumerate(lines):
        if len(line) != width:
            raise MalformedFormat(f"{path}: row {i} has length {len(line)}, expected {width}")
        for j, ch in enumerate(line):
            if ch == "1":
                grid[i, j] = True
            elif ch != "0":
                raise MalformedFormat(f"{path}: row {i} contains {ch!r}, expected '0' or '1'")
    return Mask(grid)


def _load_coco(path: Path, annotation_id: int) -> Mask:
    try:
        text = path.read_text()
    except OSError as exc:
        raise UnreadableFile(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFormat(f"{path}: invalid JSON: {exc}") from exc
    return coco_annotation_mask(doc, annotation_id, source=str(path))


def coco_annotation_mask(doc: dict, annotation_id: int, source: str = "coco document") -> Mask:
    """Rasterize one annotation of a parsed COCO document into its image frame."""
    annotations = {a.get("id"): a for a in doc.get("annotations", [])}
    if annotation_id not in annotations:
        raise MalformedFormat(f"{source}: no annotation with id {annotation_id}")
    annotation = annotations[annotation_id]

    images = {im.get("id"): im for im in doc.get("images", [])}
    image = images.get(annotation.get("image_id"))
    if image is None:
        raise MalformedFormat(
            f"{source}: annotation {annotation_id} references unknown image"
            f" {annotation.get('image_id')}"
        )
    try:
        width = int(image["width"])
        height = int(image["height"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedFormat(f"{source}: image entry lacks integer width/height") from exc

    segmentation = annotation.get("segmentation")
    if isinstance(segmentation, list):
        return Mask(_rasterize_polygons(segmentation, width, height, source))
    if isinstance(segmentation, dict):
        counts = segmentation.get("counts")
        if isinstance(counts, str):
            raise UnsupportedEncoding(
                f"{source}: annotation {annotation_id} uses compressed RLE, which is not supported"
            )
        if isinstance(counts, list):
            return Mask(_decode_rle(counts, width, height, source))
    raise MalformedFormat(f"{source}: annotation {annotation_id} has no decodable segmentation")


def _rasterize_polygons(polygons: Sequence, width: int, height: int, path: str | Path) -> np.ndarray:
    """Even-odd fill over all polygon rings, sampling at pixel centers.

    Polygon coordinates follow the COCO convention: continuous (x, y) with
    the origin at the top-left corner of the top-left pixel, so the center
    of pixel (row, col) is at (col + 0.5, row + 0.5).
    """
    edges = []
    for poly in polygons:
        pts = np.asarray(poly, dtype=float)
        if pts.ndim != 1 or pts.size < 6 or pts.size % 2:
            raise MalformedFormat(f"{path}: polygon must be a flat list of >= 3 (x, y) pairs")
        pts = pts.reshape(-1, 2)
        nxt = np.roll(pts, -1, axis=0)
        edges.append(np.column_stack([pts, nxt]))
    if not edges:
        raise MalformedFormat(f"{path}: empty polygon segmentation")
    x1, y1, x2, y2 = np.concatenate(edges).T

    grid = np.zeros((height, width), dtype=bool)
    centers_x = np.arange(width) + 0.5
    for row in range(height):
        yc = row + 0.5
        # Half-open straddle test keeps vertices on the scanline unambiguous.
        straddles = (y1 <= yc) != (y2 <= yc)
        if not straddles.any():
            continue
        t = (yc - y1[straddles]) / (y2[straddles] - y1[straddles])
        crossings = np.sort(x1[straddles] + t * (x2[straddles] - x1[straddles]))
        grid[row] = np.searchsorted(crossings, centers_x, side="right") % 2 == 1
    return grid


def _decode_rle(counts: Sequence[int], width: int, height: int, path: str | Path) -> np.ndarray:
    """Decode uncompressed COCO RLE: alternating 0/1 run lengths, column-major."""
    counts = list(counts)
    if any((not isinstance(c, int)) or c < 0 for c in counts):
        raise MalformedFormat(f"{path}: RLE counts must be non-negative integers")
    if sum(counts) != width * height:
        raise MalformedFormat(
            f"{path}: RLE counts sum to {sum(counts)}, expected {width * height}"
        )
    flat = np.zeros(width * height, dtype=bool)
    pos = 0
    value = False
    for run in counts:
        if value:
            flat[pos : pos + run] = True
        pos += run
        value = not value
    return flat.reshape((height, width), order="F")
