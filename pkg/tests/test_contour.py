import numpy as np
import pytest

from miou.contour import extract_contour
from miou.mask import Mask, pixel_count

from support import contour_oracle, random_mask


def test_matches_per_pixel_oracle_on_random_masks():
    rng = np.random.default_rng(11)
    for density in (0.2, 0.5, 0.8):
        for _ in range(20):
            m = random_mask(rng, 24, 18, density)
            assert extract_contour(m) == contour_oracle(m)


def test_solid_block_keeps_only_its_ring():
    m = Mask.ones(6, 5)
    ring = extract_contour(m)
    inner = ring.pixels[1:-1, 1:-1]
    assert not inner.any()
    assert pixel_count(ring) == 2 * 6 + 2 * 5 - 4


def test_frame_edge_counts_as_background():
    # A block flush against the frame edge is still bounded there.
    pixels = np.zeros((4, 4), dtype=np.uint8)
    pixels[0:3, 0:3] = 1
    contour = extract_contour(Mask(pixels))
    assert contour.pixels[0, 0]
    assert not contour.pixels[1, 1]


def test_single_pixel_is_its_own_contour():
    m = Mask.from_points(5, 5, [(2, 2)])
    assert extract_contour(m) == m


def test_hole_boundary_is_included():
    pixels = np.ones((7, 7), dtype=np.uint8)
    pixels[3, 3] = 0
    contour = extract_contour(Mask(pixels))
    for r, c in ((2, 3), (4, 3), (3, 2), (3, 4)):
        assert contour.pixels[r, c]
    assert not contour.pixels[2, 2]


def test_empty_mask_has_empty_contour():
    assert pixel_count(extract_contour(Mask.zeros(3, 3))) == 0


def test_ring_is_a_fixed_point():
    # A one-pixel-wide ring has no interior, so tracing it again changes nothing.
    pixels = np.ones((4, 4), dtype=np.uint8)
    pixels[1:3, 1:3] = 0
    ring = Mask(pixels)
    assert extract_contour(ring) == ring
    assert extract_contour(extract_contour(ring)) == extract_contour(ring)


def test_contour_is_subset_of_mask():
    rng = np.random.default_rng(3)
    m = random_mask(rng, 40, 40, 0.6)
    contour = extract_contour(m)
    assert not (contour.pixels & ~m.pixels).any()
