import math

import numpy as np
import pytest

from core.errors import GeometryDomainError
from core.geometry import Point2, PointSet
from core.rconvex_hull import build_hull
from infrastructure.raster import (GridMask, GridSpec, band_zone, boundary_mask, closing,
                                   dilate, edt, erode, grid_for_box, opening, rasterize)
from infrastructure.set_metrics import (default_epsilons, hausdorff_boundaries,
                                        hausdorff_masks, measure_distance, outer_minkowski,
                                        parallel_volume, two_sided_minkowski)
from infrastructure.shapes import make_shape


def _grid(width, height, h=0.1, origin=(0.0, 0.0)):
    return GridSpec(Point2(*origin), h, width, height)


# --- Rasterização ------------------------------------------------------------

def test_unit_square_cell_count():
    mask = rasterize(make_shape("rectangle"), h=0.01)
    assert mask.count == pytest.approx(1e4, rel=0.01)


def test_disc_area():
    mask = rasterize(make_shape("disc", {"radius": 0.5}), h=0.005)
    assert mask.area == pytest.approx(math.pi / 4, rel=0.005)


def test_window_too_small_names_deficit():
    shape = make_shape("disc", {"radius": 0.5})
    with pytest.raises(GeometryDomainError, match="faltam"):
        rasterize(shape, h=0.01, window=(-0.4, 0.5, -0.5, 0.5))


def test_margin_is_honoured():
    mask = rasterize(make_shape("disc", {"radius": 0.5}), h=0.01, margin=0.3)
    assert mask.margin >= 0.3


def test_hull_rasterization_matches_analytic_area(unit_square):
    hull = build_hull(unit_square, 1.0)
    mask = rasterize(hull, h=1e-3)
    expected = 1.0 - 2.0 * (math.pi / 3 - math.sin(math.pi / 3))
    assert mask.area == pytest.approx(expected, rel=0.01)


def test_hull_of_isolated_points_rasterizes_empty():
    hull = build_hull(PointSet.from_array([[0.0, 0.0], [1.0, 0.0]]), 0.4)
    assert rasterize(hull, h=0.01).is_empty


# --- Distância euclidiana ----------------------------------------------------

def test_edt_single_cell():
    occ = np.zeros((9, 9), dtype=bool)
    occ[4, 4] = True
    field = edt(GridMask.from_spec(_grid(9, 9), occ)).values
    rows, cols = np.indices(occ.shape)
    np.testing.assert_allclose(field, 0.1 * np.hypot(rows - 4, cols - 4))


def test_edt_full_grid_is_zero():
    field = edt(GridMask.from_spec(_grid(5, 4), np.ones((4, 5), dtype=bool))).values
    assert not field.any()


def test_edt_matches_brute_force(rng):
    occ = rng.random((64, 64)) < 0.05
    occ[0, 0] = True
    field = edt(GridMask.from_spec(_grid(64, 64, h=0.5), occ)).values
    cells = np.argwhere(occ).astype(float)
    every = np.argwhere(np.ones_like(occ)).astype(float)
    diff = every[:, None, :] - cells[None, :, :]
    brute = 0.5 * np.sqrt((diff ** 2).sum(axis=-1)).min(axis=1)
    np.testing.assert_allclose(field.ravel(), brute, atol=1e-12)


def test_edt_empty_mask_raises():
    with pytest.raises(GeometryDomainError):
        edt(_grid(4, 4).empty())


# --- Morfologia ----------------------------------------------------------------

def test_closing_keeps_separated_discs():
    shape = make_shape("two_discs", {"radius1": 0.2, "radius2": 0.2, "separation": 1.0})
    mask = rasterize(shape, h=0.01, margin=0.2)
    closed = closing(mask, 0.15)
    diff = closed.occupancy ^ mask.occupancy
    assert not np.any(diff & ~band_zone(mask, 2))
    assert not closed.occupancy[:, np.abs(closed.header.xs) < 0.2].any()


def test_closing_fills_narrow_slot():
    shape = make_shape("disc", {"radius": 0.5})
    mask = rasterize(shape, h=0.01, margin=0.2)
    xs, ys = mask.header.xs, mask.header.ys
    slot = (np.abs(ys)[:, None] < 0.05) & (xs[None, :] > 0.0)
    notched = mask.with_occupancy(mask.occupancy & ~slot)
    closed = closing(notched, 0.15)
    inner = slot & (xs[None, :] > 0.1) & (xs[None, :] < 0.4)
    assert closed.occupancy[inner].all()


def test_dilate_needs_margin():
    mask = rasterize(make_shape("disc", {"radius": 0.5}), h=0.01, margin=0.05)
    with pytest.raises(GeometryDomainError, match="Margem insuficiente"):
        dilate(mask, 0.2)


def test_erode_shrinks_disc():
    mask = rasterize(make_shape("disc", {"radius": 0.5}), h=0.005)
    eroded = erode(mask, 0.2)
    assert eroded.area == pytest.approx(math.pi * 0.3 ** 2, rel=0.03)


def test_boundary_mask_of_block_is_its_outline():
    occ = np.zeros((10, 10), dtype=bool)
    occ[2:8, 3:7] = True
    border = boundary_mask(GridMask.from_spec(_grid(10, 10), occ)).occupancy
    assert border.sum() == 2 * 6 + 2 * 4 - 4
    assert not border[3:7, 4:6].any()


def test_closing_is_idempotent():
    shape = make_shape("fig3_pinch", {"r": 0.25})
    mask = rasterize(shape, h=0.01, margin=0.35)
    once = closing(mask, 0.15)
    twice = closing(once, 0.15)
    assert np.array_equal(once.occupancy, twice.occupancy)
    assert not np.any(mask.occupancy & ~once.occupancy)


@pytest.mark.parametrize("rho", [0.05, 0.12])
def test_dilation_and_erosion_are_adjoint(rho, rng):
    spec = grid_for_box((-1.0, 1.0, -1.0, 1.0), 0.02)
    big = rasterize(make_shape("disc", {"radius": 0.6}), window=spec)
    for _ in range(5):
        occ = (rng.random((spec.height, spec.width)) < 0.002) & big.occupancy
        occ |= erode(big, 0.3).occupancy & (rng.random(occ.shape) < 0.5)
        x = big.with_occupancy(occ)
        for y in (dilate(x, rho), big, erode(big, 0.2)):
            lhs = not np.any(dilate(x, rho).occupancy & ~y.occupancy)
            rhs = not np.any(x.occupancy & ~erode(y, rho).occupancy)
            assert lhs == rhs


def test_opening_removes_thin_parts():
    mask = rasterize(make_shape("disc", {"radius": 0.4}), h=0.01, margin=0.5)
    xs, ys = mask.header.xs, mask.header.ys
    speck = (np.abs(xs[None, :] - 0.7) < 0.04) & (np.abs(ys[:, None]) < 0.04)
    noisy = mask.with_occupancy(mask.occupancy | speck)
    opened = opening(noisy, 0.1)
    assert not opened.occupancy[speck].any()
    assert not np.any(opened.occupancy & ~noisy.occupancy)
    diff = opened.occupancy ^ mask.occupancy
    assert not np.any(diff & ~band_zone(mask, 2))
    again = opening(opened, 0.1)
    assert np.array_equal(again.occupancy, opened.occupancy)


def test_opening_of_too_thin_mask_is_empty():
    mask = rasterize(make_shape("rectangle", {"half_width": 0.5, "half_height": 0.05}),
                     h=0.01, margin=0.2)
    assert opening(mask, 0.1).is_empty


# --- Métricas ----------------------------------------------------------------

def test_default_epsilons():
    assert default_epsilons(0.01) == pytest.approx([0.03, 0.06, 0.12, 0.24, 0.48])


def test_parallel_volume_of_square():
    mask = rasterize(make_shape("rectangle"), h=2e-3, margin=0.1)
    assert parallel_volume(mask, 0.1) == pytest.approx(1.0 + 0.4 + math.pi * 0.01, rel=0.01)


@pytest.mark.parametrize("name, params, expected", [
    ("disc", {"radius": 0.5}, math.pi),
    ("rectangle", {}, 4.0),
    ("annulus", {"inner": 0.25, "outer": 0.5}, 1.5 * math.pi),
    ("astroid", {}, 6.0),
])
def test_outer_minkowski_content(name, params, expected):
    mask = rasterize(make_shape(name, params), h=1 / 256, margin=0.2)
    assert outer_minkowski(mask) == pytest.approx(expected, rel=0.02)


def test_two_sided_minkowski_content_of_disc():
    mask = rasterize(make_shape("disc", {"radius": 0.5}), h=1 / 256, margin=0.2)
    assert two_sided_minkowski(mask) == pytest.approx(math.pi, rel=0.02)


def test_minkowski_rejects_small_eps():
    mask = rasterize(make_shape("disc", {"radius": 0.5}), h=0.01, margin=0.2)
    with pytest.raises(GeometryDomainError):
        outer_minkowski(mask, [0.01, 0.02])


def test_measure_distance_of_disjoint_discs():
    spec = grid_for_box((-1.6, 1.6, -0.6, 0.6), 1 / 128)
    left = rasterize(make_shape("disc", {"radius": 0.5, "cx": -1.0}), window=spec)
    right = rasterize(make_shape("disc", {"radius": 0.5, "cx": 1.0}), window=spec)
    assert measure_distance(left, right) == pytest.approx(math.pi / 2, rel=0.01)
    assert measure_distance(left, left) == 0.0


def test_hausdorff_between_concentric_discs():
    spec = grid_for_box((-0.5, 0.5, -0.5, 0.5), 1 / 200)
    big = rasterize(make_shape("disc", {"radius": 0.5}), window=spec)
    small = rasterize(make_shape("disc", {"radius": 0.25}), window=spec)
    assert hausdorff_masks(big, small) == pytest.approx(0.25, abs=2 * spec.h)
    assert hausdorff_boundaries(big, small) == pytest.approx(0.25, abs=2 * spec.h)


def test_hausdorff_sees_holes_only_through_boundaries():
    spec = grid_for_box((-0.5, 0.5, -0.5, 0.5), 1 / 200)
    disc = rasterize(make_shape("disc", {"radius": 0.5}), window=spec)
    holed = rasterize(make_shape("annulus", {"inner": 0.1, "outer": 0.5}), window=spec)
    assert hausdorff_masks(disc, holed) == pytest.approx(0.1, abs=2 * spec.h)
    assert hausdorff_boundaries(disc, holed) == pytest.approx(0.4, abs=2 * spec.h)


def test_hausdorff_rejects_empty_and_mismatched_masks():
    a = rasterize(make_shape("disc", {"radius": 0.5}), h=0.01)
    b = rasterize(make_shape("disc", {"radius": 0.5}), h=0.02)
    with pytest.raises(GeometryDomainError):
        hausdorff_masks(a, a.header.empty())
    with pytest.raises(GeometryDomainError):
        hausdorff_masks(a, b)


@pytest.fixture
def three_discs():
    spec = grid_for_box((-1.0, 1.0, -1.0, 1.0), 1 / 100)
    params = ({"radius": 0.5}, {"radius": 0.3, "cx": 0.4}, {"radius": 0.2, "cx": -0.5, "cy": 0.5})
    return [rasterize(make_shape("disc", p), window=spec) for p in params]


@pytest.mark.parametrize("distance", [measure_distance, hausdorff_masks])
def test_mask_distances_are_metrics(distance, three_discs):
    a, b, c = three_discs
    for x in three_discs:
        assert distance(x, x) == 0.0
    assert distance(a, b) > 0
    assert distance(a, b) == distance(b, a)
    assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12
    assert distance(b, c) <= distance(b, a) + distance(a, c) + 1e-12
    assert distance(a, b) <= distance(a, c) + distance(c, b) + 1e-12
