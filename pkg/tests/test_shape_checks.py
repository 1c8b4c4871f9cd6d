"""Condições de forma sobre máscaras rasterizadas"""
import numpy as np
import pytest

from core.errors import GeometryDomainError
from core.geometry import Point2
from infrastructure.raster import GridMask, GridSpec, rasterize
from infrastructure.shape_checks import ilc_check, ilc_profile, rconvexity_check, rolling_check
from infrastructure.shapes import make_fig_shape, make_shape

R = 1.0
H = R / 50


def _l_shape() -> GridMask:
    spec = GridSpec(Point2(-1.0, -1.0), 0.01, 200, 200)
    xs, ys = spec.xs, spec.ys
    block = (np.abs(xs)[None, :] <= 0.5) & (np.abs(ys)[:, None] <= 0.5)
    corner = (xs[None, :] > 0) & (ys[:, None] > 0)
    return GridMask.from_spec(spec, block & ~corner)


def test_fig1a_is_rconvex_and_rolling():
    mask = rasterize(make_fig_shape("fig1a", R), h=H, margin=2 * R)
    assert rconvexity_check(mask, R)
    assert rolling_check(mask, R)


def test_fig1b_rolls_but_is_not_rconvex():
    mask = rasterize(make_fig_shape("fig1b", R), h=H, margin=2 * R)
    assert rolling_check(mask, R)
    assert not rconvexity_check(mask, R)


def test_fig3_pinch_fails_local_connectivity():
    mask = rasterize(make_fig_shape("fig3_pinch", R), h=R / 40)
    assert not ilc_check(mask, R)


@pytest.mark.parametrize("name, params, r", [
    ("disc", {"radius": 0.5}, 0.25),
    ("annulus", {"inner": 0.25, "outer": 0.5}, 0.2),
])
def test_rconvex_masks_also_roll(name, params, r):
    mask = rasterize(make_shape(name, params), h=1 / 128, margin=2 * r)
    assert rconvexity_check(mask, r)
    assert rolling_check(mask, r)


def test_reentrant_corner_breaks_rolling():
    assert not rolling_check(_l_shape(), 0.2)


def test_reentrant_corner_breaks_rconvexity():
    assert not rconvexity_check(_l_shape(), 0.2)


def test_disc_and_separate_discs_are_locally_connected():
    disc = rasterize(make_shape("disc", {"radius": 0.5}), h=1 / 64)
    assert ilc_check(disc, 0.1)
    pair = make_shape("two_discs", {"radius1": 0.2, "radius2": 0.2, "separation": 1.0})
    assert ilc_check(rasterize(pair, h=0.01), 0.1)


def test_ilc_profile_is_sorted_by_alpha():
    disc = rasterize(make_shape("disc", {"radius": 0.5}), h=1 / 64)
    profile = ilc_profile(disc, [0.2, 0.1])
    assert list(profile) == [0.1, 0.2]
    assert all(profile.values())


def test_checks_validate_parameters():
    mask = rasterize(make_shape("disc", {"radius": 0.5}), h=0.05, margin=0.5)
    with pytest.raises(GeometryDomainError):
        rconvexity_check(mask, 0.0)
    with pytest.raises(GeometryDomainError):
        ilc_check(mask, 0.01)
    with pytest.raises(GeometryDomainError, match="Margem insuficiente"):
        rolling_check(mask, 0.4)


def test_empty_mask_passes_trivially():
    empty = GridSpec(Point2(0.0, 0.0), 0.1, 20, 20).empty()
    assert rconvexity_check(empty, 0.5)
    assert rolling_check(empty, 0.5)
    assert ilc_check(empty, 0.5)
