import math

import numpy as np
import pytest
from scipy import stats

from core.errors import GeometryDomainError, ShapeSamplingError
from infrastructure.raster import rasterize
from infrastructure.shapes import (SHAPE_CATALOG, SampleRequest, analytic_area,
                                   analytic_length, catalog_rows, contains, make_fig_shape,
                                   make_shape, parse_params, sample_uniform, trisectrix_scale)


def test_catalog_lists_every_shape():
    names = [row['forma'] for row in catalog_rows()]
    assert names == list(SHAPE_CATALOG)
    assert "catalan_trisectrix" in names


def test_astroid_membership():
    astroid = make_shape("astroid")
    assert contains(astroid, (1.0, 0.0))
    assert contains(astroid, (0.0, 0.0))
    assert not contains(astroid, (0.9, 0.9))


def test_annulus_membership():
    annulus = make_shape("annulus", {"inner": 0.25, "outer": 0.5})
    assert contains(annulus, (0.3, 0.0))
    assert contains(annulus, (0.25, 0.0))
    assert not contains(annulus, (0.1, 0.0))
    assert not contains(annulus, (0.6, 0.0))


def test_trisectrix_loop():
    shape = make_shape("catalan_trisectrix")
    a = shape.provenance["a"]
    assert a == pytest.approx(1.0, rel=1e-3)
    assert contains(shape, (-3.0 * a, 0.0))
    assert not contains(shape, (2.0 * a, 0.0))
    assert trisectrix_scale(2 * 20.7846) == pytest.approx(2 * a, rel=1e-6)


def test_analytic_lengths():
    assert analytic_length(make_shape("astroid")) == pytest.approx(6.0)
    assert analytic_length(make_shape("catalan_trisectrix")) == pytest.approx(20.7846)
    assert analytic_length(make_shape("annulus", {"inner": 0.25, "outer": 0.5})) == pytest.approx(1.5 * math.pi)
    assert analytic_length(make_fig_shape("fig1a")) is None


def test_trisectrix_polygon_perimeter_matches_length():
    shape = make_shape("catalan_trisectrix")
    edges = np.diff(np.vstack([shape.polygon, shape.polygon[:1]]), axis=0)
    assert np.hypot(edges[:, 0], edges[:, 1]).sum() == pytest.approx(20.7846, rel=1e-4)


@pytest.mark.parametrize("name", ["fig1a", "fig3_pinch", "astroid", "two_discs"])
def test_rasterized_area_matches_analytic(name):
    shape = make_shape(name)
    mask = rasterize(shape, h=0.01)
    assert mask.area == pytest.approx(analytic_area(shape), rel=0.02)


def test_fig_shapes_scale_with_r():
    small, big = make_fig_shape("fig1a", 1.0), make_fig_shape("fig1a", 2.0)
    assert big.bounding_box == tuple(2 * v for v in small.bounding_box)
    assert analytic_area(big) == pytest.approx(4 * analytic_area(small))
    assert make_fig_shape("fig1b", 2.0).params["plate"] == pytest.approx(0.1)


def test_sampling_is_deterministic():
    shape = make_shape("astroid")
    first = sample_uniform(SampleRequest(shape, 500, 42))
    second = sample_uniform(SampleRequest(shape, 500, 42))
    other = sample_uniform(SampleRequest(shape, 500, 43))
    assert np.array_equal(first.coords, second.coords)
    assert not np.array_equal(first.coords, other.coords)


def test_disc_sample_moments():
    n = 100_000
    sample = sample_uniform(SampleRequest(make_shape("disc", {"radius": 0.5}), n, 3)).coords
    # desvio da média: 0.25/sqrt(n) por coordenada
    assert np.all(np.abs(sample.mean(axis=0)) < 3 * 0.25 / math.sqrt(n))
    quadrant = np.mean((sample[:, 0] > 0) & (sample[:, 1] > 0))
    assert abs(quadrant - 0.25) < 3 * math.sqrt(0.1875 / n)


def test_astroid_inscribed_disc_fraction():
    n = 100_000
    sample = sample_uniform(SampleRequest(make_shape("astroid"), n, 5)).coords
    p = math.pi * 0.09 / (3 * math.pi / 8)
    inside = np.mean(np.hypot(sample[:, 0], sample[:, 1]) <= 0.3)
    assert abs(inside - p) < 3 * math.sqrt(p * (1 - p) / n)


def test_samples_lie_in_shape():
    shape = make_fig_shape("fig1b")
    sample = sample_uniform(SampleRequest(shape, 2000, 9))
    assert np.all(shape.contains_points(sample.coords))


def test_pathological_acceptance_raises():
    sliver = make_shape("annulus", {"inner": 0.4999999, "outer": 0.5})
    with pytest.raises(ShapeSamplingError):
        sample_uniform(SampleRequest(sliver, 10, 0))


def test_parse_params():
    assert parse_params("radius=0.3, cx=1") == {"radius": 0.3, "cx": 1.0}
    assert parse_params(None) == {}
    with pytest.raises(GeometryDomainError):
        parse_params("radius")
    with pytest.raises(GeometryDomainError):
        parse_params("radius=abc")


def test_make_shape_rejects_bad_parameters():
    with pytest.raises(GeometryDomainError, match="desconhecidos"):
        make_shape("disc", {"side": 1.0})
    with pytest.raises(GeometryDomainError):
        make_shape("annulus", {"inner": 0.6, "outer": 0.5})
    with pytest.raises(GeometryDomainError):
        make_shape("heart")
    with pytest.raises(GeometryDomainError):
        SampleRequest(make_shape("disc"), 0, 1)


def test_disc_sample_passes_chi_square_on_equal_area_cells():
    n = 5000
    sample = sample_uniform(SampleRequest(make_shape("disc", {"radius": 0.5}), n, 13)).coords
    radius = np.hypot(sample[:, 0], sample[:, 1])
    # 4 anéis de mesma área x 8 setores
    ring = np.minimum((4 * (radius / 0.5) ** 2).astype(int), 3)
    angle = np.arctan2(sample[:, 1], sample[:, 0]) + math.pi
    sector = (angle / (2 * math.pi) * 8).astype(int) % 8
    counts = np.bincount(ring * 8 + sector, minlength=32)
    assert stats.chisquare(counts).pvalue > 0.001
