import math
import pickle

import numpy as np
import pytest

from core.errors import ChainClosureError, GeometryDomainError
from core.geometry import PointSet, convex_hull_contains, convex_hull_perimeter
from core.rconvex_hull import (area, boundary_length, build_hull, contains, contains_points,
                               distance_to_boundary, fill_grid, hull_membership_oracle,
                               isolated_points)
from infrastructure.shapes import SampleRequest, make_shape, sample_uniform


def test_distant_pair_is_isolated():
    sample = PointSet.from_array([[0.0, 0.0], [1.0, 0.0]])
    hull = build_hull(sample, 0.4)
    assert hull.isolated == frozenset({0, 1})
    assert boundary_length(hull) == 0.0
    assert not hull.boundary.arcs


def test_close_pair_is_still_isolated():
    # dois pontos não cercam região: sobram só os pontos
    sample = PointSet.from_array([[0.0, 0.0], [1.0, 0.0]])
    hull = build_hull(sample, 1.0)
    assert hull.isolated == frozenset({0, 1})
    assert boundary_length(hull) == 0.0
    assert not contains(hull, (0.5, 0.0))
    assert contains(hull, (1.0, 0.0))


def test_triangle_has_no_isolated_points():
    sample = PointSet.from_array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    hull = build_hull(sample, 1.0)
    assert not hull.isolated
    assert len(hull.boundary.arcs) == 3
    assert contains(hull, (0.5, math.sqrt(3) / 6))


def test_square_boundary_length_and_area(unit_square):
    hull = build_hull(unit_square, 1.0)
    assert boundary_length(hull) == pytest.approx(4 * math.pi / 3, abs=1e-9)
    segment = 0.5 * (math.pi / 3 - math.sin(math.pi / 3))
    assert area(hull) == pytest.approx(1.0 - 4 * segment, abs=1e-9)
    assert len(hull.boundary.chains) == 1
    assert hull.boundary.n_components == 1


def test_square_contains_center_for_large_r(unit_square):
    for r in (1.0, 10.0):
        hull = build_hull(unit_square, r)
        assert contains(hull, (0.5, 0.5))
        assert not contains(hull, (0.5, -0.01))


def test_square_small_r_keeps_only_points(unit_square):
    hull = build_hull(unit_square, 0.4)
    assert len(isolated_points(hull)) == 4
    assert not contains(hull, (0.5, 0.5))


def test_sample_points_are_members(annulus_sample):
    hull = build_hull(annulus_sample, 0.25)
    assert np.all(contains_points(hull, annulus_sample.coords))


def test_points_far_from_sample_are_outside(annulus_sample):
    hull = build_hull(annulus_sample, 0.1)
    points = np.array([[2.0, 2.0], [0.0, 0.0]])
    d, _ = annulus_sample.kdtree.query(points)
    assert np.all(d >= 0.1)
    assert not np.any(contains_points(hull, points))


def test_annulus_has_outer_and_inner_chains(annulus_sample):
    hull = build_hull(annulus_sample, 0.25)
    assert len(hull.boundary.chains) >= 2
    areas = np.array(hull.boundary.chain_areas)
    assert (areas > 0).any() and (areas < 0).any()
    assert not contains(hull, (0.0, 0.0))


def test_hull_lies_inside_convex_hull(annulus_sample, rng):
    hull = build_hull(annulus_sample, 0.25)
    points = rng.uniform(-0.6, 0.6, size=(2000, 2))
    outside_convex = ~convex_hull_contains(annulus_sample, points)
    assert not np.any(contains_points(hull, points[outside_convex]))


def test_membership_matches_brute_force_oracle(annulus_sample, rng):
    r, pitch = 0.25, 0.005
    hull = build_hull(annulus_sample, r)
    points = rng.uniform(-0.5, 0.5, size=(300, 2))
    points = points[distance_to_boundary(hull, points) >= 2 * pitch]
    fast = contains_points(hull, points)
    slow = np.array([hull_membership_oracle(annulus_sample, r, p, pitch) for p in points])
    assert np.mean(fast == slow) >= 0.99


def test_fill_grid_agrees_with_point_membership(annulus_sample):
    hull = build_hull(annulus_sample, 0.25)
    xs = np.linspace(-0.55, 0.55, 111)
    ys = np.linspace(-0.55, 0.55, 97)
    grid = fill_grid(hull, xs, ys)
    gx, gy = np.meshgrid(xs, ys)
    xy = np.column_stack([gx.ravel(), gy.ravel()])
    direct = contains_points(hull, xy).reshape(grid.shape)
    clear = distance_to_boundary(hull, xy).reshape(grid.shape) > 1e-6
    assert np.array_equal(grid[clear], direct[clear])


def test_convex_limit_for_large_r():
    shape = make_shape("disc", {"radius": 0.5})
    sample = sample_uniform(SampleRequest(shape, 2000, 11))
    hull = build_hull(sample, 5.0)
    perimeter = convex_hull_perimeter(sample)
    length = boundary_length(hull)
    assert not hull.isolated
    assert perimeter * (1 - 1e-9) <= length <= perimeter * 1.01


def test_arc_table_columns(unit_square):
    table = build_hull(unit_square, 1.0).arc_table()
    assert list(table.columns) == ['chain_id', 'center_x', 'center_y', 'radius', 'start_angle',
                                   'sweep', 'endpoint_i', 'endpoint_j']
    assert len(table) == 4
    assert (table['sweep'] < 0).all()
    assert (table['chain_id'] == 0).all()


def test_invalid_inputs():
    with pytest.raises(GeometryDomainError):
        build_hull(PointSet.from_array([[0.0, 0.0]]), 0.0)
    with pytest.raises(GeometryDomainError):
        build_hull(PointSet.from_array(np.empty((0, 2))), 1.0)


def test_chain_closure_error_keeps_fragment_when_pickled():
    error = ChainClosureError("cadeia aberta", fragment=[{'arc': 3}])
    clone = pickle.loads(pickle.dumps(error))
    assert clone.fragment == [{'arc': 3}]
    assert "1 arcos" in str(clone)


def test_close_pair_matches_oracle_at_midpoint():
    sample = PointSet.from_array([[0.0, 0.0], [1.0, 0.0]])
    hull = build_hull(sample, 1.0)
    for point in ((0.5, 0.0), (0.5, 0.2), (1.0, 0.0)):
        assert contains(hull, point) == hull_membership_oracle(sample, 1.0, point, 1e-3)


def test_separate_clusters_are_separate_components():
    shape = make_shape("two_discs", {"radius1": 0.3, "radius2": 0.3, "separation": 2.0})
    sample = sample_uniform(SampleRequest(shape, 400, 3))
    hull = build_hull(sample, 0.2)
    assert hull.boundary.n_components == 2
    assert not contains(hull, (0.0, 0.0))


def test_hole_belongs_to_its_outer_chain(annulus_sample):
    hull = build_hull(annulus_sample, 0.25)
    outer = [c for c, a in zip(hull.boundary.component_ids, hull.boundary.chain_areas) if a > 0]
    holes = [c for c, a in zip(hull.boundary.component_ids, hull.boundary.chain_areas) if a < 0]
    assert set(holes) <= set(outer)


@pytest.mark.parametrize("shape_name, r_small, r_large", [
    ("annulus", 0.1, 0.25),
    ("astroid", 0.15, 0.6),
])
def test_hull_grows_with_r(shape_name, r_small, r_large, rng):
    sample = sample_uniform(SampleRequest(make_shape(shape_name), 400, 5))
    small, large = build_hull(sample, r_small), build_hull(sample, r_large)
    points = rng.uniform(-1.1, 1.1, size=(3000, 2))
    clear = ((distance_to_boundary(small, points) > 1e-6)
             & (distance_to_boundary(large, points) > 1e-6))
    inside_small = contains_points(small, points[clear])
    inside_large = contains_points(large, points[clear])
    assert inside_small.any()
    assert np.all(inside_large[inside_small])
    assert area(small) <= area(large) + 1e-9


def test_disc_hull_for_large_r_matches_circumference(rng):
    shape = make_shape("disc", {"radius": 0.5})
    sample = sample_uniform(SampleRequest(shape, 5000, 21))
    hull = build_hull(sample, 5.0)
    assert boundary_length(hull) == pytest.approx(math.pi, rel=0.02)
    points = rng.uniform(-0.6, 0.6, size=(5000, 2))
    outside_convex = ~convex_hull_contains(sample, points)
    assert outside_convex.any()
    assert not np.any(contains_points(hull, points[outside_convex]))


@pytest.mark.slow
@pytest.mark.parametrize("shape_name, params, n, r, seed", [
    ("disc", {"radius": 0.5}, 300, 0.2, 1),
    ("disc", {"radius": 0.5}, 50, 2.0, 2),
    ("annulus", {}, 400, 0.25, 3),
    ("annulus", {}, 400, 0.1, 4),
    ("astroid", {}, 500, 0.3, 5),
    ("rectangle", {}, 300, 0.5, 6),
    ("lens", {}, 300, 1.0, 7),
    ("two_discs", {}, 400, 0.3, 8),
    ("fig1a", {}, 500, 1.0, 9),
    ("fig3_pinch", {}, 500, 1.0, 10),
])
def test_membership_agrees_with_oracle_on_many_instances(shape_name, params, n, r, seed):
    shape = make_shape(shape_name, params)
    sample = sample_uniform(SampleRequest(shape, n, seed))
    hull = build_hull(sample, r)
    pitch = r / 40
    xmin, xmax, ymin, ymax = shape.bounding_box
    rng = np.random.default_rng(seed)
    points = np.column_stack([rng.uniform(xmin - r / 2, xmax + r / 2, 1000),
                              rng.uniform(ymin - r / 2, ymax + r / 2, 1000)])
    points = points[distance_to_boundary(hull, points) >= 2 * pitch]
    fast = contains_points(hull, points)
    brute = np.array([hull_membership_oracle(sample, r, p, pitch) for p in points])
    assert np.mean(fast == brute) >= 0.998
