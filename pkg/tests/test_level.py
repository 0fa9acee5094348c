from fractions import Fraction as F

import pytest

from torifan.cones import ConeError, cone, dual_cone, minimal_face_containing
from torifan.level import (
    interior_lattice_point,
    level_polyhedron,
    project_slice,
    ray_sufficient_test,
    scale_level,
)

EXAMPLE = cone((1, 0, 0), (0, 1, 0), (1, 2, 4))
A1 = cone((1, 0), (1, 2))
OCT2 = cone((1, 0), (0, 1))
OCT3 = cone((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_example_triangle():
    L = level_polyhedron(dual_cone(EXAMPLE), (1, 2, 2), 1)
    assert set(L.vertices) == {(0, 0, F(1, 2)), (2, 0, F(-1, 2)), (0, 1, F(-1, 2))}
    assert L.bounded
    assert L.sigma == EXAMPLE
    assert L.contains((0, 0, F(1, 2))) and not L.contains_interior((0, 0, F(1, 2)))
    assert L.contains_interior((F(2, 3), F(1, 3), F(-1, 6)))


def test_octant_simplex_and_a1_segment():
    L = level_polyhedron(dual_cone(OCT3), (1, 1, 1), 1)
    assert set(L.vertices) == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
    L = level_polyhedron(dual_cone(A1), (1, 1), 1)
    assert set(L.vertices) == {(0, 1), (2, -1)}


def test_level_errors():
    A = dual_cone(A1)
    with pytest.raises(ConeError):
        level_polyhedron(A, (1, 1), 0)
    with pytest.raises(ConeError):
        level_polyhedron(A, (0, 1), 1)


def test_boundary_weight_is_unbounded():
    L = level_polyhedron(dual_cone(OCT2), (1, 0), 1)
    assert not L.bounded
    assert L.vertices == ((1, 0),)
    assert L.recession_generators == ((0, 1),)


def test_scale_level():
    L = level_polyhedron(dual_cone(EXAMPLE), (1, 2, 2), 1)
    assert scale_level(L, 1).vertices == tuple(sorted(L.vertices))
    assert set(scale_level(L, 2).vertices) == {(0, 0, 1), (4, 0, -1), (0, 2, -1)}
    seg = scale_level(level_polyhedron(dual_cone(A1), (1, 1), 1), F(1, 2))
    assert set(seg.vertices) == {(0, F(1, 2)), (1, F(-1, 2))}
    with pytest.raises(ConeError):
        scale_level(L, -1)


def test_project_slice_interior_weight_is_identity():
    L = level_polyhedron(dual_cone(EXAMPLE), (1, 2, 2), 1)
    ps = project_slice(L, EXAMPLE)
    assert len(ps.polytope_vertices) == 3
    for p, lift in ps.vertex_lifts.items():
        assert ps.quotient.project(lift) == p


def test_project_slice_boundary_weights():
    L = level_polyhedron(dual_cone(OCT2), (1, 0), 1)
    ps = project_slice(L, cone((1, 0)))
    assert ps.quotient.rank == 1
    assert len(ps.polytope_vertices) == 1
    (p,) = ps.polytope_vertices
    assert abs(p[0]) == 1 and ps.vertex_lifts[p] == (1, 0)
    L = level_polyhedron(dual_cone(OCT3), (1, 1, 0), 1)
    mu = minimal_face_containing(OCT3, (1, 1, 0))
    ps = project_slice(L, mu)
    assert ps.quotient.rank == 2 and len(ps.polytope_vertices) == 2
    assert set(ps.vertex_lifts.values()) == {(1, 0, 0), (0, 1, 0)}
    with pytest.raises(ConeError):
        project_slice(L, OCT3)


def test_interior_lattice_point_examples():
    assert interior_lattice_point(dual_cone(EXAMPLE), (1, 2, 2)) is None
    assert interior_lattice_point(dual_cone(A1), (1, 1)) == (1, 0)
    assert interior_lattice_point(dual_cone(OCT3), (1, 1, 1)) is None
    a = interior_lattice_point(dual_cone(OCT3), (1, 0, 0))
    assert a is not None and a[0] == 1 and min(a) >= 1
    with pytest.raises(ConeError):
        interior_lattice_point(dual_cone(A1), (2, 2))


def test_ray_sufficient_test():
    res = ray_sufficient_test(A1, (1, 1))
    assert res.holds and res.witness == (1, 0)
    res = ray_sufficient_test(EXAMPLE, (1, 2, 2))
    assert not res.holds and res.witness is None
    res = ray_sufficient_test(OCT3, (1, 0, 0))
    assert res.holds
    assert ray_sufficient_test(EXAMPLE, (1, 1, 2)).holds
