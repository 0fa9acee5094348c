"""Level slices of the dual cone and the interior lattice point test.

For w in sigma and c > 0 the level slice is {a in sigma^vee : (a, w) = c}.
It is a polytope plus the dual face of the minimal face mu containing w, and
it becomes bounded after passing to the quotient lattice M / (mu^perp ∩ M).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .cones import Cone, ConeError, dual_cone, dual_face, minimal_face_containing, polyhedron_vertices
from .lattice import QuotientLattice, Vector, add, dot, is_primitive, normalize, quotient_lattice, scale
from .lp import integer_point


@dataclass(frozen=True)
class LevelPolyhedron:
    ambient_dual: Cone
    weight: tuple
    level: Fraction
    vertices: tuple
    recession_generators: tuple

    @property
    def bounded(self) -> bool:
        return not self.recession_generators

    @property
    def sigma(self) -> Cone:
        return dual_cone(self.ambient_dual)

    def contains(self, a: Sequence) -> bool:
        return self.ambient_dual.contains(a) and dot(a, self.weight) == self.level

    def contains_interior(self, a: Sequence) -> bool:
        """a in the relative interior, i.e. strictly inside every facet of A."""
        return all(dot(f, a) > 0 for f in self.ambient_dual.facets) and dot(a, self.weight) == self.level


def _check_weight(A: Cone, w: Sequence) -> Cone:
    if not A.is_full:
        raise ConeError("the dual cone must be full-dimensional")
    if len(w) != A.d:
        raise ConeError(f"dimension mismatch: {len(w)} vs {A.d}")
    if not any(w) or not all(dot(a, w) >= 0 for a in A.rays):
        raise ConeError(f"{tuple(w)} is not a nonzero element of the cone")
    return dual_cone(A)


def level_polyhedron(A: Cone, w: Sequence[int], c) -> LevelPolyhedron:
    c = Fraction(c)
    if c <= 0:
        raise ConeError("level must be positive")
    w = tuple(int(x) for x in w)
    _check_weight(A, w)
    ineqs = [(f, 0) for f in A.facets]
    verts, rec = polyhedron_vertices(ineqs, [(w, c)], A.d)
    return LevelPolyhedron(A, w, c, tuple(verts), tuple(rec))


def scale_level(L: LevelPolyhedron, c2) -> LevelPolyhedron:
    c2 = Fraction(c2)
    if c2 <= 0:
        raise ConeError("level must be positive")
    t = c2 / L.level
    verts = tuple(sorted(normalize(scale(t, v)) for v in L.vertices))
    return LevelPolyhedron(L.ambient_dual, L.weight, c2, verts, L.recession_generators)


@dataclass(frozen=True)
class ProjectedSlice:
    quotient: QuotientLattice
    polytope_vertices: tuple
    vertex_lifts: dict


def _point_hull(points: Sequence[Vector]) -> list[Vector]:
    """Vertices of the convex hull of a finite point set."""
    pts = sorted(set(points))
    if len(pts) <= 1:
        return pts
    k = len(pts[0])
    hom = Cone.from_rays([tuple(p) + (1,) for p in pts], k + 1)
    out = [normalize(tuple(Fraction(x, r[k]) for x in r[:k])) for r in hom.rays]
    return sorted(out)


def project_slice(L: LevelPolyhedron, mu: Cone) -> ProjectedSlice:
    sigma = L.sigma
    if minimal_face_containing(sigma, L.weight) != mu:
        raise ConeError("mu is not the minimal face containing the weight")
    q = quotient_lattice(mu.rays, L.ambient_dual.d)
    images = {v: q.project(v) for v in L.vertices}
    hull = _point_hull(list(images.values()))
    lifts = {p: next(v for v in L.vertices if images[v] == p) for p in hull}
    return ProjectedSlice(q, tuple(hull), lifts)


def interior_lattice_point(A: Cone, w: Sequence[int]) -> Vector | None:
    """A lattice point a with (a, w) = 1 and (a, v) >= 1 for every ray v of
    sigma, or None.

    The search runs in the quotient by mu^perp, where the slice is bounded.
    A quotient solution is lifted and then pushed into the interior along a
    relative interior point of the dual face.
    """
    w = tuple(w)
    if not is_primitive(w):
        raise ConeError(f"{w} is not primitive")
    sigma = _check_weight(A, w)
    mu = minimal_face_containing(sigma, w)
    q = quotient_lattice(mu.rays, A.d)
    rows = [q.dual_functional(v) for v in mu.rays]
    y = integer_point(
        [[-x for x in r] for r in rows],
        [-1] * len(rows),
        [q.dual_functional(w)],
        [1],
        n=q.rank,
    )
    if y is None:
        return None
    a = q.lift(y)
    outside = [v for v in sigma.rays if v not in mu.rays]
    if outside:
        u = dual_face(sigma, mu).interior_point
        n = 0
        for v in outside:
            gap = 1 - dot(a, v)
            if gap > 0:
                n = max(n, math.ceil(Fraction(gap, dot(u, v))))
        a = add(a, scale(n, u))
    return tuple(int(x) for x in a)


class RayTest(NamedTuple):
    holds: bool
    witness: tuple | None


def ray_sufficient_test(sigma: Cone, w: Sequence[int]) -> RayTest:
    """holds=True certifies that the ray of w lies in the canonical subdivision;
    holds=False is inconclusive."""
    a = interior_lattice_point(dual_cone(sigma), w)
    return RayTest(a is not None, a)
