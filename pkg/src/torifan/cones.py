"""Rational polyhedral cones and fans.

A :class:`Cone` keeps both representations: primitive ray generators and
primitive inner facet normals (plus integer equations when the cone is not
full-dimensional).  Facet normals of a lower-dimensional cone are taken
inside the linear span of the cone, which makes them canonical.  Everything
is exact; cones compare equal when their sorted ray lists agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .lattice import (
    Vector,
    det,
    dot,
    integer_kernel,
    normalize,
    nullspace,
    primitive_of,
    rank,
    solve,
)


class ConeError(ValueError):
    """Raised on malformed cone or fan input."""


class SubdivisionError(ConeError):
    """Raised when a fan is required to subdivide a cone and does not."""


# ---------------------------------------------------------------------------
# double description


def _combine(a, x, y) -> Vector:
    # a.x > 0 > a.y; result lies on a^perp
    ax, ay = dot(a, x), dot(a, y)
    return primitive_of(tuple(ax * yi - ay * xi for xi, yi in zip(x, y)))


def extreme_rays(ineqs: Sequence[Sequence], d: int, eqs: Sequence[Sequence] = ()) -> tuple[list[Vector], list[Vector]]:
    """Generators of {x : a.x >= 0 for a in ineqs, e.x = 0 for e in eqs}.

    Incremental double description.  Returns ``(rays, lineality)`` with
    primitive integer rays (sorted) and an integer basis of the lineality
    space.
    """
    cons = [primitive_of(a) for a in ineqs if any(a)]
    for e in eqs:
        if any(e):
            p = primitive_of(e)
            cons += [p, tuple(-x for x in p)]
    lin: list[Vector] = [tuple(1 if i == j else 0 for i in range(d)) for j in range(d)]
    rays: list[Vector] = []
    zmask: dict[Vector, int] = {}
    done: list[Vector] = []

    for k, a in enumerate(cons):
        bit = 1 << k
        idx = next((i for i, l in enumerate(lin) if dot(a, l) != 0), None)
        if idx is not None:
            l0 = lin.pop(idx)
            s = dot(a, l0)
            if s < 0:
                l0, s = tuple(-x for x in l0), -s
            lin = [primitive_of(tuple(s * li - dot(a, l) * l0i for li, l0i in zip(l, l0))) for l in lin]
            new = []
            for r in rays:
                ar = dot(a, r)
                r2 = r if ar == 0 else primitive_of(tuple(s * ri - ar * l0i for ri, l0i in zip(r, l0)))
                new.append(r2)
            # the adjustment moves along the lineality, so old tight sets persist
            zmask = {r2: zmask[r] | bit for r, r2 in zip(rays, new)}
            rays = new
            rays.append(l0)
            # l0 was in the lineality, hence tight on everything seen so far
            zmask[l0] = bit - 1
            done.append(a)
            continue
        pos, zero, neg = [], [], []
        for r in rays:
            v = dot(a, r)
            (pos if v > 0 else neg if v < 0 else zero).append(r)
        new_rays = pos + zero
        new_mask = {r: zmask[r] for r in pos}
        new_mask.update({r: zmask[r] | bit for r in zero})
        for p in pos:
            for n in neg:
                common = zmask[p] & zmask[n]
                if any((zmask[r] & common) == common for r in rays if r != p and r != n):
                    continue
                if bin(common).count("1") < d - len(lin) - 2:
                    continue
                r = _combine(a, p, n)
                if r not in new_mask:
                    new_rays.append(r)
                    new_mask[r] = common | bit
        rays, zmask = new_rays, new_mask
        done.append(a)
    return sorted(set(rays)), lin


# ---------------------------------------------------------------------------
# cones


def _span_equations(rays: Sequence[Vector], d: int) -> list[Vector]:
    if not rays:
        return [tuple(1 if i == j else 0 for i in range(d)) for j in range(d)]
    ortho = nullspace(rays, d)
    if not ortho:
        return []
    return _hnf_rows([primitive_of(o) for o in ortho], d)


def _hnf_rows(vectors: Sequence[Vector], d: int) -> list[Vector]:
    # saturated integer basis of span(vectors), in a canonical echelon form
    basis = integer_kernel(integer_kernel(vectors, d), d)
    rows = [list(b) for b in basis]
    # row-style Hermite reduction for canonical output
    r = 0
    for c in range(d):
        piv = [i for i in range(r, len(rows)) if rows[i][c] != 0]
        if not piv:
            continue
        while len([i for i in range(r, len(rows)) if rows[i][c] != 0]) > 1:
            nz = [i for i in range(r, len(rows)) if rows[i][c] != 0]
            i0 = min(nz, key=lambda i: abs(rows[i][c]))
            for i in nz:
                if i != i0:
                    q = rows[i][c] // rows[i0][c]
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[i0])]
        i0 = next(i for i in range(r, len(rows)) if rows[i][c] != 0)
        rows[r], rows[i0] = rows[i0], rows[r]
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
        for i in range(r):
            q = rows[i][c] // rows[r][c]
            rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return [tuple(x) for x in rows]


@dataclass(frozen=True, eq=False)
class Cone:
    """Strongly convex rational polyhedral cone in Z^d (either lattice side)."""

    dim_ambient: int
    rays: tuple
    facets: tuple
    equations: tuple = ()

    # -- construction -----------------------------------------------------

    @classmethod
    def from_rays(cls, generators: Iterable[Sequence], d: int | None = None) -> "Cone":
        gens = [tuple(g) for g in generators]
        if d is None:
            if not gens:
                raise ConeError("ambient dimension needed for the zero cone")
            d = len(gens[0])
        if any(len(g) != d for g in gens):
            raise ConeError("generators of mixed dimension")
        gens = sorted({primitive_of(g) for g in gens if any(g)})
        if not gens:
            return cls(d, (), (), tuple(_span_equations([], d)))
        eqs = _span_equations(gens, d)
        k = d - len(eqs)
        facet_normals, lin = extreme_rays(gens, d, eqs)
        if lin or rank(list(facet_normals) + list(eqs)) < d:
            raise ConeError("cone is not strongly convex")
        if k == 1 and len(gens) > 1:
            raise ConeError("cone is not strongly convex")
        # keep only extreme generators
        if k > 1:
            rays = [g for g in gens if rank([f for f in facet_normals if dot(f, g) == 0]) == k - 1]
        else:
            rays = gens
        return cls(d, tuple(rays), tuple(facet_normals), tuple(eqs))

    @classmethod
    def from_inequalities(cls, ineqs: Iterable[Sequence], d: int, eqs: Iterable[Sequence] = ()) -> "Cone":
        rays, lin = extreme_rays(list(ineqs), d, list(eqs))
        if lin:
            raise ConeError("inequalities define a cone containing a line")
        return cls.from_rays(rays, d)

    # -- basic data -------------------------------------------------------

    @property
    def d(self) -> int:
        return self.dim_ambient

    @property
    def dim(self) -> int:
        return self.dim_ambient - len(self.equations)

    @property
    def is_full(self) -> bool:
        return not self.equations

    def __eq__(self, other) -> bool:
        return isinstance(other, Cone) and self.d == other.d and self.rays == other.rays

    def __hash__(self) -> int:
        return hash((self.d, self.rays))

    def __repr__(self) -> str:
        return f"Cone(rays={list(self.rays)})"

    def contains(self, x: Sequence) -> bool:
        return all(dot(f, x) >= 0 for f in self.facets) and all(dot(e, x) == 0 for e in self.equations)

    def contains_relint(self, x: Sequence) -> bool:
        if not self.rays:
            return all(v == 0 for v in x)
        return all(dot(f, x) > 0 for f in self.facets) and all(dot(e, x) == 0 for e in self.equations)

    @cached_property
    def interior_point(self) -> Vector:
        """Sum of the ray generators (a relative interior point)."""
        return tuple(sum(col) for col in zip(*self.rays)) if self.rays else (0,) * self.d

    def face(self, rays: Iterable[Sequence]) -> "Cone":
        return Cone.from_rays(list(rays), self.d)

    def facet_faces(self) -> list["Cone"]:
        if self.dim == 1:
            return [Cone.from_rays([], self.d)]
        return [self.face([r for r in self.rays if dot(f, r) == 0]) for f in self.facets]

    @cached_property
    def faces(self) -> tuple["Cone", ...]:
        """All faces, including {0} and the cone itself, sorted by dimension."""
        seen = {self.rays: self}
        todo = [self]
        while todo:
            c = todo.pop()
            if not c.rays:
                continue
            for f in c.facet_faces():
                if f.rays not in seen:
                    seen[f.rays] = f
                    todo.append(f)
        return tuple(sorted(seen.values(), key=lambda c: (c.dim, c.rays)))

    def is_face(self, other: "Cone") -> bool:
        return any(other == f for f in self.faces)


def cone(*generators: Sequence) -> Cone:
    return Cone.from_rays(generators)


def zero_cone(d: int) -> Cone:
    return Cone.from_rays([], d)


# ---------------------------------------------------------------------------
# operations


def dual_cone(c: Cone) -> Cone:
    """{a : (a, w) >= 0 for all w in c}; requires c full-dimensional."""
    if not c.is_full:
        raise ConeError("dual of a degenerate cone is not strongly convex")
    return Cone.from_rays(c.facets, c.d)


def minimal_face_containing(c: Cone, w: Sequence) -> Cone:
    if not c.contains(w):
        raise ConeError(f"{tuple(w)} is not in {c}")
    tight = [f for f in c.facets if dot(f, w) == 0]
    return c.face([r for r in c.rays if all(dot(f, r) == 0 for f in tight)]) if any(w) else zero_cone(c.d)


def dual_face(sigma: Cone, mu: Cone) -> Cone:
    """sigma^vee ∩ mu^perp."""
    if not sigma.is_face(mu):
        raise ConeError(f"{mu} is not a face of {sigma}")
    dual = dual_cone(sigma)
    return dual.face([a for a in dual.rays if all(dot(a, r) == 0 for r in mu.rays)])


def is_simplicial(c: Cone) -> bool:
    return len(c.rays) == c.dim


def is_smooth(c: Cone) -> bool:
    if not is_simplicial(c):
        return False
    k = c.dim
    if k == 0:
        return True
    g = 0
    for cols in combinations(range(c.d), k):
        g = math.gcd(g, det([[r[j] for j in cols] for r in c.rays]))
        if g == 1:
            return True
    return g == 1


def triangulate(c: Cone) -> list[tuple]:
    """Pulling triangulation into simplicial cones spanned by rays of c."""
    if is_simplicial(c):
        return [c.rays]
    apex = c.rays[0]
    out = []
    for f in c.facet_faces():
        if apex in f.rays:
            continue
        for simplex in triangulate(f):
            out.append((apex,) + simplex)
    return out


def cross_section_volume(c: Cone, height: Sequence) -> Fraction:
    """d! times the volume of c ∩ {height <= 1} (height positive on c)."""
    if not c.is_full:
        return Fraction(0)
    total = Fraction(0)
    for simplex in triangulate(c):
        den = 1
        for r in simplex:
            den *= dot(height, r)
        total += Fraction(abs(det(simplex)), den)
    return total


def psi_functional(tau: Cone) -> Vector:
    """The m in M_Q with (m, w_i) = 1 on every primitive ray of tau."""
    if not (tau.is_full and is_simplicial(tau)):
        raise ConeError("psi needs a simplicial full-dimensional cone")
    return normalize(solve(tau.rays, [1] * tau.d))


# ---------------------------------------------------------------------------
# fans


@dataclass(frozen=True)
class Fan:
    """A fan given by its maximal cones; faces are implied."""

    cones: tuple
    support: Cone | None = None

    def __post_init__(self):
        ds = {c.d for c in self.cones}
        if len(ds) > 1:
            raise ConeError("cones of a fan must share one lattice")

    @classmethod
    def from_cones(cls, cones: Iterable[Cone], support: Cone | None = None) -> "Fan":
        cones = list(cones)
        maximal = [c for c in cones if not any(c != o and o.is_face(c) for o in cones)]
        return cls(tuple(sorted(set(maximal), key=lambda c: c.rays)), support)

    @property
    def d(self) -> int:
        return self.cones[0].d

    @cached_property
    def all_cones(self) -> tuple:
        seen = {}
        for c in self.cones:
            for f in c.faces:
                seen.setdefault(f.rays, f)
        return tuple(sorted(seen.values(), key=lambda c: (c.dim, c.rays)))

    @cached_property
    def rays(self) -> tuple:
        return tuple(sorted({r for c in self.cones for r in c.rays}))

    def nondegenerate(self) -> list[Cone]:
        return [c for c in self.cones if c.is_full]


def _intersection(a: Cone, b: Cone) -> Cone:
    return Cone.from_inequalities(a.facets + b.facets, a.d, a.equations + b.equations)


def subdivision_violation(fan: Fan, base: Cone) -> str | None:
    """First violated fan/subdivision axiom, or None if fan subdivides base."""
    if not fan.cones:
        return "empty fan"
    if fan.d != base.d:
        return "dimension mismatch"
    for c in fan.cones:
        if not all(base.contains(r) for r in c.rays):
            return f"{c} is not contained in the base cone"
    for a, b in combinations(fan.cones, 2):
        meet = _intersection(a, b)
        if not (a.is_face(meet) and b.is_face(meet)):
            return f"{a} and {b} meet in {meet}, not a common face"
    if base.is_full:
        height = tuple(sum(col) for col in zip(*base.facets))
        covered = sum(cross_section_volume(c, height) for c in fan.cones)
        if covered != cross_section_volume(base, height):
            return "support differs from the base cone"
    elif set(fan.cones) != {base}:
        return "support differs from the base cone"
    return None


def validate_subdivision(fan: Fan, base: Cone) -> bool:
    return subdivision_violation(fan, base) is None


def _require_subdivision(fan: Fan, base: Cone) -> None:
    why = subdivision_violation(fan, base)
    if why is not None:
        raise SubdivisionError(why)


def is_moderate(fan: Fan, base: Cone) -> bool:
    _require_subdivision(fan, base)
    for tau in fan.nondegenerate():
        if not is_smooth(tau):
            return False
        psi = psi_functional(tau)
        if any(dot(psi, v) <= 0 for v in base.rays):
            return False
    return True


def gorenstein_functional(base: Cone) -> Vector | None:
    """m in M_Q with (m, v) = 1 on every primitive ray of base, if any."""
    sol = solve(base.rays, [1] * len(base.rays))
    return None if sol is None else normalize(sol)


def is_crepant(fan: Fan, base: Cone) -> bool:
    m = gorenstein_functional(base)
    if m is None:
        return False
    return all(dot(m, r) == 1 for r in fan.rays)


def hull_facets(points: Sequence[Sequence], rays: Sequence[Sequence], d: int) -> list[tuple[Vector, Fraction]]:
    """Facets (a, b) meaning a.x >= b of conv(points) + cone(rays)."""
    lifted = [tuple(p) + (1,) for p in (normalize(q) for q in points)]
    lifted += [tuple(r) + (0,) for r in rays]
    homog = Cone.from_rays([primitive_of(v) for v in lifted], d + 1)
    out = []
    for f in homog.facets:
        a, a0 = f[:d], f[d]
        if any(a):
            out.append((tuple(a), Fraction(-a0)))
    return out


def convex_moderate_check(fan: Fan, base: Cone, hilbert_basis_b: Iterable[Sequence]) -> bool:
    """Every maximal simplex tau ∩ {psi_tau = 1} lies on the boundary of
    conv(B minus 0) (= conv(Hilbert basis) + base)."""
    _require_subdivision(fan, base)
    facets = hull_facets([h for h in hilbert_basis_b if any(h)], base.rays, base.d)
    for tau in fan.nondegenerate():
        if not is_smooth(tau):
            return False
        if any(dot(a, r) < b for r in tau.rays for a, b in facets):
            return False
        if not any(all(dot(a, r) == b for r in tau.rays) for a, b in facets):
            return False
    return True


def polyhedron_vertices(
    ineqs: Sequence[tuple[Sequence, object]],
    eqs: Sequence[tuple[Sequence, object]],
    d: int,
) -> tuple[list[Vector], list[Vector]]:
    """Vertices and recession rays of {x : a.x >= b (ineqs), a.x = b (eqs)}.

    The polyhedron must be pointed.  Works on the homogenisation
    {(x, t) : a.x - b t >= 0, t >= 0}.
    """

    def lift(a, b) -> Vector:
        b = Fraction(b)
        row = [Fraction(x) for x in a] + [-b]
        return primitive_of(row) if any(row) else tuple(0 for _ in row)

    hin = [lift(a, b) for a, b in ineqs] + [tuple([0] * d + [1])]
    heq = [lift(a, b) for a, b in eqs]
    rays, lin = extreme_rays(hin, d + 1, heq)
    if lin:
        raise ConeError("polyhedron is not pointed")
    verts, rec = [], []
    for r in rays:
        if r[d] > 0:
            verts.append(normalize(tuple(Fraction(x, r[d]) for x in r[:d])))
        else:
            rec.append(tuple(r[:d]))
    return sorted(verts), sorted(rec)
