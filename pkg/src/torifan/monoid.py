"""Hilbert bases, the cone order, minimal elements of S_sigma and the
divisor classification table."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .cones import Cone, ConeError, Fan, is_smooth, triangulate, _hnf_rows
from .lattice import (
    Vector,
    box_points,
    dot,
    hermite_lower,
    inverse,
    is_primitive,
    matvec,
    solve,
    sub,
)


@dataclass(frozen=True)
class HilbertBasis:
    cone: Cone
    elements: tuple

    def __contains__(self, v) -> bool:
        return tuple(v) in self.elements

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)


def parallelepiped_points(gens: Sequence[Vector]) -> list[Vector]:
    """Lattice points sum(t_i g_i) with 0 <= t_i < 1 for independent gens."""
    d = len(gens[0])
    basis = _hnf_rows(list(gens), d)
    k = len(basis)
    if k != len(gens):
        raise ConeError("generators are not linearly independent")
    # coordinates of each generator in the saturated basis, as columns
    bt = [list(col) for col in zip(*basis)]  # d x k
    cols = [[int(x) for x in solve(bt, g)] for g in gens]
    h = hermite_lower(cols)
    w = [[cols[j][i] for j in range(k)] for i in range(k)]
    winv = inverse(w)
    out = []
    for x in box_points([0] * k, [h[i][i] - 1 for i in range(k)]):
        lam = matvec(winv, x)
        frac = [t - (t.numerator // t.denominator) for t in lam]
        coords = [sum(frac[j] * cols[j][i] for j in range(k)) for i in range(k)]
        p = tuple(int(sum(coords[i] * basis[i][c] for i in range(k))) for c in range(d))
        out.append(p)
    return sorted(set(out))


def cone_leq(c: Cone, w: Sequence, w2: Sequence) -> bool:
    """w <= w2 in the order induced by c, i.e. w2 - w in c."""
    return c.contains(sub(w2, w))


def _irreducible(c: Cone, candidates: Iterable[Vector]) -> list[Vector]:
    cands = sorted(set(candidates))
    return [x for x in cands if not any(h != x and c.contains(sub(x, h)) for h in cands)]


def hilbert_basis(c: Cone) -> HilbertBasis:
    """Minimal generating set of c ∩ Z^d."""
    if not c.rays:
        return HilbertBasis(c, ())
    cands = set(c.rays)
    for simplex in triangulate(c):
        cands.update(p for p in parallelepiped_points(simplex) if any(p))
    return HilbertBasis(c, tuple(_irreducible(c, cands)))


# ---------------------------------------------------------------------------
# S_sigma


def default_height(sigma: Cone) -> Vector:
    """Sum of facet normals: an integer functional positive on sigma minus 0."""
    return tuple(sum(col) for col in zip(*sigma.facets))


def generator_height(sigma: Cone, height: Sequence | None = None) -> int:
    height = default_height(sigma) if height is None else height
    return sum(dot(height, r) for r in sigma.rays)


def cone_points(sigma: Cone, height: Sequence, bound) -> list[Vector]:
    """Lattice points p of sigma with 0 < height(p) <= bound."""
    verts = [tuple(Fraction(bound) * x / dot(height, r) for x in r) for r in sigma.rays]
    lo = [min(0, *(v[i] for v in verts)) for i in range(sigma.d)]
    hi = [max(0, *(v[i] for v in verts)) for i in range(sigma.d)]
    out = []
    for p in box_points(lo, hi):
        hp = dot(height, p)
        if 0 < hp <= bound and sigma.contains(p):
            out.append(p)
    return out


class MinimalSSigma(NamedTuple):
    elements: tuple
    certified: bool
    height_bound: int


def minimal_s_sigma(sigma: Cone, height_bound: int | None = None) -> MinimalSSigma:
    """Minimal elements of S_sigma (lattice points in relative interiors of
    singular faces) among points of height <= height_bound.

    A minimal element p sits in some simplex of a triangulation of its face
    with all barycentric coefficients in (0, 1]; otherwise subtracting the
    integer parts gives a smaller point of the same open face.  Hence its
    height is at most the height of the sum of the rays of sigma, and any
    bound at least that large certifies the result.
    """
    if not sigma.is_full:
        raise ConeError("S_sigma needs a full-dimensional cone")
    height = default_height(sigma)
    gen_h = generator_height(sigma, height)
    bound = 2 * gen_h if height_bound is None else int(height_bound)
    smooth_by_mask: dict[int, bool] = {}

    def in_s(p: Vector) -> bool:
        mask = sum(1 << i for i, f in enumerate(sigma.facets) if dot(f, p) == 0)
        if mask not in smooth_by_mask:
            face = sigma.face([r for r in sigma.rays if all(dot(f, r) == 0 for i, f in enumerate(sigma.facets) if mask >> i & 1)])
            smooth_by_mask[mask] = is_smooth(face)
        return not smooth_by_mask[mask]

    pts = sorted((dot(height, p), p) for p in cone_points(sigma, height, bound) if in_s(p))
    minimal: list[Vector] = []
    for _, p in pts:
        if not any(sigma.contains(sub(p, m)) for m in minimal):
            minimal.append(p)
    return MinimalSSigma(tuple(sorted(minimal)), bound >= gen_h, bound)


# ---------------------------------------------------------------------------
# divisor table


@dataclass
class DivisorRecord:
    ray_primitive: tuple
    is_ray_of_sigma: bool
    in_hilbert_basis_B: bool
    bgs_essential: bool
    essential: bool | None
    sufficient_condition: bool
    witness: tuple | None = None
    arrow_dim_bound: int | None = None
    in_delta: bool | None = None


def classify_divisors(
    sigma: Cone,
    rays: Iterable[Sequence[int]],
    hb: HilbertBasis | None = None,
    s_min: MinimalSSigma | None = None,
    delta: Fan | None = None,
) -> list[DivisorRecord]:
    from .level import ray_sufficient_test

    hb = hilbert_basis(sigma) if hb is None else hb
    s_min = minimal_s_sigma(sigma) if s_min is None else s_min
    height = default_height(sigma)
    records = []
    for r in rays:
        r = tuple(r)
        if not is_primitive(r):
            raise ConeError(f"{r} is not primitive")
        if not sigma.contains(r):
            raise ConeError(f"{r} is not in the cone")
        own_ray = r in sigma.rays
        if r in s_min.elements:
            essential = True
        elif s_min.certified or dot(height, r) <= s_min.height_bound:
            essential = False
        else:
            essential = None
        test = ray_sufficient_test(sigma, r)
        records.append(
            DivisorRecord(
                ray_primitive=r,
                is_ray_of_sigma=own_ray,
                in_hilbert_basis_B=r in hb,
                bgs_essential=r in hb,
                essential=essential,
                sufficient_condition=test.holds,
                witness=test.witness,
                in_delta=None if delta is None else r in delta.rays,
            )
        )
    return records
