"""The fan Delta of the normalized limit F-blowup, computed from Xi sets.

Every set involved is cut out by inequalities v.x >= const with v a ray of
sigma: the dual cone itself, its translates by Hilbert basis elements and
its translates by the short vectors m.  In the coordinates y_v = v.x these
are orthants, so the complement of Theta is a union of half-open boxes and
Xi_w restricted to it is a union of finer boxes.  That turns the whole
computation into exact comparisons of integer vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Sequence

from .cones import (
    Cone,
    ConeError,
    Fan,
    cross_section_volume,
    dual_cone,
    is_simplicial,
    polyhedron_vertices,
    subdivision_violation,
)
from .lattice import Vector, box_points, dot, inverse, lattice_ball, matvec, norm_sq, normalize, primitive_of, sub
from .lp import OPTIMAL, linprog
from .monoid import HilbertBasis, default_height, hilbert_basis


class BudgetExceeded(RuntimeError):
    pass


class InvariantViolation(RuntimeError):
    pass


DEFAULT_CELL_BUDGET = 200_000


# ---------------------------------------------------------------------------
# box cells


@dataclass(frozen=True)
class Cell:
    """{x : lo_v <= v.x < hi_v for each ray v}; hi None means unbounded."""

    lo: tuple
    hi: tuple

    def halfspaces(self, coords: Sequence[Vector]) -> list[tuple[Vector, Fraction]]:
        out = [(v, lo) for v, lo in zip(coords, self.lo)]
        out += [(tuple(-x for x in v), -hi) for v, hi in zip(coords, self.hi) if hi is not None]
        return out

    def covered_by(self, y: Sequence) -> bool:
        """Is the cell inside the orthant {y' >= y}?"""
        return all(lo >= t for lo, t in zip(self.lo, y))


def _nonempty(coords: Sequence[Vector], lo: Sequence, hi: Sequence, d: int) -> bool:
    """Is {lo <= v.x < hi} nonempty?  (hi entries may be None.)"""
    a_ub, b_ub = [], []
    for v, l, h in zip(coords, lo, hi):
        a_ub.append([-x for x in v] + [0])
        b_ub.append(-l)
        if h is not None:
            a_ub.append(list(v) + [1])
            b_ub.append(h)
    a_ub.append([0] * d + [1])
    b_ub.append(1)
    res = linprog([0] * d + [1], a_ub, b_ub)
    return res.status == OPTIMAL and res.value > 0


def _intervals(points: Iterable) -> list[tuple]:
    pts = sorted(set(points))
    return [(a, b) for a, b in zip(pts, pts[1:])] + [(pts[-1], None)]


def _boxes(coords, intervals, d, simplicial, keep):
    """Nonempty boxes of the product of per-coordinate intervals, pruned by
    LP feasibility of partial boxes when the coordinates are dependent."""
    if simplicial:
        for choice in product(*intervals):
            cell = Cell(tuple(c[0] for c in choice), tuple(c[1] for c in choice))
            if keep(cell):
                yield cell
        return
    n = len(coords)

    def rec(i, lo, hi):
        if i == n:
            cell = Cell(tuple(lo), tuple(hi))
            if keep(cell):
                yield cell
            return
        for a, b in intervals[i]:
            if _nonempty(coords[: i + 1], lo + [a], hi + [b], d):
                yield from rec(i + 1, lo + [a], hi + [b])

    yield from rec(0, [], [])


# ---------------------------------------------------------------------------
# Theta and D


@dataclass(eq=False)
class ThetaData:
    hilbert_A: HilbertBasis
    complement_cells: tuple
    diameter_sq: Fraction
    m_le_d: tuple
    sigma: Cone = field(repr=False)
    cell_budget: int = field(default=DEFAULT_CELL_BUDGET, repr=False)

    @property
    def coords(self) -> tuple:
        return self.sigma.rays

    def y(self, x: Sequence) -> tuple:
        return tuple(dot(v, x) for v in self.coords)

    def cell_vertices(self, cell: Cell) -> list[Vector]:
        """Vertices of the closure of a bounded cell."""
        if is_simplicial(self.sigma):
            vinv = self._vinv
            corners = product(*zip(cell.lo, cell.hi))
            return [normalize(matvec(vinv, c)) for c in corners]
        closed = Cell(cell.lo, cell.hi)
        verts, rec = polyhedron_vertices(closed.halfspaces(self.coords), [], self.sigma.d)
        if rec:
            raise InvariantViolation("unbounded cell in the complement of Theta")
        return verts

    @cached_property
    def _vinv(self):
        return inverse([list(v) for v in self.coords])

    @cached_property
    def relevant_m(self) -> tuple:
        """Nonzero m in M_{<=D} whose orthant meets the complement of Theta."""
        out = []
        for m in self.m_le_d:
            if not any(m):
                continue
            ym = self.y(m)
            if any(all(h is None or h > t for h, t in zip(c.hi, ym)) for c in self.complement_cells):
                out.append(m)
        return tuple(out)

    @cached_property
    def refined_cells(self) -> tuple:
        """Complement cells cut further at every y_v(m), m relevant."""
        n = len(self.coords)
        cuts = [set() for _ in range(n)]
        for m in self.relevant_m:
            for i, t in enumerate(self.y(m)):
                if t > 0:
                    cuts[i].add(t)
        simplicial = is_simplicial(self.sigma)
        out = []
        for cell in self.complement_cells:
            ivs = [_intervals([lo] + [t for t in cuts[i] if lo < t and (hi is None or t < hi)]) for i, (lo, hi) in enumerate(zip(cell.lo, cell.hi))]
            # the last interval of each refined coordinate must end at hi
            ivs = [[(a, b if b is not None else cell.hi[i]) for a, b in iv] for i, iv in enumerate(ivs)]
            for sub_cell in _boxes(self.coords, ivs, self.sigma.d, simplicial, lambda c: True):
                out.append(sub_cell)
                if len(out) > self.cell_budget:
                    raise BudgetExceeded(f"more than {self.cell_budget} refined cells")
        return tuple(sorted(out, key=lambda c: c.lo))

    @cached_property
    def cell_index(self) -> dict:
        return {c.lo: i for i, c in enumerate(self.refined_cells)}

    @cached_property
    def masks(self) -> dict:
        """Bitmask of refined cells lying in (dual cone) + m, per relevant m."""
        out = {}
        for m in self.relevant_m:
            ym = self.y(m)
            mask = 0
            for i, c in enumerate(self.refined_cells):
                if c.covered_by(ym):
                    mask |= 1 << i
            out[m] = mask
        return out

    def in_theta(self, x: Sequence) -> bool:
        yx = self.y(x)
        return any(all(s >= t for s, t in zip(yx, self.y(a))) for a in self.hilbert_A)

    def floor_cell(self, x: Sequence) -> int | None:
        """Index of the refined cell containing x, if x is in the complement."""
        yx = self.y(x)
        if any(t < 0 for t in yx) or self.in_theta(x):
            return None
        lo = []
        for i, t in enumerate(yx):
            cands = [c.lo[i] for c in self.refined_cells if c.lo[i] <= t]
            lo.append(max(cands))
        return self.cell_index.get(tuple(lo))


def theta_and_diameter(A: Cone, cell_budget: int = DEFAULT_CELL_BUDGET) -> ThetaData:
    if not A.is_full:
        raise ConeError("the dual cone must be full-dimensional")
    sigma = dual_cone(A)
    hb = hilbert_basis(A)
    coords = sigma.rays
    ys = [tuple(dot(v, a) for v in coords) for a in hb]
    intervals = [_intervals([0] + [y[i] for y in ys]) for i in range(len(coords))]
    count = 1
    for iv in intervals:
        count *= len(iv)
    if count > cell_budget:
        raise BudgetExceeded(f"{count} cells exceed the budget of {cell_budget}")

    def out(cell: Cell) -> bool:
        return not any(cell.covered_by(y) for y in ys)

    cells = tuple(_boxes(coords, intervals, A.d, is_simplicial(sigma), out))
    if is_simplicial(sigma) and any(h is None for c in cells for h in c.hi):
        raise InvariantViolation("unbounded cell in the complement of Theta")
    theta = ThetaData(hb, cells, Fraction(0), (), sigma, cell_budget)
    verts = sorted({v for c in cells for v in theta.cell_vertices(c)})
    diam = max((norm_sq(sub(p, q)) for p, q in combinations(verts, 2)), default=0)
    theta.diameter_sq = Fraction(diam)
    theta.m_le_d = tuple(lattice_ball(diam, A.d))
    return theta


# ---------------------------------------------------------------------------
# hyperplane arrangements


def hyperplanes(ms: Iterable[Sequence], sigma: Cone) -> list[Vector]:
    """Distinct hyperplanes m^perp (up to sign) meeting the interior of sigma."""
    out = set()
    for m in ms:
        if not any(m):
            continue
        p = primitive_of(m)
        vals = [dot(p, r) for r in sigma.rays]
        if min(vals) < 0 < max(vals):
            p = max(p, tuple(-x for x in p))
            out.add(p)
    return sorted(out)


def split_cone(c: Cone, m: Sequence) -> list[Cone]:
    vals = [dot(m, r) for r in c.rays]
    if min(vals) >= 0 or max(vals) <= 0:
        return [c]
    pos = [r for r, v in zip(c.rays, vals) if v > 0]
    neg = [r for r, v in zip(c.rays, vals) if v < 0]
    zero = [r for r, v in zip(c.rays, vals) if v == 0]
    cut = [tuple(dot(m, p) * a - dot(m, n) * b for a, b in zip(n, p)) for p in pos for n in neg]
    return [Cone.from_rays(pos + zero + cut, c.d), Cone.from_rays(neg + zero + cut, c.d)]


def arrangement(base: Cone, planes: Sequence[Sequence]) -> list[Cone]:
    """Full-dimensional chambers of base cut by the given hyperplanes."""
    cones = [base]
    for m in planes:
        cones = [piece for c in cones for piece in split_cone(c, m)]
    return sorted(cones, key=lambda c: c.rays)


def delta_star(sigma: Cone, m_le_d: Iterable[Sequence]) -> Fan:
    return Fan.from_cones(arrangement(sigma, hyperplanes(m_le_d, sigma)), sigma)


def local_delta_star(sigma: Cone, w: Sequence, m_le_d: Iterable[Sequence]) -> Fan:
    """The chambers of Delta* whose closure contains w."""
    ms = [tuple(m) for m in m_le_d if any(m)]
    ineqs = list(sigma.facets) + [m if dot(m, w) > 0 else tuple(-x for x in m) for m in ms if dot(m, w) != 0]
    star = Cone.from_inequalities(ineqs, sigma.d)
    if not star.is_full:
        raise ConeError(f"{tuple(w)} is not in the cone")
    through = hyperplanes([m for m in ms if dot(m, w) == 0], star)
    return Fan.from_cones(arrangement(star, through), sigma)


# ---------------------------------------------------------------------------
# fingerprints


@dataclass(frozen=True)
class XiFingerprint:
    chamber_id: object
    positive_set: frozenset
    covered_cells: frozenset


def _require_general(w: Sequence, theta: ThetaData) -> None:
    if any(any(m) and dot(m, w) == 0 for m in theta.m_le_d):
        raise ConeError(f"{tuple(w)} is not general")


def _covered_mask(w: Sequence, theta: ThetaData) -> int:
    mask = 0
    for m, bits in theta.masks.items():
        if dot(m, w) > 0:
            mask |= bits
    return mask


def xi_fingerprint(chamber_witness: Sequence, theta: ThetaData, chamber_id=None) -> XiFingerprint:
    _require_general(chamber_witness, theta)
    pos = frozenset(m for m in theta.m_le_d if dot(m, chamber_witness) > 0)
    mask = _covered_mask(chamber_witness, theta)
    cells = frozenset(i for i in range(len(theta.refined_cells)) if mask >> i & 1)
    return XiFingerprint(chamber_id, pos, cells)


def xi_grid_oracle(w: Sequence, l: int, window: tuple[Sequence, Sequence], theta: ThetaData) -> set:
    """Points of (1/l)M in the window that lie in Xi_w, straight from the
    definition."""
    _require_general(w, theta)
    lo, hi = window
    pos = [m for m in theta.m_le_d if dot(m, w) > 0]
    sigma = theta.sigma
    out = set()
    for p in box_points([Fraction(x) * l for x in lo], [Fraction(x) * l for x in hi]):
        a = tuple(Fraction(x, l) for x in p)
        if not all(dot(v, a) >= 0 for v in sigma.rays):
            continue
        if theta.in_theta(a) or any(all(dot(v, a) >= dot(v, m) for v in sigma.rays) for m in pos):
            out.add(normalize(a))
    return out


def complement_window(theta: ThetaData) -> tuple[tuple, tuple]:
    """Bounding box of the closure of the complement of Theta."""
    verts = [v for c in theta.complement_cells for v in theta.cell_vertices(c)]
    d = theta.sigma.d
    return (tuple(min(v[i] for v in verts) for i in range(d)), tuple(max(v[i] for v in verts) for i in range(d)))


# ---------------------------------------------------------------------------
# Delta


def _facet_keys(c: Cone) -> list[tuple]:
    return [f.rays for f in c.facet_faces()]


def delta_fan(sigma: Cone, cell_budget: int = DEFAULT_CELL_BUDGET, theta: ThetaData | None = None) -> Fan:
    """Delta from chambers with equal Xi sets.

    Only the hyperplanes m^perp with m able to change a fingerprint are used;
    the remaining ones of Delta* would only split chambers further without
    changing any fingerprint.
    """
    if not sigma.is_full:
        raise ConeError("delta_fan needs a full-dimensional cone")
    theta = theta_and_diameter(dual_cone(sigma), cell_budget) if theta is None else theta
    planes = hyperplanes(theta.relevant_m, sigma)
    chambers = arrangement(sigma, planes)
    if len(chambers) > cell_budget:
        raise BudgetExceeded(f"{len(chambers)} chambers exceed the budget of {cell_budget}")
    keys = [_covered_mask(c.interior_point, theta) for c in chambers]

    parent = list(range(len(chambers)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    by_facet: dict[tuple, list[int]] = {}
    for i, c in enumerate(chambers):
        for k in _facet_keys(c):
            by_facet.setdefault(k, []).append(i)
    for idx in by_facet.values():
        for i, j in combinations(idx, 2):
            if keys[i] == keys[j]:
                parent[find(i)] = find(j)

    groups: dict[int, list[int]] = {}
    for i in range(len(chambers)):
        groups.setdefault(find(i), []).append(i)
    seen_keys: dict[int, int] = {}
    for root, members in groups.items():
        if keys[members[0]] in seen_keys:
            raise InvariantViolation("one Xi set on two separate regions")
        seen_keys[keys[members[0]]] = root

    height = default_height(sigma)
    merged = []
    for members in groups.values():
        hull = Cone.from_rays([r for i in members for r in chambers[i].rays], sigma.d)
        vol = sum(cross_section_volume(chambers[i], height) for i in members)
        if cross_section_volume(hull, height) != vol:
            raise InvariantViolation("a merged region is not convex")
        merged.append(hull)
    fan = Fan.from_cones(merged, sigma)
    why = subdivision_violation(fan, sigma)
    if why is not None:
        raise InvariantViolation(why)
    return fan


def in_xi(a: Sequence, w: Sequence, theta: ThetaData) -> bool:
    """Membership of a point of the dual cone in Xi_w (w general)."""
    _require_general(w, theta)
    if not all(dot(v, a) >= 0 for v in theta.coords):
        raise ConeError(f"{tuple(a)} is not in the dual cone")
    if theta.in_theta(a):
        return True
    ya = theta.y(a)
    return any(dot(m, w) > 0 and all(s >= t for s, t in zip(ya, theta.y(m))) for m in theta.m_le_d)


def general_perturbation(w: Sequence, b: Sequence, theta: ThetaData, delta=Fraction(1, 64)) -> tuple:
    """w + delta b for the first delta in delta, delta/2, ... that is general."""
    delta = Fraction(delta)
    for _ in range(64):
        u = normalize(tuple(x + delta * y for x, y in zip(w, b)))
        if not any(any(m) and dot(m, u) == 0 for m in theta.m_le_d):
            return u
        delta /= 2
    raise ConeError("no general perturbation found")


def general_point(c: Cone, theta: ThetaData) -> tuple:
    """An integer point in the interior of a full-dimensional cone avoiding
    every hyperplane m^perp, m in M_{<=D}."""
    base = c.interior_point
    ms = [m for m in theta.m_le_d if any(m)]
    for n in range(1, 10_000):
        for r in c.rays:
            u = tuple(n * x + y for x, y in zip(base, r))
            if c.contains_relint(u) and not any(dot(m, u) == 0 for m in ms):
                return u
    raise ConeError("no general point found")
