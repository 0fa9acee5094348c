"""Brute-force oracles used by the tests.

Nothing here calls the double description, simplex or Hilbert basis code of
the package; every answer comes from enumeration or subset solving.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from hypothesis import assume
from hypothesis import strategies as st


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def det(m):
    m = [[Fraction(x) for x in row] for row in m]
    n = len(m)
    sign = 1
    out = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            sign = -sign
        out *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return sign * out


def solve(a, b):
    """Cramer's rule; None if singular."""
    dd = det(a)
    if dd == 0:
        return None
    out = []
    for i in range(len(a)):
        mi = [row[:i] + [bi] + row[i + 1:] for row, bi in zip([list(r) for r in a], b)]
        out.append(det(mi) / dd)
    return tuple(out)


def primitive(v):
    v = [Fraction(x) for x in v]
    den = math.lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = math.gcd(*ints)
    return tuple(x // g for x in ints)


def mat_rank(rows):
    rows = [[Fraction(x) for x in r] for r in rows]
    rk = 0
    ncol = len(rows[0]) if rows else 0
    for c in range(ncol):
        p = next((r for r in range(rk, len(rows)) if rows[r][c] != 0), None)
        if p is None:
            continue
        rows[rk], rows[p] = rows[p], rows[rk]
        for r in range(len(rows)):
            if r != rk and rows[r][c] != 0:
                f = rows[r][c] / rows[rk][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rk])]
        rk += 1
    return rk


def kernel_line(rows, d):
    """A generator of the kernel of rows when it is one-dimensional."""
    if mat_rank(rows) != d - 1:
        return None
    for i in range(d):
        e = [0] * d
        e[i] = 1
        x = solve([list(r) for r in rows] + [e], [0] * (d - 1) + [1])
        if x is not None:
            return x
    return None


def brute_extreme_rays(ineqs, d):
    """Extreme rays of the pointed cone {x : f.x >= 0}: lines cut out by d-1
    independent tight constraints that satisfy the rest."""
    out = set()
    for sub in itertools.combinations(ineqs, d - 1):
        x = kernel_line(sub, d)
        if x is None:
            continue
        for s in (x, tuple(-t for t in x)):
            if all(dot(f, s) >= 0 for f in ineqs):
                out.add(primitive(s))
    return out


def brute_dual_rays(rays):
    return brute_extreme_rays([tuple(r) for r in rays], len(rays[0]))


def brute_facets(rays):
    """Facet normals of a full-dimensional cone given by generators."""
    d = len(rays[0])
    out = set()
    for sub in itertools.combinations(rays, d - 1):
        n = kernel_line(sub, d)
        if n is None:
            continue
        for s in (n, tuple(-t for t in n)):
            if all(dot(s, r) >= 0 for r in rays):
                out.add(primitive(s))
    return out


def brute_vertices(ineqs, d):
    """Vertices of {x : a.x >= b} from d-subsets of tight constraints."""
    out = set()
    for sub in itertools.combinations(ineqs, d):
        x = solve([list(a) for a, _ in sub], [b for _, b in sub])
        if x is not None and all(dot(a, x) >= b for a, b in ineqs):
            out.add(x)
    return out


def lattice_box(lo, hi):
    ranges = [range(math.floor(a), math.ceil(b) + 1) for a, b in zip(lo, hi)]
    return itertools.product(*ranges)


def cone_points_upto(rays, facets, height, bound):
    """Lattice points x of the cone with 0 < height.x <= bound."""
    d = len(rays[0])
    tips = [tuple(Fraction(bound, dot(height, r)) * x for x in r) for r in rays]
    lo = [min(0, *(t[i] for t in tips)) for i in range(d)]
    hi = [max(0, *(t[i] for t in tips)) for i in range(d)]
    out = []
    for p in lattice_box(lo, hi):
        h = dot(height, p)
        if 0 < h <= bound and all(dot(f, p) >= 0 for f in facets):
            out.append(p)
    return out


def brute_hilbert_basis(rays):
    """Irreducible lattice points of a full-dimensional pointed cone."""
    facets = sorted(brute_facets(rays))
    height = tuple(sum(c) for c in zip(*facets))
    bound = sum(dot(height, r) for r in rays)
    pts = cone_points_upto(rays, facets, height, bound)
    pset = set(pts)
    out = set()
    for p in pts:
        reducible = any(
            q != p and tuple(a - b for a, b in zip(p, q)) in pset for q in pts if dot(height, q) < dot(height, p)
        )
        if not reducible:
            out.add(p)
    return out


def brute_interior_lattice_point(sigma_rays, w, box):
    """All a in the box with a.v >= 1 for every ray v and a.w = 1."""
    lo, hi = box
    return [a for a in lattice_box(lo, hi) if dot(a, w) == 1 and all(dot(a, v) >= 1 for v in sigma_rays)]


def in_theta(a, sigma_rays, hb_dual):
    return any(all(dot(v, a) >= dot(v, h) for v in sigma_rays) for h in hb_dual)


def in_xi_brute(a, w, sigma_rays, hb_dual):
    """a in Xi_w straight from the definition: a in Theta, or a - m lies in
    the dual cone for some lattice m with m.w > 0 (all such m enumerated)."""
    if in_theta(a, sigma_rays, hb_dual):
        return True
    d = len(w)
    ineqs = [(tuple(-x for x in v), -dot(v, a)) for v in sigma_rays] + [(tuple(w), 0)]
    verts = brute_vertices(ineqs, d)
    lo = [min(v[i] for v in verts) for i in range(d)]
    hi = [max(v[i] for v in verts) for i in range(d)]
    for m in lattice_box(lo, hi):
        if dot(m, w) > 0 and all(dot(v, a) >= dot(v, m) for v in sigma_rays):
            return True
    return False


# ---------------------------------------------------------------------------
# strategies


def _is_pointed_full(rays):
    d = len(rays[0])
    if mat_rank(rays) != d:
        return False
    # pointed: some functional positive on all generators, found among facets
    facets = brute_facets(rays)
    if not facets:
        return False
    h = tuple(sum(c) for c in zip(*facets))
    return all(dot(h, r) > 0 for r in rays)


@st.composite
def cones_2d(draw, bound=6):
    vec = st.tuples(st.integers(-bound, bound), st.integers(-bound, bound))
    a = draw(vec)
    b = draw(vec)
    assume(a[0] * b[1] - a[1] * b[0] != 0)
    return [primitive(a), primitive(b)]


@st.composite
def cones_3d(draw, bound=3, max_rays=5):
    n = draw(st.integers(3, max_rays))
    vec = st.tuples(st.integers(-bound, bound), st.integers(-bound, bound), st.integers(1, bound))
    gens = draw(st.lists(vec, min_size=n, max_size=n))
    gens = [primitive(g) for g in gens]
    assume(_is_pointed_full(gens))
    rays = sorted(brute_extreme_rays(sorted(brute_facets(gens)), 3))
    return rays


@st.composite
def simplicial_3d(draw, bound=3):
    vec = st.tuples(st.integers(-bound, bound), st.integers(-bound, bound), st.integers(1, bound))
    gens = [primitive(g) for g in draw(st.lists(vec, min_size=3, max_size=3))]
    assume(det(gens) != 0)
    return gens


@st.composite
def small_cones(draw):
    if draw(st.booleans()):
        return draw(cones_2d())
    return draw(cones_3d())


def _solve_unique(cols, rhs):
    """Solve sum x_j cols_j = rhs for linearly independent cols; None if
    inconsistent."""
    n = len(cols)
    rows = [[Fraction(c[i]) for c in cols] + [Fraction(rhs[i])] for i in range(len(rhs))]
    r = 0
    piv = []
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            return None
        rows[r], rows[p] = rows[p], rows[r]
        rows[r] = [x / rows[r][c] for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
    if any(row[n] != 0 for row in rows[r:]):
        return None
    return [rows[i][n] for i in range(n)]


def in_hull(p, pts):
    """p in conv(pts), by Caratheodory over affinely independent subsets."""
    pts = [tuple(q) for q in pts]
    if tuple(p) in pts:
        return True
    k = len(p)
    lifted = {q: tuple(q) + (1,) for q in pts}
    target = tuple(p) + (1,)
    for size in range(2, min(k + 1, len(pts)) + 1):
        for sub in itertools.combinations(pts, size):
            cols = [lifted[q] for q in sub]
            if mat_rank(cols) != size:
                continue
            lam = _solve_unique(cols, target)
            if lam is not None and all(x >= 0 for x in lam):
                return True
    return False


def hull_vertices(pts):
    pts = sorted(set(tuple(q) for q in pts))
    return {p for p in pts if not in_hull(p, [q for q in pts if q != p])}
