"""Tie-breakers, critical arrows and the dimension bound they give.

All searches run in the quotient lattice M / (mu^perp ∩ M), where the level
slices are polytopes.  Arrows found there are lifted back by adding a
multiple of an interior lattice point of the dual face.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .cones import Cone, ConeError, Fan, dual_cone, dual_face, minimal_face_containing, polyhedron_vertices
from .level import LevelPolyhedron, level_polyhedron, project_slice, scale_level
from .lattice import (
    QuotientLattice,
    Vector,
    add,
    box_points,
    dot,
    is_integral,
    lattice_ball,
    norm_sq,
    normalize,
    quotient_lattice,
    rank,
    scale,
    sub,
)
from .lp import OPTIMAL, integer_point, linprog


class NonUniqueMinimum(ConeError):
    pass


@dataclass(frozen=True)
class Arrow:
    head: tuple
    tail: tuple
    vector: tuple
    integral: bool
    level: Fraction | None = None

    @classmethod
    def make(cls, head: Sequence, tail: Sequence, level=None) -> "Arrow":
        head, tail = normalize(head), normalize(tail)
        if head == tail:
            raise ValueError("head and tail coincide")
        v = normalize(sub(head, tail))
        return cls(head, tail, v, is_integral(v), None if level is None else Fraction(level))


@dataclass(frozen=True)
class TieBreaker:
    weight: tuple
    vector: tuple
    chamber_witness: tuple
    cone: Cone = field(repr=False, compare=False)


@dataclass(frozen=True)
class CriticalCertificate:
    arrow: Arrow
    tie_breaker: TieBreaker
    level_c: Fraction
    no_lower_point_proof: tuple
    unique_min_proof: tuple


# ---------------------------------------------------------------------------
# tie-breakers


def _slack_lp(w, facets, separations, d):
    """Maximise t over b with b.w = 0, f.(w + b) >= t, s.b >= t, |b_i| <= 1."""
    a_ub, b_ub = [], []
    for f in facets:
        a_ub.append([-x for x in f] + [1])
        b_ub.append(dot(f, w))
    for s in separations:
        a_ub.append([-x for x in s] + [1])
        b_ub.append(0)
    for i in range(d):
        e = [0] * (d + 1)
        e[i] = 1
        a_ub.append(e)
        b_ub.append(1)
        a_ub.append([-x for x in e])
        b_ub.append(1)
    a_ub.append([0] * d + [1])
    b_ub.append(1)
    res = linprog([0] * d + [1], a_ub, b_ub, [list(w) + [0]], [0])
    if res.status != OPTIMAL or res.value <= 0:
        return None
    return normalize(res.x[:d])


def _iter_tie_breakers(w: tuple, delta_star: Fan, level: LevelPolyhedron | None):
    chambers = [c for c in delta_star.nondegenerate() if c.contains(w)]
    if not chambers:
        raise ConeError(f"{w} is not in the support of the fan")
    sigma = delta_star.support if delta_star.support is not None else chambers[0]
    d = len(w)
    for ch in chambers:
        witness = normalize(ch.interior_point)
        if ch.contains_relint(w) and level is None:
            yield TieBreaker(w, (0,) * d, witness, sigma)
            continue
        if level is None:
            targets = [[]]
        else:
            targets = []
            for p in level.vertices:
                seps = [sub(q, p) for q in level.vertices if q != p] + list(level.recession_generators)
                targets.append(seps)
        for seps in targets:
            b = _slack_lp(w, ch.facets, seps, d)
            if b is not None:
                yield TieBreaker(w, b, witness, sigma)


def tie_breakers(w: Sequence[int], delta_star: Fan, level: LevelPolyhedron | None = None) -> list[TieBreaker]:
    """Tie-breakers of w, one per adjacent chamber of delta_star.

    With ``level`` given, each chamber is asked for one tie-breaker per
    vertex of the slice that makes that vertex the unique minimum, when
    such a b exists.
    """
    out: dict[tuple, TieBreaker] = {}
    for tb in _iter_tie_breakers(tuple(w), delta_star, level):
        out.setdefault(tb.vector, tb)
    return [out[k] for k in sorted(out)]


def b_min_vertex(L: LevelPolyhedron, b) -> tuple[tuple, bool] | None:
    vec = b.vector if isinstance(b, TieBreaker) else tuple(b)
    if isinstance(b, TieBreaker) and tuple(b.weight) != tuple(L.weight):
        raise ConeError("tie-breaker weight does not match the slice")
    if any(dot(vec, r) < 0 for r in L.recession_generators):
        return None
    vals = [(dot(vec, v), v) for v in L.vertices]
    best = min(x for x, _ in vals)
    argmin = [v for x, v in vals if x == best]
    flat = any(dot(vec, r) == 0 for r in L.recession_generators)
    return argmin[0], len(argmin) == 1 and not flat


# ---------------------------------------------------------------------------
# critical arrows


@dataclass
class _Setup:
    sigma: Cone
    mu: Cone
    q: QuotientLattice
    rows: list
    wbar: tuple
    slice1: LevelPolyhedron


def _setup(sigma: Cone, w: Sequence) -> _Setup:
    A = dual_cone(sigma)
    mu = minimal_face_containing(sigma, w)
    q = quotient_lattice(mu.rays, sigma.d)
    return _Setup(sigma, mu, q, [q.dual_functional(v) for v in mu.rays], q.dual_functional(w), level_polyhedron(A, w, 1))


def _min_level(rows, pbar, v) -> Fraction | None:
    """Least c >= 0 with c*pbar + v in the image of the dual cone."""
    c = Fraction(0)
    for r in rows:
        rp, rv = dot(r, pbar), dot(r, v)
        if rv >= 0:
            continue
        if rp == 0:
            return None
        c = max(c, Fraction(-rv) / rp)
    return c


def _lower_point(s: _Setup, pbar, c: Fraction, n: int) -> tuple | None:
    """A quotient lattice vector x with w(x) = -n and c*pbar + x in the cone."""
    rhs = [c * dot(r, pbar) for r in s.rows]
    return integer_point([[-x for x in r] for r in s.rows], rhs, [s.wbar], [-n], n=s.q.rank)


def _lift_vector(s: _Setup, tail: Sequence, vbar: Sequence) -> Vector:
    v = s.q.lift(vbar)
    outside = [r for r in s.sigma.rays if r not in s.mu.rays]
    if not outside:
        return v
    u = dual_face(s.sigma, s.mu).interior_point
    n = 0
    for r in outside:
        gap = -dot(r, add(tail, v))
        if gap > 0:
            n = max(n, math.ceil(gap / dot(u, r)))
    return add(v, scale(n, u))


def _candidates(s: _Setup, bound, avoid: list) -> list[Vector]:
    k = s.q.rank
    out = []
    for v in lattice_ball(bound, k):
        if not any(v) or dot(s.wbar, v) != 0:
            continue
        if avoid and rank(avoid + [v]) == rank(avoid):
            continue
        out.append(v)
    return out


def _default_bound(s: _Setup, pbar, avoid: list) -> Fraction | None:
    verts = project_slice(s.slice1, s.mu).polytope_vertices
    diam = max((norm_sq(sub(a, b)) for a in verts for b in verts), default=0)
    r = 1
    while r <= 1 << 20:
        levels = [c for c in (_min_level(s.rows, pbar, v) for v in _candidates(s, r, avoid)) if c is not None]
        if levels:
            c0 = min(levels)
            return max(Fraction(r), c0 * c0 * diam)
        r *= 2
    return None


def critical_arrows_at(
    w: Sequence[int],
    b: TieBreaker,
    search_norm_bound=None,
    avoid: Iterable[Sequence] = (),
) -> list[CriticalCertificate]:
    """Critical arrows with tail c*P, P the b-minimal vertex of the level 1
    slice and c* the least level carrying an integral arrow from c*P.

    Candidate vectors live in the quotient lattice and are bounded by
    ``search_norm_bound`` (squared norm in quotient coordinates); the default
    is the squared diameter of the projected slice at the first level where
    a candidate appears.  ``avoid`` excludes vectors whose image lies in the
    span of the given quotient vectors.
    """
    w = tuple(w)
    s = _setup(b.cone, w)
    found = b_min_vertex(s.slice1, b)
    if found is None or not found[1]:
        raise NonUniqueMinimum(f"{b.vector} does not single out a vertex")
    p = found[0]
    pbar = s.q.project(p)
    avoid = [tuple(a) for a in avoid]
    if s.q.rank <= 1:
        return []
    bound = _default_bound(s, pbar, avoid) if search_norm_bound is None else Fraction(search_norm_bound)
    cands = [] if bound is None else _candidates(s, bound, avoid)
    levels = [(c, v) for v, c in ((v, _min_level(s.rows, pbar, v)) for v in cands) if c is not None]
    if not levels:
        if search_norm_bound is not None:
            raise ConeError("no candidate vector under the norm bound")
        return []
    cstar = min(c for c, _ in levels)
    proof = []
    for n in range(1, math.floor(cstar) + 1):
        if _lower_point(s, pbar, cstar, n) is not None:
            return []
        proof.append((cstar - n, "infeasible"))
    top = scale_level(s.slice1, cstar)
    vert, unique = b_min_vertex(top, b)
    tail = normalize(scale(cstar, p))
    if not unique or vert != tail:
        return []
    others = tuple((q, dot(b.vector, q)) for q in top.vertices if q != tail)
    umin = ((tail, dot(b.vector, tail)),) + others
    out = []
    for c, vbar in sorted(levels):
        if c != cstar:
            continue
        vec = _lift_vector(s, tail, vbar)
        arrow = Arrow.make(add(tail, vec), tail, cstar)
        out.append(CriticalCertificate(arrow, b, cstar, tuple(proof), umin))
    for cert in out:
        why = certificate_violation(cert)
        if why is not None:
            raise AssertionError(f"search produced an invalid certificate: {why}")
    return out


def search_critical_arrows(
    sigma: Cone, w: Sequence[int], m_le_d: Iterable[Sequence], norm_bound=None
) -> list[CriticalCertificate]:
    """Collect critical arrows with independent quotient vectors, trying every
    tie-breaker that isolates a vertex, until dim(mu) - 1 are found or no
    tie-breaker adds a new direction."""
    from .deltafan import local_delta_star

    w = tuple(w)
    s = _setup(sigma, w)
    goal = s.mu.dim - 1
    if goal <= 0:
        return []
    # tie-breakers are produced lazily; the first few usually suffice
    stream = _iter_tie_breakers(w, local_delta_star(sigma, w, m_le_d), s.slice1)
    seen: set = set()

    def useful():
        for t in stream:
            if t.vector in seen:
                continue
            seen.add(t.vector)
            r = b_min_vertex(s.slice1, t)
            if r is not None and r[1]:
                tried.append(t)
                yield t

    tried: list[TieBreaker] = []
    certs: list[CriticalCertificate] = []
    span: list[Vector] = []
    progress = True
    passes = 0
    while progress and len(span) < goal:
        progress = False
        # later passes revisit old tie-breakers with the enlarged avoid set
        for tb in itertools.chain(list(tried) if passes else (), useful()):
            for cert in critical_arrows_at(w, tb, norm_bound, avoid=span):
                vbar = s.q.project(cert.arrow.vector)
                if rank(span + [vbar]) > len(span):
                    span.append(vbar)
                    certs.append(cert)
                    progress = True
            if len(span) >= goal:
                break
        passes += 1
    return certs


def min_cone_dim_bound(w: Sequence[int], certificates: Sequence[CriticalCertificate], sigma: Cone | None = None) -> int:
    if sigma is None:
        if not certificates:
            raise ConeError("the cone is needed when there are no certificates")
        sigma = certificates[0].tie_breaker.cone
    for cert in certificates:
        why = certificate_violation(cert)
        if why is not None:
            raise ConeError(f"invalid certificate: {why}")
    mu = minimal_face_containing(sigma, w)
    q = quotient_lattice(mu.rays, sigma.d)
    vecs = [q.project(c.arrow.vector) for c in certificates]
    return mu.dim - (rank(vecs) if vecs else 0)


# ---------------------------------------------------------------------------
# independent check


def _vertex_of(A: Cone, w, x) -> bool:
    tight = [f for f in A.facets if dot(f, x) == 0] + [tuple(w)]
    return rank(tight) == A.d


def certificate_violation(cert: CriticalCertificate, m_le_d: Iterable[Sequence] | None = None) -> str | None:
    """Re-check the four conditions of criticality without the search code.

    Lattice points below the level are found by box enumeration over the
    vertices of each projected level slice, not by branch and bound.
    """
    tb = cert.tie_breaker
    sigma, w, b = tb.cone, tuple(tb.weight), tb.vector
    A = dual_cone(sigma)
    a, c = cert.arrow, Fraction(cert.level_c)
    if dot(b, w) != 0:
        return "tie-breaker is not orthogonal to w"
    if m_le_d is not None:
        for m in m_le_d:
            if any(m) and dot(m, tb.chamber_witness) * dot(m, add(w, b)) <= 0:
                return "w + b leaves the chamber of the witness"
    if c <= 0:
        return "level must be positive"
    if a.head == a.tail or normalize(sub(a.head, a.tail)) != a.vector:
        return "malformed arrow"
    if not is_integral(a.vector):
        return "arrow is not integral"
    for x in (a.head, a.tail):
        if not A.contains(x) or dot(x, w) != c:
            return f"{x} is not on the level {c} slice"
    # unique b-minimum at the tail
    if not _vertex_of(A, w, a.tail):
        return "tail is not a vertex"
    verts, rec = polyhedron_vertices([(f, 0) for f in A.facets], [(w, c)], A.d)
    if any(dot(b, r) <= 0 for r in rec):
        return "b is not strictly increasing along the recession cone"
    if any(q != a.tail and dot(b, q) <= dot(b, a.tail) for q in verts):
        return "tail is not the unique b-minimum"
    # no tail-integral point strictly below the level
    mu = minimal_face_containing(sigma, w)
    q = quotient_lattice(mu.rays, sigma.d)
    rows = [q.dual_functional(v) for v in mu.rays]
    wbar = q.dual_functional(w)
    tbar = q.project(a.tail)
    k = q.rank
    for n in range(1, math.floor(c) + 1):
        ineqs = [(r, -dot(r, tbar)) for r in rows]
        pts, prec = polyhedron_vertices(ineqs, [(wbar, -n)], k)
        if prec:
            return "unbounded quotient slice"
        if not pts:
            continue
        lo = [min(p[i] for p in pts) for i in range(k)]
        hi = [max(p[i] for p in pts) for i in range(k)]
        for x in box_points(lo, hi):
            if dot(wbar, x) == -n and all(dot(r, add(tbar, x)) >= 0 for r in rows):
                return f"tail-integral point at level {c - n}"
    return None


def verify_certificate(cert: CriticalCertificate, m_le_d: Iterable[Sequence] | None = None) -> bool:
    return certificate_violation(cert, m_le_d) is None
