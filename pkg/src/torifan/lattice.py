"""Exact integer and rational linear algebra over the dual lattices M and N.

Vectors are plain tuples of ``int`` or ``fractions.Fraction``.  Both lattices
are identified with Z^d through a fixed basis, so the pairing of M with N and
the inner products on M_R and N_R are all the ordinary dot product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

Vector = tuple


def dot(a: Sequence, b: Sequence):
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return sum(x * y for x, y in zip(a, b))


def pairing(a: Sequence, w: Sequence) -> Fraction:
    """Pair a point of M_R with a point of N_R."""
    return Fraction(dot(a, w))


def norm_sq(a: Sequence):
    return sum(x * x for x in a)


def add(a: Sequence, b: Sequence) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence, b: Sequence) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a: Sequence) -> Vector:
    return tuple(c * x for x in a)


def is_integral(a: Sequence) -> bool:
    return all(Fraction(x).denominator == 1 for x in a)


def as_int(a: Sequence) -> Vector:
    if not is_integral(a):
        raise ValueError(f"vector {a} is not integral")
    return tuple(int(Fraction(x)) for x in a)


def normalize(a: Sequence) -> Vector:
    """Canonical exact form: ints where possible, Fractions otherwise."""
    out = []
    for x in a:
        x = Fraction(x)
        out.append(x.numerator if x.denominator == 1 else x)
    return tuple(out)


def primitive_of(v: Sequence) -> Vector:
    """Divide an integer (or rational) vector down to the primitive lattice
    vector on the same ray."""
    v = tuple(Fraction(x) for x in v)
    if all(x == 0 for x in v):
        raise ValueError("zero vector has no primitive")
    lcm = 1
    for x in v:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return tuple(x // g for x in ints)


def is_primitive(v: Sequence) -> bool:
    return is_integral(v) and any(v) and math.gcd(*[int(x) for x in v]) == 1


# ---------------------------------------------------------------------------
# rational elimination


def rref(rows: Iterable[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Iterable[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], n: int) -> list[Vector]:
    """Rational basis of {x in Q^n : r . x = 0 for every row r}."""
    red, pivots = rref(rows)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> Vector | None:
    """Solve a x = b exactly; returns one solution or None if inconsistent."""
    if not a:
        return None
    n = len(a[0])
    aug = [list(r) + [bi] for r, bi in zip(a, b)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(red, pivots):
        x[p] = row[n]
    return tuple(x)


def det(matrix: Sequence[Sequence]):
    """Determinant by Bareiss elimination (exact for int and Fraction)."""
    m = [list(r) for r in matrix]
    n = len(m)
    if n == 0:
        return 1
    if any(len(r) != n for r in m):
        raise ValueError("det of a non-square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num // prev if isinstance(num, int) else num / prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def transpose(m: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*m)]


def matvec(m: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(dot(row, v) for row in m)


def inverse(m: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(m)
    aug = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(m)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ValueError("singular matrix")
    return [row[n:] for row in red]


def integer_row_basis(vectors: Sequence[Sequence]) -> list[Vector]:
    """Primitive integer vectors spanning the same rational space."""
    red, _ = rref(vectors)
    return [primitive_of(r) for r in red]


# ---------------------------------------------------------------------------
# integer normal forms


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def column_echelon(rows: Sequence[Sequence[int]], n: int) -> tuple[list[list[int]], list[list[int]], int]:
    """Unimodular column reduction.

    Returns ``(H, U, k)`` with ``rows @ U == H``, ``U`` unimodular (n x n) and
    the last ``n - k`` columns of ``H`` zero.  Those columns of ``U`` are then
    a basis of the integer kernel, which is saturated by construction.
    """
    h = [[int(x) for x in r] for r in rows]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def colop(i: int, j: int, a: int, b: int, c: int, e: int) -> None:
        # (col_i, col_j) <- (a col_i + b col_j, c col_i + e col_j)
        for mat in (h, u):
            for row in mat:
                x, y = row[i], row[j]
                row[i], row[j] = a * x + b * y, c * x + e * y

    p = 0
    for r in range(len(h)):
        if p == n:
            break
        for j in range(p + 1, n):
            x, y = h[r][p], h[r][j]
            if y == 0:
                continue
            g, s, t = _xgcd(x, y)
            # [s t; -y/g x/g] has determinant 1
            colop(p, j, s, t, -y // g, x // g)
        if h[r][p] != 0:
            if h[r][p] < 0:
                for mat in (h, u):
                    for row in mat:
                        row[p] = -row[p]
            p += 1
    return h, u, p


def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> list[Vector]:
    """Basis of the saturated lattice {x in Z^n : r . x = 0 for all rows r}."""
    if not rows:
        return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    ints = [primitive_of(r) if any(r) else tuple(0 for _ in r) for r in rows]
    _, u, k = column_echelon(ints, n)
    return [tuple(u[i][j] for i in range(n)) for j in range(k, n)]


def saturation_basis(vectors: Sequence[Sequence], n: int) -> list[Vector]:
    """Basis of span(vectors) intersected with Z^n."""
    if not vectors or rank(vectors) == 0:
        return []
    ortho = nullspace(vectors, n)
    if not ortho:
        return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    return integer_kernel([primitive_of(v) for v in ortho], n)


def hermite_lower(cols: Sequence[Sequence[int]]) -> list[list[int]]:
    """Lower-triangular basis (given as columns) of the lattice spanned by the
    k linearly independent integer columns of a k x k matrix."""
    k = len(cols)
    rows = [[cols[j][i] for j in range(k)] for i in range(k)]
    h, _, rk = column_echelon(rows, k)
    if rk != k:
        raise ValueError("columns are linearly dependent")
    return [[h[i][j] for i in range(k)] for j in range(k)]


# ---------------------------------------------------------------------------
# quotient lattices


@dataclass(frozen=True)
class QuotientLattice:
    """M / (mu^perp ∩ M) with explicit projection and section.

    ``projection`` is a k x d integer matrix, ``section`` a d x k integer
    matrix (stored as rows) and ``projection @ section`` is the identity.
    """

    dim: int
    kernel_basis: tuple
    projection: tuple
    section: tuple

    @property
    def rank(self) -> int:
        return len(self.projection)

    def project(self, x: Sequence) -> Vector:
        return normalize(matvec(self.projection, x))

    def lift(self, y: Sequence) -> Vector:
        return normalize(matvec(self.section, y))

    def dual_functional(self, w: Sequence) -> Vector:
        """Coordinates of w (in the span of mu) as a functional on the quotient."""
        return normalize(tuple(dot([row[j] for row in self.section], w) for j in range(self.rank)))


def quotient_lattice(mu_generators: Sequence[Sequence[int]], d: int) -> QuotientLattice:
    gens = [tuple(g) for g in mu_generators if any(g)]
    for g in gens:
        if len(g) != d:
            raise ValueError(f"dimension mismatch: {len(g)} vs {d}")
    if not gens:
        ident = tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))
        return QuotientLattice(d, ident, (), tuple(() for _ in range(d)))
    _, u, k = column_echelon([primitive_of(g) for g in gens], d)
    uinv = inverse(u)
    kernel = tuple(tuple(u[i][j] for i in range(d)) for j in range(k, d))
    projection = tuple(tuple(int(x) for x in uinv[i]) for i in range(k))
    section = tuple(tuple(u[i][j] for j in range(k)) for i in range(d))
    return QuotientLattice(d, kernel, projection, section)


def lattice_ball(radius_sq, d: int) -> list[Vector]:
    """All m in Z^d with |m|^2 <= radius_sq, sorted."""
    radius_sq = Fraction(radius_sq)
    if radius_sq < 0:
        raise ValueError("negative radius")
    r = math.isqrt(math.floor(radius_sq))
    return sorted(
        m for m in product(range(-r, r + 1), repeat=d) if norm_sq(m) <= radius_sq
    )


def box_points(lo: Sequence, hi: Sequence) -> Iterable[Vector]:
    """Integer points of the box lo <= x <= hi (rational bounds)."""
    ranges = [range(math.ceil(Fraction(a)), math.floor(Fraction(b)) + 1) for a, b in zip(lo, hi)]
    return product(*ranges)
