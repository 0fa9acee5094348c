"""Static SVG cross-sections of fans in rank 2 and 3.

Rank 2 fans are drawn as rays from the origin.  Rank 3 fans are cut by the
plane through the primitive ray generators' barycentric level {h = 1}, where
h is the sum of the inner facet normals of the support.  Coordinates are
rounded to six decimals in the output only.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .cones import ConeError, Fan
from .lattice import dot

SIZE = 480
MARGIN = 60


def _fmt(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _plane_coords(fan: Fan):
    support = fan.support
    if support is not None and support.is_full:
        h = tuple(sum(col) for col in zip(*support.facets))
    else:
        h = tuple(sum(col) for col in zip(*fan.rays))
    if any(dot(h, r) <= 0 for r in fan.rays):
        raise ConeError("cannot slice the fan by a plane")
    # orthonormal-ish basis of h^perp, computed in floating point for display
    hf = [float(x) for x in h]
    n = math.sqrt(sum(x * x for x in hf))
    hf = [x / n for x in hf]
    seed = min(range(3), key=lambda i: abs(hf[i]))
    e = [0.0, 0.0, 0.0]
    e[seed] = 1.0
    proj = sum(a * b for a, b in zip(e, hf))
    u = [a - proj * b for a, b in zip(e, hf)]
    un = math.sqrt(sum(x * x for x in u))
    u = [x / un for x in u]
    v = [hf[1] * u[2] - hf[2] * u[1], hf[2] * u[0] - hf[0] * u[2], hf[0] * u[1] - hf[1] * u[0]]

    def point(r):
        t = Fraction(1, dot(h, r))
        p = [float(t * x) for x in r]
        return (sum(a * b for a, b in zip(p, u)), sum(a * b for a, b in zip(p, v)))

    return point


def render_svg(fan: Fan, path) -> str:
    d = fan.d
    if d == 2:
        def point(r):
            n = math.sqrt(sum(x * x for x in r))
            return (r[0] / n, r[1] / n)

        origin = (0.0, 0.0)
    elif d == 3:
        point = _plane_coords(fan)
        origin = None
    else:
        raise ConeError(f"unsupported rank {d}")
    pts = {r: point(r) for r in fan.rays}
    xs = [p[0] for p in pts.values()] + ([0.0] if origin else [])
    ys = [p[1] for p in pts.values()] + ([0.0] if origin else [])
    span = max(max(xs) - min(xs), max(ys) - min(ys)) or 1.0
    k = (SIZE - 2 * MARGIN) / span

    def canvas(p):
        return (MARGIN + (p[0] - min(xs)) * k, SIZE - MARGIN - (p[1] - min(ys)) * k)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    if d == 2:
        o = canvas(origin)
        for c in fan.cones:
            a, b = (canvas(pts[r]) for r in c.rays) if len(c.rays) == 2 else (canvas(pts[c.rays[0]]),) * 2
            lines.append(
                f'<polygon points="{_fmt(o[0])},{_fmt(o[1])} {_fmt(a[0])},{_fmt(a[1])} {_fmt(b[0])},{_fmt(b[1])}" '
                'fill="#dde8f5" stroke="black" stroke-width="1"/>'
            )
    else:
        for c in fan.cones:
            cps = [pts[r] for r in c.rays]
            cx = sum(p[0] for p in cps) / len(cps)
            cy = sum(p[1] for p in cps) / len(cps)
            cps.sort(key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
            poly = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in map(canvas, cps))
            lines.append(f'<polygon points="{poly}" fill="#dde8f5" stroke="black" stroke-width="1"/>')
    for r in fan.rays:
        x, y = canvas(pts[r])
        label = "(" + ",".join(str(t) for t in r) + ")"
        lines.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="black"/>')
        lines.append(f'<text x="{_fmt(x + 5)}" y="{_fmt(y - 5)}" font-family="monospace" font-size="11">{label}</text>')
    lines.append("</svg>")
    text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text
