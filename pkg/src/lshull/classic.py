"""Classical convex hull baselines and scan-line polygon rasterization.

Points are ``(x, y)`` pairs where pixel ``f[m, n]`` sits at ``(m, n)``.
Integral coordinates are handled with exact integer predicates; anything
else falls back to floating predicates with a small slack.
"""

import math
from fractions import Fraction

import numpy as np

FLOAT_SLACK = 1e-9


class HullPolygon(tuple):
    """Counterclockwise hull vertices, starting at the lowest-x (then lowest-y) vertex."""

    @property
    def area(self):
        return polygon_area(self)


def _normalize_points(points):
    pts = [tuple(p) for p in points]
    if not pts:
        raise ValueError("convex hull of an empty point set")
    if all(float(c).is_integer() for p in pts for c in p):
        return sorted({(int(x), int(y)) for x, y in pts}), 0
    return sorted({(float(x), float(y)) for x, y in pts}), FLOAT_SLACK


def cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _canonical(vertices):
    if len(vertices) <= 1:
        return HullPolygon(vertices)
    k = min(range(len(vertices)), key=lambda i: vertices[i])
    return HullPolygon(vertices[k:] + vertices[:k])


def quickhull(points):
    pts, slack = _normalize_points(points)
    if len(pts) == 1:
        return HullPolygon(pts)
    left, right = pts[0], pts[-1]
    above = [p for p in pts if cross(left, right, p) > slack]
    below = [p for p in pts if cross(left, right, p) < -slack]
    hull = [left]
    _quickhull_side(hull, below, left, right, slack)
    hull.append(right)
    _quickhull_side(hull, above, right, left, slack)
    if len(hull) == 2 and hull[0] == hull[1]:
        hull = hull[:1]
    return _canonical(hull)


def _quickhull_side(hull, points, a, b, slack):
    # points lie strictly right of the directed line b -> a, i.e. left of a -> b reversed;
    # emit the hull chain strictly between a and b in CCW order.
    if not points:
        return
    far = max(points, key=lambda p: (cross(b, a, p), p))
    left_of_af = [p for p in points if cross(far, a, p) > slack]
    left_of_fb = [p for p in points if cross(b, far, p) > slack]
    _quickhull_side(hull, left_of_af, a, far, slack)
    hull.append(far)
    _quickhull_side(hull, left_of_fb, far, b, slack)


def gift_wrapping(points):
    """Jarvis march; O(n h) reference used to cross-check :func:`quickhull`."""
    pts, slack = _normalize_points(points)
    if len(pts) == 1:
        return HullPolygon(pts)
    start = pts[0]
    hull = [start]
    current = start
    while True:
        candidate = None
        for p in pts:
            if p == current:
                continue
            if candidate is None:
                candidate = p
                continue
            turn = cross(current, candidate, p)
            # keep the most clockwise point; on collinear ties take the farthest
            if turn < -slack or (abs(turn) <= slack and _dist2(current, p) > _dist2(current, candidate)):
                candidate = p
        if candidate == start:
            break
        hull.append(candidate)
        current = candidate
        if len(hull) > len(pts):
            raise RuntimeError("gift wrapping failed to close")
    return _canonical(hull)


def _dist2(a, b):
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


def polygon_area(vertices):
    n = len(vertices)
    if n < 3:
        return 0.0
    s = sum(vertices[i][0] * vertices[(i + 1) % n][1] - vertices[(i + 1) % n][0] * vertices[i][1]
            for i in range(n))
    return s / 2


def _exact(v):
    return Fraction(v) if isinstance(v, int) or float(v).is_integer() else None


def rasterize_polygon(poly, M, N):
    """Fill the pixels whose centers lie inside or on a convex polygon.

    One scan line per ``m``: each edge crossing the line contributes an
    intersection, and the span between the extreme crossings is filled.
    """
    verts = [tuple(v) for v in poly]
    if not verts:
        raise ValueError("cannot rasterize an empty polygon")
    mask = np.zeros((M, N), dtype=bool)
    if len(verts) <= 2 or polygon_area(verts) == 0:
        _rasterize_segments(mask, verts)
        return mask

    exact = all(_exact(c) is not None for v in verts for c in v)
    conv = Fraction if exact else float
    vs = [(conv(x), conv(y)) for x, y in verts]
    slack = 0 if exact else FLOAT_SLACK
    xs = [v[0] for v in vs]
    m_lo = max(0, math.ceil(min(xs) - slack))
    m_hi = min(M - 1, math.floor(max(xs) + slack))
    edges = list(zip(vs, vs[1:] + vs[:1]))
    for m in range(m_lo, m_hi + 1):
        crossings = []
        for (x0, y0), (x1, y1) in edges:
            if min(x0, x1) - slack <= m <= max(x0, x1) + slack:
                if x0 == x1:
                    crossings.extend((y0, y1))
                else:
                    crossings.append(y0 + (m - x0) * (y1 - y0) / (x1 - x0))
        if not crossings:
            continue
        n_lo = max(0, math.ceil(min(crossings) - slack))
        n_hi = min(N - 1, math.floor(max(crossings) + slack))
        if n_lo <= n_hi:
            mask[m, n_lo:n_hi + 1] = True
    return mask


def _rasterize_segments(mask, verts):
    M, N = mask.shape
    pairs = list(zip(verts, verts[1:])) or [(verts[0], verts[0])]
    for (x0, y0), (x1, y1) in pairs:
        steps = int(max(abs(x1 - x0), abs(y1 - y0)))
        for k in range(steps + 1):
            t = k / steps if steps else 0.0
            m = int(math.floor(x0 + t * (x1 - x0) + 0.5))
            n = int(math.floor(y0 + t * (y1 - y0) + 0.5))
            if 0 <= m < M and 0 <= n < N:
                mask[m, n] = True


def mask_points(mask):
    return [(int(m), int(n)) for m, n in np.argwhere(np.asarray(mask, dtype=bool))]


def hull_mask(mask):
    """Rasterized quickhull of the foreground pixel centers."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("empty set: mask has no foreground pixels")
    return rasterize_polygon(quickhull(mask_points(mask)), *mask.shape)
