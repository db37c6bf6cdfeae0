"""Distance transforms, signed distance functions, and polygon initializations."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .classic import quickhull, rasterize_polygon

DEFAULT_ANGLES = 16
DEFAULT_PERCENTILE = 5.0


def _lower_envelope_1d(f):
    """Squared distance transform of one line (Felzenszwalb-Huttenlocher).

    ``f`` holds 0 at sites and ``inf`` elsewhere, or any sampled function;
    infinite samples never enter the envelope.
    """
    n = len(f)
    out = np.full(n, np.inf)
    sites = [q for q in range(n) if f[q] < np.inf]
    if not sites:
        return out
    v = [sites[0]]
    z = [-np.inf]
    for q in sites[1:]:
        fq = f[q] + q * q
        while True:
            p = v[-1]
            s = (fq - (f[p] + p * p)) / (2 * (q - p))
            if s <= z[-1]:
                v.pop()
                z.pop()
            else:
                break
        v.append(q)
        z.append(s)
    z.append(np.inf)
    k = 0
    for x in range(n):
        while z[k + 1] < x:
            k += 1
        p = v[k]
        out[x] = (x - p) ** 2 + f[p]
    return out


def _edt_axis(g, axis, periodic):
    g = np.moveaxis(g, axis, 0)
    L = g.shape[0]
    out = np.empty_like(g)
    for j in range(g.shape[1]):
        line = g[:, j]
        if periodic:
            # three copies expose every wrap-around neighbour to the middle copy
            out[:, j] = _lower_envelope_1d(np.concatenate([line, line, line]))[L:2 * L]
        else:
            out[:, j] = _lower_envelope_1d(line)
    return np.moveaxis(out, 0, axis)


def squared_edt(mask, periodic=True):
    """Exact squared Euclidean distance from each pixel to the nearest foreground pixel."""
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise ValueError(f"expected a 2-D mask, got shape {mask.shape}")
    if not mask.any():
        raise ValueError("empty set: mask has no foreground pixels")
    g = np.where(mask, 0.0, np.inf)
    g = _edt_axis(g, 0, periodic)
    return _edt_axis(g, 1, periodic)


def periodic_edt(mask):
    return np.sqrt(squared_edt(mask, periodic=True))


def signed_distance(mask):
    """Negative inside, positive outside; distances are between pixel centers."""
    mask = np.asarray(mask, dtype=bool)
    if mask.all() or not mask.any():
        raise ValueError("signed distance needs a mask with both foreground and background")
    return np.where(mask, -periodic_edt(~mask), periodic_edt(mask))


@dataclass
class LandmarkSet:
    shape: tuple
    points: list = field(default_factory=list)

    @property
    def indicator(self):
        l = np.zeros(self.shape, dtype=bool)
        for m, n in self.points:
            l[m, n] = True
        return l

    def __len__(self):
        return len(self.points)


@dataclass
class PolygonInit:
    phi: np.ndarray
    landmarks: LandmarkSet
    vertices: list
    fallback: bool = False


def _directional_extremes(mask, n_angles, percentile):
    pts = np.argwhere(np.asarray(mask, dtype=bool)).astype(np.float64)
    center = pts.mean(axis=0)
    rel = pts - center
    order_index = np.arange(len(pts))
    chosen = []
    for k in range(n_angles):
        theta = 2.0 * math.pi * k / n_angles
        c, s = math.cos(theta), math.sin(theta)
        rx = c * rel[:, 0] - s * rel[:, 1]
        ry = s * rel[:, 0] + c * rel[:, 1]
        # rank by rotated y descending, then rotated x ascending, then row-major index
        ranking = np.lexsort((order_index, rx, -ry))
        if percentile is None:
            pick = ranking[0]
        else:
            pick = ranking[min(len(pts) - 1, int(math.floor(percentile / 100.0 * len(pts))))]
        chosen.append((int(pts[pick, 0]), int(pts[pick, 1])))
    seen = set()
    ordered = []
    for p in chosen:
        if p not in seen:
            seen.add(p)
            ordered.append(p)
    return ordered


def _polygon_phi(mask, vertices):
    M, N = mask.shape
    hull = quickhull(vertices)
    if len(hull) < 3:
        return None
    region = rasterize_polygon(hull, M, N)
    if region.all() or not region.any():
        return None
    return signed_distance(region)


def init_polygon_exact(mask, n_angles=DEFAULT_ANGLES):
    """Initial level set from the polygon of directional extreme pixels.

    The extreme pixels double as boundary landmarks. When fewer than three
    distinct extremes exist the mask's own signed distance is returned with
    ``fallback=True`` and no landmarks.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("empty set: mask has no foreground pixels")
    if n_angles < 3:
        raise ValueError(f"need at least 3 directions, got {n_angles}")
    vertices = _directional_extremes(mask, n_angles, None)
    phi = _polygon_phi(mask, vertices) if len(vertices) >= 3 else None
    if phi is None:
        return PolygonInit(signed_distance(mask), LandmarkSet(mask.shape), vertices, fallback=True)
    return PolygonInit(phi, LandmarkSet(mask.shape, vertices), vertices)


def init_polygon_clusters(mask, n_angles=DEFAULT_ANGLES, link_radius=0.0):
    """Polygon initialization applied separately to each cluster of the mask.

    Pixels whose ``link_radius``-neighbourhoods touch share a cluster, so
    objects farther apart than ``2 * link_radius`` get their own polygon and
    landmarks. Clusters too small for a polygon contribute their own pixels.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("empty set: mask has no foreground pixels")
    near = squared_edt(mask, periodic=False) <= link_radius ** 2
    labels, count = ndimage.label(near, structure=np.ones((3, 3), dtype=bool))
    if count <= 1:
        return init_polygon_exact(mask, n_angles)
    region = np.zeros_like(mask)
    points, vertices = [], []
    for k in range(1, count + 1):
        part = mask & (labels == k)
        init = init_polygon_exact(part, n_angles)
        vertices.extend(init.vertices)
        if init.fallback:
            region |= part
        else:
            region |= init.phi <= 0
            points.extend(init.landmarks.points)
    if region.all():
        return init_polygon_exact(mask, n_angles)
    return PolygonInit(signed_distance(region), LandmarkSet(mask.shape, points), vertices)


def init_polygon_percentile(mask, n_angles=DEFAULT_ANGLES, p=DEFAULT_PERCENTILE):
    """Like :func:`init_polygon_exact` but each vertex sits at the ``p``-th percentile
    from the top, so isolated outliers are skipped. Returns only the level set."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("empty set: mask has no foreground pixels")
    if not 0 < p < 50:
        raise ValueError(f"percentile must lie in (0, 50), got {p}")
    vertices = _directional_extremes(mask, n_angles, p)
    phi = _polygon_phi(mask, vertices) if len(vertices) >= 3 else None
    return signed_distance(mask) if phi is None else phi
