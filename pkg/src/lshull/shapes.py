"""Synthetic binary masks standing in for segmentation ground truth."""

import math

import numpy as np


def _grid(size):
    M, N = (size, size) if np.isscalar(size) else size
    return np.meshgrid(np.arange(M, dtype=float), np.arange(N, dtype=float), indexing="ij")


def disk(size=128, radius=30, center=None):
    x, y = _grid(size)
    cx, cy = center if center is not None else ((x.shape[0] - 1) / 2, (x.shape[1] - 1) / 2)
    return (x - cx) ** 2 + (y - cy) ** 2 <= radius ** 2


def rotated_square(size=128, half=35, angle=math.radians(30), center=None):
    x, y = _grid(size)
    cx, cy = center if center is not None else ((x.shape[0] - 1) / 2, (x.shape[1] - 1) / 2)
    c, s = math.cos(angle), math.sin(angle)
    u = c * (x - cx) + s * (y - cy)
    v = -s * (x - cx) + c * (y - cy)
    return (np.abs(u) <= half) & (np.abs(v) <= half)


def l_shape(size=128, extent=84, thickness=28, corner=(22, 22)):
    x, y = _grid(size)
    x0, y0 = corner
    vert = (x >= x0) & (x < x0 + extent) & (y >= y0) & (y < y0 + thickness)
    horiz = (x >= x0 + extent - thickness) & (x < x0 + extent) & (y >= y0) & (y < y0 + extent)
    return vert | horiz


def star(size=128, outer=46, inner=19, points=5, center=None, angle=0.0):
    x, y = _grid(size)
    cx, cy = center if center is not None else ((x.shape[0] - 1) / 2, (x.shape[1] - 1) / 2)
    verts = []
    for k in range(2 * points):
        r = outer if k % 2 == 0 else inner
        t = angle + math.pi * k / points
        verts.append((cx + r * math.cos(t), cy + r * math.sin(t)))
    return polygon_region(x, y, verts)


def polygon_region(x, y, verts):
    """Even-odd point-in-polygon test on pixel centers."""
    inside = np.zeros(x.shape, dtype=bool)
    n = len(verts)
    for i in range(n):
        (x0, y0), (x1, y1) = verts[i], verts[(i + 1) % n]
        if y0 == y1:
            continue
        crosses = (y0 > y) != (y1 > y)
        xint = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
        inside ^= crosses & (x < xint)
    return inside


def crescent(size=128, radius=42, bite=34, offset=(0, 22)):
    x, y = _grid(size)
    cx, cy = (x.shape[0] - 1) / 2, (x.shape[1] - 1) / 2
    outer = (x - cx) ** 2 + (y - cy) ** 2 <= radius ** 2
    inner = (x - cx - offset[0]) ** 2 + (y - cy - offset[1]) ** 2 <= bite ** 2
    return outer & ~inner


def plus_sign(size=128, arm=30, width=8, center=None):
    x, y = _grid(size)
    cx, cy = center if center is not None else ((x.shape[0] - 1) // 2, (x.shape[1] - 1) // 2)
    dx, dy = np.abs(x - cx), np.abs(y - cy)
    return ((dx <= arm) & (dy <= width)) | ((dy <= arm) & (dx <= width))


def two_disks(size=128, radius=15, gap=40, center=None):
    """Two disks on a horizontal line whose boundaries are ``gap`` pixels apart.

    Centers default to whole pixels around ``(M // 2, N // 2)``.
    """
    M, N = (size, size) if np.isscalar(size) else size
    cx, cy = center if center is not None else (M // 2, N // 2)
    half = radius + gap / 2
    return (disk(size, radius, (cx, cy - half)), disk(size, radius, (cx, cy + half)))


def points_in(stencil, count, seed):
    """``count`` distinct pixels drawn uniformly from the foreground of ``stencil``."""
    rng = np.random.default_rng(seed)
    idx = np.flatnonzero(stencil)
    if count > len(idx):
        raise ValueError(f"stencil holds only {len(idx)} pixels, asked for {count}")
    out = np.zeros(stencil.shape, dtype=bool)
    out.flat[rng.choice(idx, size=count, replace=False)] = True
    return out


SHAPES = {
    "disk": disk,
    "rotated_square": rotated_square,
    "l_shape": l_shape,
    "star": star,
    "crescent": crescent,
    "plus": plus_sign,
}
