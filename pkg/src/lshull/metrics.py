"""Evaluation metrics on binary masks (plain, non-periodic image space)."""

import math

import numpy as np
from scipy import ndimage

from .classic import hull_mask
from .grid import grad_forward, laplacian_central, magnitude
from .sdf import squared_edt


def _pair(a, b):
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if not a.any() or not b.any():
        raise ValueError("empty set: Hausdorff distance needs non-empty masks")
    return a, b


def hausdorff(a, b):
    """Symmetric Hausdorff distance between the pixel-center sets of two masks."""
    a, b = _pair(a, b)
    d2 = max(squared_edt(b, periodic=False)[a].max(), squared_edt(a, periodic=False)[b].max())
    return math.sqrt(d2)


def equivalent_diameter(mask):
    return 2.0 * math.sqrt(np.count_nonzero(mask) / math.pi)


def relative_error(reference, candidate):
    """Hausdorff distance scaled by the reference's equivalent diameter."""
    reference, candidate = _pair(reference, candidate)
    return hausdorff(reference, candidate) / equivalent_diameter(reference)


def convexity_defect(mask):
    mask = np.asarray(mask, dtype=bool)
    hull = hull_mask(mask)
    return np.count_nonzero(hull ^ mask) / np.count_nonzero(hull)


_FOUR = ndimage.generate_binary_structure(2, 1)


def connected_components(mask):
    return int(ndimage.label(np.asarray(mask, dtype=bool), structure=_FOUR)[1])


def label_components(mask):
    return ndimage.label(np.asarray(mask, dtype=bool), structure=_FOUR)


def containment(mask, hull):
    """Fraction of foreground pixels of ``mask`` that lie in ``hull``."""
    mask = np.asarray(mask, dtype=bool)
    return np.count_nonzero(mask & hull) / np.count_nonzero(mask)


def eikonal_residual(phi, band=20.0):
    """Mean of ``||grad phi| - 1|`` over ``{|phi| <= band}``."""
    sel = np.abs(phi) <= band
    return float(np.mean(np.abs(magnitude(grad_forward(phi))[sel] - 1.0)))


def min_laplacian_inside(phi):
    return float(laplacian_central(phi)[phi <= 0].min())
