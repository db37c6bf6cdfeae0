"""Periodic grid operators.

Fields are dense float64 arrays of shape ``(M, N)`` indexed ``f[m, n]``; the
first axis is the ``x`` direction. Vector fields are arrays of shape
``(2, M, N)``. Every operator wraps periodically in both axes, so
``f[-1]`` plays the role of ``f(0)`` and ``f[M]`` the role of ``f(1)``.
"""

import numpy as np

DEFAULT_DELTA = 1.5


def as_field(f):
    f = np.asarray(f, dtype=np.float64)
    if f.ndim != 2:
        raise ValueError(f"expected a 2-D field, got shape {f.shape}")
    return f


def grad_forward(f):
    """Forward-difference gradient, returned as a ``(2, M, N)`` array."""
    f = as_field(f)
    return np.stack([np.roll(f, -1, axis=0) - f, np.roll(f, -1, axis=1) - f])


def div_backward(q):
    """Backward-difference divergence, the negative adjoint of :func:`grad_forward`."""
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 3 or q.shape[0] != 2:
        raise ValueError(f"expected a (2, M, N) vector field, got shape {q.shape}")
    return (q[0] - np.roll(q[0], 1, axis=0)) + (q[1] - np.roll(q[1], 1, axis=1))


def laplacian_central(f):
    f = as_field(f)
    return (np.roll(f, 1, axis=0) + np.roll(f, -1, axis=0)
            + np.roll(f, 1, axis=1) + np.roll(f, -1, axis=1) - 4.0 * f)


def inner_product(a, b):
    """Sum of per-site products (dot products for vector fields)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.sum(a * b))


def magnitude(q):
    return np.hypot(q[0], q[1])


def _check_delta(delta):
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")


def heaviside_smooth(s, delta=DEFAULT_DELTA):
    _check_delta(delta)
    return 0.5 + np.arctan(np.asarray(s, dtype=np.float64) / delta) / np.pi


def delta_smooth(s, delta=DEFAULT_DELTA):
    """Derivative of :func:`heaviside_smooth` with respect to ``s``."""
    _check_delta(delta)
    s = np.asarray(s, dtype=np.float64)
    return (delta / np.pi) / (s * s + delta * delta)
