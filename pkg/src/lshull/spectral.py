"""FFT solves for ``(sqrt(rho2) * Lap - sqrt(rho0)) u = g`` on the periodic grid."""

from dataclasses import dataclass, field

import numpy as np

from .grid import laplacian_central


@dataclass(frozen=True)
class SpectralPlan:
    M: int
    N: int
    rho0: float
    rho2: float
    symbol: np.ndarray = field(repr=False)

    @property
    def rho1(self):
        return 2.0 * np.sqrt(self.rho0 * self.rho2)


def build_plan(M, N, rho0, rho2):
    """Precompute the discrete symbol ``c(i, j)`` for an ``M x N`` grid.

    The cosine form is the exact eigenvalue of the five-point Laplacian, so the
    solve inverts :func:`lshull.grid.laplacian_central` to round-off.
    """
    if M < 2 or N < 2:
        raise ValueError(f"grid must be at least 2x2, got {M}x{N}")
    if not (rho0 > 0 and rho2 > 0):
        raise ValueError(f"rho0 and rho2 must be positive, got {rho0}, {rho2}")
    kx = np.cos(2.0 * np.pi * np.arange(M) / M)
    ky = np.cos(2.0 * np.pi * np.arange(N) / N)
    symbol = 2.0 * np.sqrt(rho2) * (kx[:, None] + ky[None, :] - 2.0) - np.sqrt(rho0)
    symbol.setflags(write=False)
    return SpectralPlan(int(M), int(N), float(rho0), float(rho2), symbol)


def _check(plan, g):
    g = np.asarray(g, dtype=np.float64)
    if g.shape != (plan.M, plan.N):
        raise ValueError(f"field shape {g.shape} does not match plan {(plan.M, plan.N)}")
    return g


def solve_helmholtz(plan, g):
    g = _check(plan, g)
    return np.fft.ifft2(np.fft.fft2(g) / plan.symbol).real


def solve_biharmonic_split(plan, g):
    """Solve ``-rho1 Lap phi + rho2 Lap^2 phi + rho0 phi = g`` with ``rho1 = 2 sqrt(rho0 rho2)``.

    The operator factors as the square of the Helmholtz operator, so this is two
    Helmholtz solves fused into one division by ``c**2``.
    """
    g = _check(plan, g)
    return np.fft.ifft2(np.fft.fft2(g) / (plan.symbol * plan.symbol)).real


def apply_biharmonic(plan, phi):
    """Apply the fourth-order operator with grid stencils (used to check solves)."""
    lap = laplacian_central(phi)
    return -plan.rho1 * lap + plan.rho2 * laplacian_central(lap) + plan.rho0 * phi
