"""ADMM solvers for the level-set convex hull models.

Two drivers share the same machinery:

* :func:`run_exact` keeps every given pixel inside the hull through the
  splitting variable ``z3 = m * phi <= 0``.
* :func:`run_outlier` replaces that hard constraint with the penalty
  ``lam * (m * phi)^+`` so that far-away pixels can be left out.

Both recover the hull as ``{phi <= 0}`` where ``phi`` is driven towards the
signed distance function of a convex set: ``|grad phi| = 1`` through ``z1``
and ``Lap phi >= 0`` on ``{phi <= c}`` through ``z2``.
"""

import logging
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .grid import (delta_smooth, div_backward, grad_forward, heaviside_smooth,
                   laplacian_central, magnitude)
from .sdf import LandmarkSet, init_polygon_clusters, init_polygon_percentile, signed_distance
from .spectral import build_plan, solve_biharmonic_split

log = logging.getLogger(__name__)


class NumericalAbort(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    rho0: float = 1.0
    rho2: float = 15.0
    rho3: float = 1.0
    omega: float = 0.01
    mu: float = 5.0
    nu: float = 10.0
    lam: float = 0.0
    c: float = 20.0
    delta: float = 1.5
    eps_div: float = 1e-8
    max_iter: int = 5000
    tol: float = 1e-4
    init: str = "polygon"
    n_angles: int = 16
    percentile: float = 5.0
    pad: int | None = None
    avg_window: int = 500

    def __post_init__(self):
        for name in ("rho0", "rho2", "rho3", "delta", "eps_div", "tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("omega", "mu", "nu", "lam", "c"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.avg_window < 1:
            raise ValueError("avg_window must be at least 1")
        if self.init not in ("polygon", "percentile", "sdf"):
            raise ValueError(f"unknown init {self.init!r}")

    @property
    def rho1(self):
        return 2.0 * math.sqrt(self.rho0 * self.rho2)

    @classmethod
    def exact(cls, **overrides):
        return cls(**overrides)

    @classmethod
    def outlier(cls, **overrides):
        base = dict(rho0=1.0, rho2=20.0, omega=0.005, mu=3.0, nu=20.0, lam=3.0,
                    c=20.0, init="percentile")
        base.update(overrides)
        return cls(**base)

    def to_dict(self):
        return asdict(self)

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass
class AdmmState:
    phi: np.ndarray
    m: np.ndarray
    l: np.ndarray
    z1: np.ndarray = None
    z2: np.ndarray = None
    z3: np.ndarray = None
    g1: np.ndarray = None
    g2: np.ndarray = None
    g3: np.ndarray = None
    iter: int = 0

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=np.float64)
        self.m = np.asarray(self.m, dtype=np.float64)
        self.l = np.asarray(self.l, dtype=np.float64)
        shape = self.phi.shape
        if self.z1 is None:
            self.z1 = np.stack([np.ones(shape), np.zeros(shape)])
        for name, vec in (("z2", False), ("z3", False), ("g1", True), ("g2", False), ("g3", False)):
            if getattr(self, name) is None:
                setattr(self, name, np.zeros((2,) + shape if vec else shape))


@dataclass
class SolveReport:
    iterations: int
    metric: float
    energy: float
    history: list = field(repr=False)
    status: str
    max_violation: float = 0.0

    @property
    def converged(self):
        return self.status == "converged"


def update_z1(state, cfg):
    v = state.g1 / cfg.rho1 + grad_forward(state.phi)
    norm = magnitude(v)
    ok = norm >= cfg.eps_div
    return np.where(ok, v / np.where(ok, norm, 1.0), state.z1)


def update_z2(state, cfg):
    w = state.g2 / cfg.rho2 + laplacian_central(state.phi)
    return np.where(state.phi <= cfg.c, np.maximum(w, 0.0), w)


def update_z3(state, cfg):
    return np.minimum(0.0, state.m * state.phi + state.g3 / cfg.rho3)


def curvature(phi, eps_div):
    q = grad_forward(phi)
    return div_backward(q / (magnitude(q) + eps_div))


def f1_gradient(phi, cfg, l):
    """Pointwise derivative of ``-omega phi + mu |grad H(phi)| + nu l phi^2``.

    The length term uses the curvature form ``-mu H'(phi) div(grad phi / |grad phi|)``.
    """
    return (-cfg.omega
            - cfg.mu * delta_smooth(phi, cfg.delta) * curvature(phi, cfg.eps_div)
            + 2.0 * cfg.nu * l * phi)


def f2_gradient(phi, cfg, m, l):
    return f1_gradient(phi, cfg, l) + cfg.lam * m * ((m * phi) > 0)


def energy_f1(phi, cfg, l):
    """Smoothed discrete energy whose derivative :func:`f1_gradient` approximates."""
    length = magnitude(grad_forward(heaviside_smooth(phi, cfg.delta)))
    return float(np.sum(-cfg.omega * phi + cfg.mu * length + cfg.nu * l * phi * phi))


def energy_f2(phi, cfg, m, l):
    return energy_f1(phi, cfg, l) + float(np.sum(cfg.lam * np.maximum(m * phi, 0.0)))


def _rhs_common(state, cfg):
    return (-laplacian_central(state.g2 - cfg.rho2 * state.z2)
            + div_backward(state.g1 - cfg.rho1 * state.z1)
            + cfg.rho0 * state.phi)


def rhs_exact(state, cfg):
    return (_rhs_common(state, cfg)
            - state.m * (state.g3 + cfg.rho3 * (state.phi - state.z3))
            - f1_gradient(state.phi, cfg, state.l))


def rhs_outlier(state, cfg):
    return _rhs_common(state, cfg) - f2_gradient(state.phi, cfg, state.m, state.l)


def update_phi(state, cfg, plan, exact=True):
    g = rhs_exact(state, cfg) if exact else rhs_outlier(state, cfg)
    return solve_biharmonic_split(plan, g)


def update_multipliers(state, cfg, exact=True):
    g1 = state.g1 + cfg.rho1 * (grad_forward(state.phi) - state.z1)
    g2 = state.g2 + cfg.rho2 * (laplacian_central(state.phi) - state.z2)
    g3 = state.g3 + cfg.rho3 * (state.m * state.phi - state.z3) if exact else state.g3
    return g1, g2, g3


def convergence_metric(phi_new, phi_old):
    return float(np.mean(np.abs(np.asarray(phi_new) - np.asarray(phi_old))))


def margin(mask):
    """Smallest distance, in pixels, from a foreground pixel to the frame edge."""
    idx = np.argwhere(mask)
    M, N = mask.shape
    return int(min(idx[:, 0].min(), M - 1 - idx[:, 0].max(),
                   idx[:, 1].min(), N - 1 - idx[:, 1].max()))


def padding_for(mask, cfg):
    if cfg.pad is not None:
        return int(cfg.pad)
    need = max(4, math.ceil(cfg.c) + 4)
    return need if margin(mask) < need else 0


def initial_phi(mask, cfg):
    """Initial level set and landmarks according to ``cfg.init``."""
    if cfg.init == "polygon":
        init = init_polygon_clusters(mask, cfg.n_angles, cfg.c)
        if init.fallback:
            log.info("polygon initialization degenerate; using the mask's signed distance")
        return init.phi, init.landmarks
    empty = LandmarkSet(mask.shape)
    if cfg.init == "percentile":
        return init_polygon_percentile(mask, cfg.n_angles, cfg.percentile), empty
    return signed_distance(mask), empty


def _prepare(mask, cfg, phi0, landmarks):
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2 or not mask.any():
        raise ValueError("empty set: mask has no foreground pixels")
    if landmarks is not None and not isinstance(landmarks, LandmarkSet):
        landmarks = LandmarkSet(mask.shape, [tuple(map(int, p)) for p in landmarks])
    pad = padding_for(mask, cfg)
    big = np.pad(mask, pad)
    if phi0 is None:
        phi0, found = initial_phi(big, cfg)
        if landmarks is None:
            landmarks = found
        else:
            landmarks = LandmarkSet(big.shape, [(m + pad, n + pad) for m, n in landmarks.points])
    else:
        phi0 = np.asarray(phi0, dtype=np.float64)
        if phi0.shape != mask.shape:
            raise ValueError(f"phi0 shape {phi0.shape} does not match mask {mask.shape}")
        if pad:
            phi0 = signed_distance(np.pad(phi0 <= 0, pad))
        landmarks = LandmarkSet(big.shape, [(m + pad, n + pad) for m, n in
                                            (landmarks.points if landmarks else [])])
    if margin(big) < cfg.c:
        log.warning("c=%g exceeds the image margin %d; the solver may not converge",
                    cfg.c, margin(big))
    return big, phi0, landmarks, pad


def _iterate(state, cfg, exact, callback=None):
    """Run the ADMM loop in place.

    Returns the metric history, the status and the output level set: the last
    iterate on convergence, otherwise the mean of the final ``cfg.avg_window``
    iterates, which damps the limit cycle the nonconvex projections settle into.
    """
    plan = build_plan(*state.phi.shape, cfg.rho0, cfg.rho2)
    history = []
    status = "max_iter"
    first_avg = max(1, cfg.max_iter - cfg.avg_window + 1)
    total = np.zeros_like(state.phi)
    for t in range(cfg.max_iter):
        state.z1 = update_z1(state, cfg)
        state.z2 = update_z2(state, cfg)
        if exact:
            state.z3 = update_z3(state, cfg)
        phi_new = update_phi(state, cfg, plan, exact)
        if not np.all(np.isfinite(phi_new)):
            raise NumericalAbort(f"non-finite level set at iteration {t + 1}")
        metric = convergence_metric(phi_new, state.phi)
        state.phi = phi_new
        state.g1, state.g2, state.g3 = update_multipliers(state, cfg, exact)
        state.iter = t + 1
        if state.iter >= first_avg:
            total += phi_new
        history.append(metric)
        if callback is not None:
            callback(state, metric)
        if metric <= cfg.tol:
            status = "converged"
            break
    if status == "converged":
        return history, status, state.phi.copy()
    return history, status, total / (cfg.max_iter - first_avg + 1)


def _solve(mask, cfg, phi0, landmarks, exact, callback):
    big, phi0, landmarks, pad = _prepare(mask, cfg, phi0, landmarks)
    state = AdmmState(phi=phi0, m=big, l=landmarks.indicator)
    history, status, phi = _iterate(state, cfg, exact, callback)
    violation = float(np.max(phi[big], initial=0.0))
    if exact:
        # the containment constraint is only met in the limit; project onto it
        phi = np.where(big, np.minimum(phi, 0.0), phi)
    energy = (energy_f1(phi, cfg, state.l) if exact
              else energy_f2(phi, cfg, state.m, state.l))
    M, N = mask.shape
    phi = phi[pad:pad + M, pad:pad + N]
    report = SolveReport(state.iter, history[-1], energy, history, status, violation)
    return phi, phi <= 0, report


def run_exact(mask, landmarks=None, cfg=None, phi0=None, callback=None):
    """Convex hull of every foreground pixel.

    Returns ``(phi, hull_mask, report)`` on the input grid. ``landmarks`` and
    ``phi0`` default to the polygon initialization of ``cfg.init``.
    """
    cfg = SolverConfig.exact() if cfg is None else cfg
    return _solve(mask, cfg, phi0, landmarks, True, callback)


def run_outlier(mask, cfg=None, phi0=None, landmarks=None, callback=None):
    """Convex hull that may leave isolated pixels outside, weighted by ``cfg.lam``."""
    cfg = SolverConfig.outlier() if cfg is None else cfg
    return _solve(mask, cfg, phi0, landmarks, False, callback)
