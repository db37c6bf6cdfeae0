import math

import numpy as np
import pytest
from conftest import smooth_field
from hypothesis import given, settings
from hypothesis import strategies as st

from lshull import admm, shapes
from lshull.admm import AdmmState, SolverConfig
from lshull.grid import inner_product
from lshull.metrics import relative_error
from lshull.spectral import apply_biharmonic, build_plan


def random_state(seed, M=9, N=7):
    rng = np.random.default_rng(seed)
    s = AdmmState(phi=rng.normal(size=(M, N)) * 3, m=rng.random((M, N)) < 0.4,
                  l=rng.random((M, N)) < 0.2)
    s.z1 = rng.normal(size=(2, M, N))
    s.g1 = rng.normal(size=(2, M, N))
    s.z2, s.z3, s.g2, s.g3 = (rng.normal(size=(M, N)) for _ in range(4))
    return s


def site_lap(f, m, n):
    M, N = f.shape
    return f[(m + 1) % M, n] + f[m - 1, n] + f[m, (n + 1) % N] + f[m, n - 1] - 4 * f[m, n]


def site_div(q, m, n):
    return q[0][m, n] - q[0][m - 1, n] + q[1][m, n] - q[1][m, n - 1]


def site_grad(f, m, n):
    M, N = f.shape
    return f[(m + 1) % M, n] - f[m, n], f[m, (n + 1) % N] - f[m, n]


def site_f1(phi, cfg, l, m, n):
    M, N = phi.shape
    eps = cfg.eps_div

    def unit(a, b):
        gx, gy = site_grad(phi, a % M, b % N)
        r = math.hypot(gx, gy) + eps
        return gx / r, gy / r

    here, left, down = unit(m, n), unit(m - 1, n), unit(m, n - 1)
    kappa = here[0] - left[0] + here[1] - down[1]
    dirac = cfg.delta / math.pi / (phi[m, n] ** 2 + cfg.delta ** 2)
    return -cfg.omega - cfg.mu * dirac * kappa + 2 * cfg.nu * l[m, n] * phi[m, n]


def test_config_defaults_and_presets():
    cfg = SolverConfig()
    assert (cfg.rho0, cfg.rho2, cfg.rho3, cfg.omega, cfg.mu, cfg.nu, cfg.c) == (1, 15, 1, 0.01, 5, 10, 20)
    assert cfg.rho1 == pytest.approx(2 * math.sqrt(15))
    out = SolverConfig.outlier()
    assert (out.rho2, out.omega, out.mu, out.nu, out.lam, out.init) == (20, 0.005, 3, 20, 3, "percentile")
    assert out.with_(lam=1).lam == 1
    for bad in ({"rho0": 0}, {"tol": 0}, {"c": -1}, {"max_iter": 0}, {"init": "nope"}, {"lam": -1}):
        with pytest.raises(ValueError):
            SolverConfig(**bad)


def test_z1_examples():
    s = AdmmState(phi=np.zeros((2, 2)), m=np.zeros((2, 2)), l=np.zeros((2, 2)))
    s.g1 = np.zeros((2, 2, 2))
    s.g1[:, 0, 0] = (3 * math.sqrt(15) * 2, 4 * math.sqrt(15) * 2)
    z = admm.update_z1(s, SolverConfig())
    assert z[:, 0, 0] == pytest.approx([0.6, 0.8])
    assert z[:, 1, 1].tolist() == [1.0, 0.0]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_z_invariants(seed):
    s = random_state(seed)
    cfg = SolverConfig()
    z1 = admm.update_z1(s, cfg)
    np.testing.assert_allclose(np.hypot(z1[0], z1[1]), 1.0, atol=1e-12)
    z2 = admm.update_z2(s, cfg)
    assert np.all(z2[s.phi <= cfg.c] >= 0)
    assert np.all(admm.update_z3(s, cfg) <= 0)


def test_z2_and_z3_examples():
    cfg = SolverConfig(c=20)
    s = AdmmState(phi=np.array([[-5.0, 21.0, 100.0]]), m=np.ones((1, 3)), l=np.zeros((1, 3)))
    s.phi = np.array([[-5.0, 21.0, 100.0]])
    lap = admm.laplacian_central(s.phi)
    s.g2 = cfg.rho2 * (np.array([[-0.5, -0.5, 0.7]]) - lap)
    np.testing.assert_allclose(admm.update_z2(s, cfg), [[0.0, -0.5, 0.7]], atol=1e-12)
    s = AdmmState(phi=np.array([[0.7, -0.2, 5.0]]), m=np.array([[1, 1, 0]]), l=np.zeros((1, 3)))
    assert admm.update_z3(s, cfg).tolist() == [[0.0, -0.2, 0.0]]


def test_f1_gradient_examples():
    cfg = SolverConfig()
    g = admm.f1_gradient(np.full((6, 6), 50.0), cfg, np.zeros((6, 6)))
    np.testing.assert_allclose(g, -0.01)
    l = np.zeros((6, 6))
    l[2, 3] = 1
    g = admm.f1_gradient(np.full((6, 6), 2.0), SolverConfig(omega=0, nu=10), l)
    assert g[2, 3] == pytest.approx(40.0)


def test_f1_gradient_matches_site_oracle():
    s = random_state(3)
    cfg = SolverConfig()
    g = admm.f1_gradient(s.phi, cfg, s.l)
    for m in range(9):
        for n in range(7):
            assert g[m, n] == pytest.approx(site_f1(s.phi, cfg, s.l, m, n), abs=1e-12)


def test_f2_gradient_kink():
    cfg = SolverConfig(omega=0, mu=0, nu=0, lam=3)
    phi = np.array([[3.0, -3.0, 0.0]])
    g = admm.f2_gradient(phi, cfg, np.ones((1, 3)), np.zeros((1, 3)))
    assert g.tolist() == [[3.0, 0.0, 0.0]]


@pytest.mark.parametrize("kind", ["exact", "outlier"])
def test_criterion_12_gradient_check(kind):
    """Directional derivative of the smoothed discrete energy vs the analytic gradient."""
    M = 64
    x, y = np.meshgrid(np.arange(M), np.arange(M), indexing="ij")
    cfg = SolverConfig.exact() if kind == "exact" else SolverConfig.outlier()
    h = 1e-4
    for seed in range(20):
        rng = np.random.default_rng(seed)
        phi = np.hypot(x - 31.7, y - 32.2) - 18 + 2 * smooth_field(rng)
        eta = smooth_field(rng)
        l = (rng.random((M, M)) < 0.02).astype(float)
        m = (rng.random((M, M)) < 0.3).astype(float)
        if kind == "exact":
            energy = lambda p: admm.energy_f1(p, cfg, l)
            grad = admm.f1_gradient(phi, cfg, l)
        else:
            energy = lambda p: admm.energy_f2(p, cfg, m, l)
            grad = admm.f2_gradient(phi, cfg, m, l)
        fd = (energy(phi + h * eta) - energy(phi)) / h
        assert abs(fd - inner_product(grad, eta)) <= 2e-2 * abs(fd)


def test_length_term_gradient_is_consistent_in_delta():
    """The curvature form differs from the exact discrete derivative by O(1/delta)."""
    M = 64
    x, y = np.meshgrid(np.arange(M), np.arange(M), indexing="ij")

    def median_error(delta):
        cfg = SolverConfig(omega=0, nu=0, mu=5, delta=delta)
        errs = []
        for seed in range(20):
            rng = np.random.default_rng(seed)
            phi = np.hypot(x - 31.7, y - 32.2) - 18 + smooth_field(rng)
            eta = smooth_field(rng)
            zero = np.zeros_like(phi)
            fd = (admm.energy_f1(phi + 1e-4 * eta, cfg, zero) - admm.energy_f1(phi, cfg, zero)) / 1e-4
            errs.append(abs(fd - inner_product(admm.f1_gradient(phi, cfg, zero), eta)) / abs(fd))
        return np.median(errs)

    coarse, fine = median_error(1.5), median_error(12.0)
    assert fine < 0.02
    assert fine < coarse / 4


def test_rhs_examples():
    k = 2.5
    z = np.zeros((5, 5))
    s = AdmmState(phi=np.full((5, 5), k), m=z, l=z)
    cfg = SolverConfig(omega=0, nu=0)
    np.testing.assert_allclose(admm.rhs_exact(s, cfg), cfg.rho0 * k)
    s = AdmmState(phi=np.full((5, 5), k), m=np.ones((5, 5)), l=z)
    np.testing.assert_allclose(admm.rhs_exact(s, SolverConfig(omega=0, nu=0, rho3=3)), (1 - 3) * k)
    np.testing.assert_allclose(admm.rhs_outlier(s, SolverConfig(omega=0, nu=0, lam=0)), k)
    cfg = SolverConfig(omega=0, mu=0, nu=0, lam=3)
    np.testing.assert_allclose(admm.rhs_outlier(s, cfg), k - 3)


@pytest.mark.parametrize("exact", [True, False])
def test_rhs_matches_site_oracle(exact):
    s = random_state(17)
    cfg = SolverConfig.exact() if exact else SolverConfig.outlier()
    g = admm.rhs_exact(s, cfg) if exact else admm.rhs_outlier(s, cfg)
    a = s.g2 - cfg.rho2 * s.z2
    b = s.g1 - cfg.rho1 * s.z1
    for m in range(9):
        for n in range(7):
            want = -site_lap(a, m, n) + site_div(b, m, n) + cfg.rho0 * s.phi[m, n]
            want -= site_f1(s.phi, cfg, s.l, m, n)
            if exact:
                want -= s.m[m, n] * (s.g3[m, n] + cfg.rho3 * (s.phi[m, n] - s.z3[m, n]))
            else:
                want -= cfg.lam * s.m[m, n] * (s.m[m, n] * s.phi[m, n] > 0)
            assert g[m, n] == pytest.approx(want, abs=1e-12)


def test_update_phi_solves_the_linear_system():
    s = random_state(5, 16, 12)
    cfg = SolverConfig()
    plan = build_plan(16, 12, cfg.rho0, cfg.rho2)
    phi = admm.update_phi(s, cfg, plan, exact=True)
    g = admm.rhs_exact(s, cfg)
    assert np.max(np.abs(apply_biharmonic(plan, phi) - g)) <= 1e-9 * np.max(np.abs(g))
    # constant data gives a constant solution
    z = np.zeros((16, 12))
    s = AdmmState(phi=np.full((16, 12), 4.0), m=z, l=z)
    np.testing.assert_allclose(admm.update_phi(s, SolverConfig(omega=0), plan), 4.0)


def test_multipliers():
    s = random_state(8)
    cfg = SolverConfig()
    g1, g2, g3 = admm.update_multipliers(s, cfg, exact=True)
    for m in range(9):
        for n in range(7):
            gx, gy = site_grad(s.phi, m, n)
            assert g1[0, m, n] == pytest.approx(s.g1[0, m, n] + cfg.rho1 * (gx - s.z1[0, m, n]), abs=1e-12)
            assert g1[1, m, n] == pytest.approx(s.g1[1, m, n] + cfg.rho1 * (gy - s.z1[1, m, n]), abs=1e-12)
            assert g2[m, n] == pytest.approx(s.g2[m, n] + cfg.rho2 * (site_lap(s.phi, m, n) - s.z2[m, n]), abs=1e-12)
            assert g3[m, n] == pytest.approx(s.g3[m, n] + cfg.rho3 * (s.m[m, n] * s.phi[m, n] - s.z3[m, n]), abs=1e-12)
    assert admm.update_multipliers(s, cfg, exact=False)[2] is s.g3
    # a consistent state leaves the multipliers alone
    s.z1, s.z2, s.z3 = admm.grad_forward(s.phi), admm.laplacian_central(s.phi), s.m * s.phi
    g1, g2, g3 = admm.update_multipliers(s, cfg)
    assert np.array_equal(g1, s.g1) and np.array_equal(g2, s.g2) and np.array_equal(g3, s.g3)


def test_convergence_metric():
    a = np.zeros((4, 5))
    assert admm.convergence_metric(a, a) == 0
    assert admm.convergence_metric(a + 2, a) == 2
    b = a.copy()
    b[1, 1] = 3
    assert admm.convergence_metric(b, a) == pytest.approx(3 / 20)


def test_padding_rule():
    cfg = SolverConfig(c=20)
    mask = shapes.disk(128, 30)
    assert admm.padding_for(mask, cfg) == 0
    edge = np.zeros((64, 64), dtype=bool)
    edge[0:10, 20:30] = True
    assert admm.padding_for(edge, cfg) == 24
    assert admm.padding_for(edge, cfg.with_(pad=3)) == 3


def test_short_exact_run_contains_input_and_reports_history():
    mask = shapes.star(64, 22, 9)
    calls = []
    phi, hull, rep = admm.run_exact(mask, cfg=SolverConfig(max_iter=40),
                                    callback=lambda st, metric: calls.append(metric))
    assert phi.shape == mask.shape
    assert not (mask & ~hull).any()
    assert rep.status == "max_iter" and not rep.converged
    assert rep.iterations == len(rep.history) == len(calls) == 40
    assert np.array_equal(hull, phi <= 0)


def test_run_is_deterministic():
    mask = shapes.plus_sign(64, 20, 6)
    a = admm.run_outlier(mask, SolverConfig.outlier(max_iter=30))
    b = admm.run_outlier(mask, SolverConfig.outlier(max_iter=30))
    assert a[0].tobytes() == b[0].tobytes()
    assert a[2].history == b[2].history


def test_loose_tolerance_converges():
    mask = shapes.disk(64, 15)
    _, _, rep = admm.run_exact(mask, cfg=SolverConfig(tol=1.0, max_iter=50))
    assert rep.converged and rep.iterations < 50


def test_non_finite_aborts():
    mask = shapes.disk(64, 15)
    phi0 = np.where(mask, -1.0, 1.0)
    phi0[0, 0] = np.nan
    with pytest.raises(admm.NumericalAbort):
        admm.run_exact(mask, cfg=SolverConfig(max_iter=5, pad=0), phi0=phi0)


def test_empty_mask():
    with pytest.raises(ValueError, match="empty set"):
        admm.run_exact(np.zeros((16, 16), dtype=bool))


def test_small_margin_warns(caplog):
    mask = shapes.disk(64, 25)
    with caplog.at_level("WARNING"):
        admm.run_exact(mask, cfg=SolverConfig(max_iter=2, pad=0))
    assert "margin" in caplog.text


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="soft containment leaves the outlier hull 2 px off the clean disk (3.3%)")
def test_outlier_driver_agrees_with_exact_on_clean_disk():
    mask = shapes.disk(128, 30)
    _, exact, _ = admm.run_exact(mask)
    _, robust, _ = admm.run_outlier(mask)
    assert relative_error(exact, robust) <= 0.02
