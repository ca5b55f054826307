import numpy as np
import pytest

import tzitzeica as tz
from tzitzeica.errors import DegenerateMetricError
from tzitzeica.grid import PeriodicGrid, field_from_function
from tzitzeica.invariants import (
    cauchy_riemann_residual,
    christoffel_conformal,
    christoffel_from_field,
    christoffel_generic,
    closed_form_tensor,
    codazzi_residual,
    gauss_curvature,
    gauss_residual,
    hermitian_induced,
    induced_tensors,
    lower_tensor,
    mean_curvature_vector,
    riemann,
    scalar_invariants,
    sphere_reduction_check,
    trace_vector,
)

from conftest import loglog_slope

E1 = np.array([1.0, 0.0, 0.0], dtype=complex)
E2 = np.array([0.0, 1.0, 0.0], dtype=complex)


# ---------------------------------------------------------------------------
# induced metric and algebraic tensors
# ---------------------------------------------------------------------------


def test_hermitian_induced_orthonormal_pair():
    g, om = hermitian_induced(E1, E2)
    assert np.allclose(g, np.eye(2))
    assert np.allclose(om, 0.0)


def test_hermitian_induced_complex_pair():
    g, om = hermitian_induced(E1, 1j * E1)
    assert np.allclose(g, np.eye(2))
    assert om[0, 1] == 1.0 and om[1, 0] == -1.0
    # skew form agrees with the Euclidean product against the rotated vector
    from tzitzeica.linalg3 import euclidean_inner

    e2 = 1j * E1
    assert abs(om[0, 1] - euclidean_inner(1j * E1, e2)) < 1e-15


def test_hermitian_induced_rejects_degenerate():
    with pytest.raises(DegenerateMetricError):
        hermitian_induced(E1, E1)


def test_induced_tensors_zero_skew():
    g = np.array([[2.0, 0.3], [0.3, 1.5]])
    out = induced_tensors(g, np.zeros((2, 2)))
    assert np.allclose(out.omega_mix, 0.0)
    assert np.allclose(out.f_low, g)
    assert np.allclose(out.f_mix, np.eye(2))


def test_induced_tensors_against_matrix_algebra():
    w = 0.37
    om = np.array([[0.0, w], [-w, 0.0]])
    out = induced_tensors(np.eye(2), om)
    assert np.allclose(out.omega_mix, [[0.0, w], [-w, 0.0]])
    assert np.allclose(out.f_mix, (1.0 - w * w) * np.eye(2))
    # generic oracle: brute-force the defining formulas with np.linalg.inv
    rng = np.random.default_rng(3)
    a = rng.standard_normal((2, 2))
    g = a @ a.T + 2.0 * np.eye(2)
    w2 = rng.standard_normal()
    om2 = np.array([[0.0, w2], [-w2, 0.0]])
    out2 = induced_tensors(g, om2)
    ginv = np.linalg.inv(g)
    assert np.allclose(out2.omega_mix, ginv @ om2, atol=1e-12)
    assert np.allclose(out2.f_low, g + om2 @ ginv @ om2, atol=1e-12)
    assert np.allclose(out2.f_mix, np.eye(2) + (ginv @ om2) @ (ginv @ om2), atol=1e-12)


def test_omega_trace_is_exactly_zero():
    rng = np.random.default_rng(4)
    for _ in range(20):
        a = rng.standard_normal((2, 2))
        g = a @ a.T + 2.0 * np.eye(2)
        w = rng.standard_normal()
        om = np.array([[0.0, w], [-w, 0.0]])
        out = induced_tensors(g, om)
        assert np.trace(out.omega_mix) == 0.0


# ---------------------------------------------------------------------------
# connection and curvature
# ---------------------------------------------------------------------------


def test_christoffel_conformal_linear_exponent():
    alpha = 0.83
    ux = np.full((4, 4), alpha)
    uy = np.zeros((4, 4))
    gam = christoffel_conformal(ux, uy)
    assert np.allclose(gam[..., 0, 0, 0], alpha / 2)
    assert np.allclose(gam[..., 1, 0, 1], alpha / 2)
    assert np.allclose(gam[..., 0, 1, 1], -alpha / 2)
    assert np.allclose(gam[..., 1, 0, 0], 0.0)


def test_christoffel_constant_exponent_vanishes():
    g = PeriodicGrid(16, 16, 1.0, 1.0)
    u = tz.ScalarFieldPeriodic(g, np.full((16, 16), 0.7))
    assert np.abs(christoffel_from_field(u)).max() < 1e-14


def test_christoffel_symmetry_in_lower_indices():
    g = PeriodicGrid(16, 16, 1.0, 1.3)
    u = field_from_function(g, lambda x, y: 0.2 * np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y / 1.3))
    gam = christoffel_from_field(u)
    assert np.array_equal(gam, np.swapaxes(gam, -1, -2))


def test_generic_christoffel_agrees_with_conformal_closed_form():
    errs, hs = [], []
    for n in (16, 32, 64):
        g = PeriodicGrid(n, n, 1.0, 1.0)
        u = field_from_function(
            g, lambda x, y: 0.3 * np.cos(2 * np.pi * x) + 0.2 * np.sin(2 * np.pi * y + 1.0)
        )
        gam_closed = christoffel_from_field(u)
        conf = 2.0 * np.exp(u.values)
        metric = np.zeros((n, n, 2, 2))
        metric[..., 0, 0] = conf
        metric[..., 1, 1] = conf
        gam_gen = christoffel_generic(metric, g.hx, g.hy)
        errs.append(np.abs(gam_gen - gam_closed).max())
        hs.append(g.hx)
    assert loglog_slope(hs, errs) > 1.9


def test_riemann_zero_connection():
    gam = np.zeros((8, 8, 2, 2, 2))
    assert np.abs(riemann(gam, 0.1, 0.1)).max() == 0.0


def test_riemann_antisymmetry_exact():
    g = PeriodicGrid(16, 16, 1.0, 1.0)
    u = field_from_function(g, lambda x, y: 0.3 * np.sin(2 * np.pi * x) + 0.1 * np.cos(2 * np.pi * y))
    riem = riemann(christoffel_from_field(u), g.hx, g.hy)
    assert np.abs(riem + np.swapaxes(riem, -1, -2)).max() == 0.0
    assert np.abs(riem).max() > 0.0


def test_flat_conformal_metric_curvature_zero():
    g = PeriodicGrid(16, 16, 1.0, 1.0)
    u = tz.ScalarFieldPeriodic(g, np.zeros((16, 16)))
    riem = riemann(christoffel_from_field(u), g.hx, g.hy)
    metric = np.zeros((16, 16, 2, 2))
    metric[..., 0, 0] = 2.0
    metric[..., 1, 1] = 2.0
    assert np.abs(gauss_curvature(metric, riem)).max() == 0.0


def _sphere_band_curvature(n, scale=1.0):
    """K of the metric diag(1, sin^2 x)/scale^2 sampled on x' = scale*x."""
    x0, x1 = 0.7, np.pi - 0.7
    x = np.linspace(x0, x1, n) * scale
    y = np.linspace(0.0, 1.0, n)
    hx, hy = x[1] - x[0], y[1] - y[0]
    xx = np.tile(x, (n, 1))
    metric = np.zeros((n, n, 2, 2))
    metric[..., 0, 0] = 1.0 / scale**2
    metric[..., 1, 1] = np.sin(xx / scale) ** 2 / scale**2
    gam = christoffel_generic(metric, hx, hy, periodic=False)
    riem = riemann(gam, hx, hy, periodic=False)
    k = gauss_curvature(metric, riem)
    return k[2:-2, 2:-2]


def test_round_sphere_curvature_is_one():
    # one-sided band edges keep the sup error near second order; the clean
    # slope measurement lives in the periodic revolution-torus test below
    errs, hs = [], []
    for n in (65, 129, 257):
        k = _sphere_band_curvature(n)
        errs.append(np.abs(k - 1.0).max())
        hs.append(1.0 / n)
    assert errs[-1] < 1e-3
    assert errs[0] > errs[1] > errs[2]
    assert loglog_slope(hs, errs) > 1.5


def test_revolution_torus_curvature_generic_path():
    # g = diag(1, (2 + cos x)^2) has K = cos x / (2 + cos x); fully periodic,
    # so the generic connection/curvature path converges at stencil order
    errs, hs = [], []
    for n in (32, 64, 128):
        hx, hy = 2 * np.pi / n, 1.0 / n
        x = np.arange(n) * hx
        xx = np.tile(x, (n, 1))
        metric = np.zeros((n, n, 2, 2))
        metric[..., 0, 0] = 1.0
        metric[..., 1, 1] = (2.0 + np.cos(xx)) ** 2
        gam = christoffel_generic(metric, hx, hy, periodic=True)
        riem = riemann(gam, hx, hy, periodic=True)
        k = gauss_curvature(metric, riem)
        errs.append(np.abs(k - np.cos(xx) / (2.0 + np.cos(xx))).max())
        hs.append(hx)
    assert loglog_slope(hs, errs) > 1.9


def test_gauss_curvature_invariant_under_geometry_preserving_rescale():
    k = _sphere_band_curvature(129, scale=2.0)
    assert np.abs(k - 1.0).max() < 1e-3


# ---------------------------------------------------------------------------
# cubic form invariants
# ---------------------------------------------------------------------------


def _conformal_metric(u, radius=1.0):
    c = 2.0 * radius**2 * np.exp(np.asarray(u, dtype=float))
    g = np.zeros(np.shape(u) + (2, 2))
    g[..., 0, 0] = c
    g[..., 1, 1] = c
    return g


def test_scalar_invariants_flat_case():
    t = closed_form_tensor(0.0, 0.0)
    h2, t2, t4 = scalar_invariants(t, _conformal_metric(0.0))
    assert abs(h2) < 1e-15
    assert abs(t2 - 2.0) < 1e-14
    assert abs(t4 - 2.0) < 1e-14


def test_scalar_invariants_log2_case():
    u = np.log(2.0)
    t = closed_form_tensor(u, 0.9)
    h2, t2, t4 = scalar_invariants(t, _conformal_metric(u))
    assert abs(t2 - 0.25) < 1e-14
    assert abs(t4 - 0.03125) < 1e-14


def test_scalar_invariants_zero_tensor():
    h2, t2, t4 = scalar_invariants(np.zeros((2, 2, 2)), np.eye(2))
    assert h2 == 0.0 and t2 == 0.0 and t4 == 0.0


def test_closed_form_invariants_at_random_nodes():
    rng = np.random.default_rng(11)
    u = rng.uniform(-0.8, 0.8, size=(5, 7))
    theta = 1.234
    radius = 1.7
    t = closed_form_tensor(u, theta)
    h2, t2, t4 = scalar_invariants(t, _conformal_metric(u, radius))
    assert np.abs(h2).max() < 1e-13
    assert np.abs(t2 * radius**2 * np.exp(3 * u) - 2.0).max() < 1e-12
    assert np.abs(t4 * radius**4 * np.exp(6 * u) - 2.0).max() < 1e-12


def test_lowered_tensor_fully_symmetric():
    rng = np.random.default_rng(12)
    u = rng.uniform(-0.5, 0.5, size=(3, 4))
    t = closed_form_tensor(u, 0.37)
    low = lower_tensor(t, _conformal_metric(u, 1.3))
    for perm in ((0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        permuted = np.transpose(low, (0, 1) + tuple(2 + p for p in perm))
        assert np.abs(low - permuted).max() < 1e-12


def test_gauss_residual_arithmetic():
    assert gauss_residual(0.0, 0.0, 2.0, 1.0) == 0.0
    assert gauss_residual(1.0, 0.0, 2.0, 1.0) == 2.0


def test_mean_curvature_vector_cases():
    f1 = np.array([1.0, 0.0, 0.0], dtype=complex)
    f2 = np.array([0.0, 1.0, 0.0], dtype=complex)
    # closed-form tensor is traceless
    t = closed_form_tensor(0.3, 1.1)
    v = mean_curvature_vector(t, f1, f2, _conformal_metric(0.3))
    assert np.abs(v).max() < 1e-14
    # single-component tensor picks out F_1
    t1 = np.zeros((2, 2, 2))
    t1[0, 0, 0] = 1.0
    v1 = mean_curvature_vector(t1, f1, f2, np.eye(2))
    assert np.allclose(v1, f1)
    assert np.abs(mean_curvature_vector(np.zeros((2, 2, 2)), f1, f2, np.eye(2))).max() == 0.0


def test_sphere_reduction_check():
    g = np.array([[2.0, 0.1], [0.1, 1.0]])
    b, d, ok = sphere_reduction_check(g, np.zeros((2, 2)), radius=2.0)
    assert ok
    assert np.allclose(b, -g / 2.0)
    assert np.allclose(d, 0.0)
    om = np.array([[0.0, 0.1], [-0.1, 0.0]])
    _, _, bad = sphere_reduction_check(g, om, radius=2.0)
    assert not bad


# ---------------------------------------------------------------------------
# compatibility residuals on fields
# ---------------------------------------------------------------------------


def test_codazzi_zero_tensor():
    g = PeriodicGrid(16, 16, 1.0, 1.0)
    u = field_from_function(g, lambda x, y: 0.2 * np.sin(2 * np.pi * x))
    gam = christoffel_from_field(u)
    res = codazzi_residual(np.zeros((16, 16, 2, 2, 2)), gam, _conformal_metric(u.values), g.hx, g.hy)
    assert np.abs(res).max() == 0.0


def test_codazzi_closed_form_vanishes(wave61):
    # the closed-form tensor satisfies the compatibility identity pointwise
    # (its lowered components are constant and the connection contractions
    # cancel algebraically), so the residual sits at rounding level
    for n in (16, 32, 64):
        g = PeriodicGrid(n, 8, wave61.period, 1.0)
        u = tz.lift_1d(wave61, g)
        t = closed_form_tensor(u.values, 0.4)
        gam = christoffel_from_field(u)
        res = codazzi_residual(t, gam, _conformal_metric(u.values), g.hx, g.hy)
        assert res.max() < 1e-12


def test_codazzi_detects_perturbation(wave61):
    g = PeriodicGrid(32, 8, wave61.period, 1.0)
    u = tz.lift_1d(wave61, g)
    t = closed_form_tensor(u.values, 0.4)
    t[..., 0, 0, 0] += 0.1
    gam = christoffel_from_field(u)
    res = codazzi_residual(t, gam, _conformal_metric(u.values), g.hx, g.hy)
    assert res.max() > 1e-2


def test_cauchy_riemann_constant_angle(wave61):
    g = PeriodicGrid(32, 8, wave61.period, 1.0)
    u = tz.lift_1d(wave61, g)
    a = np.exp(-u.values) * np.cos(0.7)
    b = np.exp(-u.values) * np.sin(0.7)
    assert cauchy_riemann_residual(a, b, u.values, g.hx, g.hy) < 1e-11


def test_cauchy_riemann_holomorphic_patch():
    # e^u (a + i b) = z^3 on a non-periodic patch is holomorphic for any u
    def residual(n):
        x = np.linspace(0.5, 1.5, n)
        y = np.linspace(-0.5, 0.5, n)
        xx, yy = np.meshgrid(x, y)
        u = 0.1 * np.sin(xx + yy)
        a = (xx**3 - 3 * xx * yy**2) * np.exp(-u)
        b = (3 * xx**2 * yy - yy**3) * np.exp(-u)
        return (
            cauchy_riemann_residual(a, b, u, x[1] - x[0], y[1] - y[0], periodic=False),
            x[1] - x[0],
        )

    (r1, _h1), (r2, _h2) = residual(129), residual(65)
    assert r1 < 1e-2
    assert 2.5 < r2 / r1 < 6.0  # halving h quarters the defect


def test_cauchy_riemann_noise_is_large():
    rng = np.random.default_rng(5)
    g = PeriodicGrid(32, 32, 1.0, 1.0)
    u = np.zeros((32, 32))
    a = rng.standard_normal((32, 32))
    b = rng.standard_normal((32, 32))
    assert cauchy_riemann_residual(a, b, u, g.hx, g.hy) > 1.0
