"""Induced tensors and scalar invariants of immersed surfaces.

Index conventions: coordinate index 0 is x (array axis 1), coordinate index 1
is y (array axis 0).  Tensor fields store component axes last, e.g. a metric
field has shape (ny, nx, 2, 2), connection coefficients gamma[k, i, j] live in
(..., 2, 2, 2) with the upper index first, and curvature r[s, k, i, j] in
(..., 2, 2, 2, 2).  All functions broadcast over leading axes, so single-node
tensors (shape (2, 2) etc.) work unchanged.

The cubic form t[k, i, j] (mixed components, upper index first) is fully
symmetric once lowered with the metric; its trace vector vanishes exactly for
minimal surfaces.  For the conformal family with unit-modulus parameter
e^{i*theta} the closed-form components are

    t^1_11 = e^-u cos(theta)   t^1_12 = t^1_21 = -e^-u sin(theta)
    t^2_22 = e^-u sin(theta)   t^2_11 = -e^-u sin(theta)
    t^1_22 = -e^-u cos(theta)  t^2_12 = t^2_21 = -e^-u cos(theta)

(with the sign of t^2_12 fixed by full symmetry of the lowered tensor).
"""

from dataclasses import dataclass

import numpy as np

from . import grid as gridmod
from .errors import DegenerateMetricError
from .linalg3 import hermitian_inner

SPD_EIG_RATIO = 1e-12


@dataclass
class InducedTensors:
    omega_mix: np.ndarray  # Omega^i_j = g^{ik} w_kj, traceless
    f_low: np.ndarray      # f_ij = g_ij + w_ik g^{ks} w_sj
    f_mix: np.ndarray      # F^i_j = delta + Omega^2


@dataclass
class SymTensor3:
    """Mixed components t[k, i, j] of the cubic form, plus optional context
    (the conformal exponent field, rotation angle, sphere radius) for
    closed-form comparisons."""

    values: np.ndarray
    u: np.ndarray | None = None
    theta: float | None = None
    radius: float | None = None


@dataclass
class HypersurfaceCoefficients:
    """Frame coefficients (b, d, l, m, s) of a codimension-1 ambient manifold;
    only the sphere specialization l = I/R, m = 0, s = 0 is exercised."""

    b: np.ndarray
    d: np.ndarray
    l_mix: np.ndarray
    m_mix: np.ndarray
    s: np.ndarray

    @classmethod
    def sphere(cls, g, omega, radius):
        eye = np.broadcast_to(np.eye(2), np.shape(g)).copy()
        zeros2 = np.zeros(np.shape(g))
        return cls(
            b=-np.asarray(g) / radius,
            d=-np.asarray(omega) / radius,
            l_mix=eye / radius,
            m_mix=zeros2,
            s=np.zeros(np.shape(g)[:-1]),
        )


def _tvalues(t):
    return np.asarray(getattr(t, "values", t))


def check_spd(g, what="metric"):
    eig = np.linalg.eigvalsh(np.asarray(g))
    lo, hi = eig[..., 0], eig[..., 1]
    bad = lo <= SPD_EIG_RATIO * np.abs(hi)
    if np.any(bad):
        raise DegenerateMetricError(
            f"{what} is degenerate at {int(np.count_nonzero(bad))} node(s); "
            f"min eigenvalue ratio {float((lo / np.abs(hi)).min()):.3e}"
        )


def inv2(g):
    """Explicit 2x2 inverse; keeps symmetry bit-exact for symmetric input."""
    g = np.asarray(g)
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
    out = np.empty_like(g)
    out[..., 0, 0] = g[..., 1, 1] / det
    out[..., 1, 1] = g[..., 0, 0] / det
    out[..., 0, 1] = -g[..., 0, 1] / det
    out[..., 1, 0] = -g[..., 1, 0] / det
    return out


def hermitian_induced(e1, e2, check=True):
    """Induced metric g and skew form w from tangent vectors: the Hermitian
    Gram matrix h_ab = <E_a|E_b> splits as g + i w."""
    e = np.stack([np.asarray(e1), np.asarray(e2)], axis=-2)
    h = np.einsum("...ac,...bc->...ab", np.conj(e), e)
    g, omega = h.real, h.imag
    if check:
        check_spd(g, "induced metric")
    return g, omega


def induced_tensors(g, omega):
    """Mixed rotation tensor, its square-dependent companions."""
    g = np.asarray(g, dtype=float)
    omega = np.asarray(omega, dtype=float)
    check_spd(g)
    ginv = inv2(g)
    om = np.einsum("...ik,...kj->...ij", ginv, omega)
    f_low = g + np.einsum("...ik,...ks,...sj->...ij", omega, ginv, omega)
    f_mix = np.broadcast_to(np.eye(2), g.shape).copy() + np.einsum(
        "...ir,...rj->...ij", om, om
    )
    return InducedTensors(omega_mix=om, f_low=f_low, f_mix=f_mix)


# ---------------------------------------------------------------------------
# connection and curvature
# ---------------------------------------------------------------------------


def christoffel_conformal(ux, uy):
    """Connection coefficients of the metric c e^u (dx^2 + dy^2) from the
    derivative fields of u (independent of the constant c)."""
    ux = np.asarray(ux, dtype=float)
    uy = np.asarray(uy, dtype=float)
    gam = np.zeros(ux.shape + (2, 2, 2))
    gam[..., 0, 0, 0] = ux / 2.0
    gam[..., 1, 0, 0] = -uy / 2.0
    gam[..., 0, 0, 1] = gam[..., 0, 1, 0] = uy / 2.0
    gam[..., 1, 1, 1] = uy / 2.0
    gam[..., 0, 1, 1] = -ux / 2.0
    gam[..., 1, 0, 1] = gam[..., 1, 1, 0] = ux / 2.0
    return gam


def christoffel_from_field(u, method="fd4"):
    """Conformal-metric connection evaluated on a periodic exponent field."""
    ux = gridmod.ddx(u.values, u.grid, method)
    uy = gridmod.ddy(u.values, u.grid, method)
    return christoffel_conformal(ux, uy)


def _dfield(values, h, axis, periodic, method):
    if periodic:
        return gridmod.deriv(values, h, axis, method)
    return gridmod.deriv_nonperiodic(values, h, axis)


def christoffel_generic(g, hx, hy, periodic=True, method="fd4"):
    """Levi-Civita connection of an arbitrary 2D metric field via
    gamma^k_ij = g^{ks}/2 (d_i g_sj + d_j g_is - d_s g_ij)."""
    g = np.asarray(g, dtype=float)
    check_spd(g)
    ginv = inv2(g)
    dg = np.stack(
        [
            _dfield(g, hx, gridmod.AXIS_X, periodic, method),
            _dfield(g, hy, gridmod.AXIS_Y, periodic, method),
        ],
        axis=-3,
    )  # dg[..., a, i, j] = d_a g_ij
    bracket = (
        np.einsum("...isj->...sij", dg)
        + np.einsum("...jis->...sij", dg)
        - dg
    )
    return 0.5 * np.einsum("...ks,...sij->...kij", ginv, bracket)


def riemann(gamma, hx, hy, periodic=True, method="fd4"):
    """Curvature tensor r^s_kij = d_i gamma^s_kj - d_j gamma^s_ki
    - gamma^r_ki gamma^s_rj + gamma^r_kj gamma^s_ri.

    In two dimensions only the (i, j) = (0, 1) component is independent; the
    (1, 0) slot is stored as its exact negation, so antisymmetry holds
    bit-for-bit.
    """
    gamma = np.asarray(gamma, dtype=float)
    dgam = [
        _dfield(gamma, hx, gridmod.AXIS_X, periodic, method),
        _dfield(gamma, hy, gridmod.AXIS_Y, periodic, method),
    ]
    riem = np.zeros(gamma.shape + (2,))
    for s in range(2):
        for k in range(2):
            core = (
                dgam[0][..., s, k, 1]
                - dgam[1][..., s, k, 0]
                - np.einsum("...r,...r->...", gamma[..., :, k, 0], gamma[..., s, :, 1])
                + np.einsum("...r,...r->...", gamma[..., :, k, 1], gamma[..., s, :, 0])
            )
            riem[..., s, k, 0, 1] = core
            riem[..., s, k, 1, 0] = -core
    return riem


def gauss_curvature(g, riem):
    """K = (1/2) g^{kj} r^s_ksj."""
    g = np.asarray(g, dtype=float)
    check_spd(g)
    ginv = inv2(g)
    return 0.5 * np.einsum("...kj,...sksj->...", ginv, np.asarray(riem))


def gauss_residual(k_curv, h2, t2, radius):
    """Scalar Gauss identity defect 2K - H^2 + t2 - 2/R^2."""
    return 2.0 * np.asarray(k_curv) - np.asarray(h2) + np.asarray(t2) - 2.0 / radius**2


# ---------------------------------------------------------------------------
# cubic form: invariants, trace, closed forms
# ---------------------------------------------------------------------------


def lower_tensor(t, g):
    """t_kij = g_ks t^s_ij."""
    return np.einsum("...ks,...sij->...kij", np.asarray(g), _tvalues(t))


def trace_vector(t):
    """m_s = t^i_is; zero exactly on minimal surfaces."""
    return np.einsum("...iis->...s", _tvalues(t))


def scalar_invariants(t, g):
    """Second-order invariants (h2, t2) and the fourth-order invariant t4.

    h2 is the squared length of the traced cubic form (the squared mean
    curvature), t2 its complete self-contraction, and t4 the trace of the
    squared contraction matrix q^i_s = t^i_jk t^jk_s; all index moves use g.
    """
    t = _tvalues(t)
    g = np.asarray(g, dtype=float)
    check_spd(g)
    ginv = inv2(g)
    m = trace_vector(t)
    h2 = np.einsum("...sk,...s,...k->...", ginv, m, m)
    t_low = lower_tensor(t, g)
    t_up = np.einsum("...aij,...bi,...cj->...abc", t, ginv, ginv)
    t2 = np.einsum("...abc,...abc->...", t_up, t_low)
    q_mix = np.einsum("...ajk,...jp,...kr,...cs,...spr->...ac", t, ginv, ginv, g, t)
    t4 = np.einsum("...ac,...ca->...", q_mix, q_mix)
    return h2, t2, t4


def closed_form_tensor(u, theta):
    """Mixed cubic-form components of the conformal minimal family."""
    u = np.asarray(u, dtype=float)
    a = np.exp(-u) * np.cos(theta)
    b = np.exp(-u) * np.sin(theta)
    t = np.zeros(u.shape + (2, 2, 2))
    t[..., 0, 0, 0] = a
    t[..., 1, 0, 1] = t[..., 1, 1, 0] = t[..., 0, 1, 1] = -a
    t[..., 1, 1, 1] = b
    t[..., 0, 0, 1] = t[..., 0, 1, 0] = t[..., 1, 0, 0] = -b
    return t


def mean_curvature_vector(t, f1, f2, g):
    """Averaged normal vector sum_k (g^{ks} t^i_is) F_k; its Euclidean length
    is the mean curvature."""
    g = np.asarray(g, dtype=float)
    v = np.einsum("...ks,...s->...k", inv2(g), trace_vector(t))
    return v[..., 0, None] * np.asarray(f1) + v[..., 1, None] * np.asarray(f2)


def sphere_reduction_check(g, omega, radius, tol=1e-8):
    """Second-form coefficients of a sphere ambient: b = -g/R and d = -w/R.

    d must be symmetric; since w is antisymmetric this forces d = w = 0, so
    the check passes iff the antisymmetric part of d is below tolerance.
    """
    coeff = HypersurfaceCoefficients.sphere(g, omega, radius)
    d = coeff.d
    asym = np.abs(d - np.swapaxes(d, -1, -2)).max()
    return coeff.b, coeff.d, bool(asym < tol)


def codazzi_residual(t, gamma, g, hx, hy, periodic=True, method="fd4"):
    """Per-node max over index choices of nabla_i t_jsk - nabla_j t_isk."""
    t_low = lower_tensor(t, g)
    gamma = np.asarray(gamma, dtype=float)
    dt = np.stack(
        [
            _dfield(t_low, hx, gridmod.AXIS_X, periodic, method),
            _dfield(t_low, hy, gridmod.AXIS_Y, periodic, method),
        ],
        axis=-4,
    )  # dt[..., a, j, s, k]
    # nabla[..., i, j, s, k] = d_i t_jsk - gam^r_ij t_rsk - gam^r_is t_jrk - gam^r_ik t_jsr
    nabla = (
        dt
        - np.einsum("...rij,...rsk->...ijsk", gamma, t_low)
        - np.einsum("...ris,...jrk->...ijsk", gamma, t_low)
        - np.einsum("...rik,...jsr->...ijsk", gamma, t_low)
    )
    resid = nabla - np.swapaxes(nabla, -4, -3)
    return np.abs(resid).max(axis=(-4, -3, -2, -1))


def cauchy_riemann_residual(a, b, u, hx, hy, periodic=True, method="fd4"):
    """Max-abs defect of d_x(e^u a) = d_y(e^u b), d_y(e^u a) = -d_x(e^u b)."""
    u = np.asarray(getattr(u, "values", u), dtype=float)
    p = np.exp(u) * np.asarray(a, dtype=float)
    q = np.exp(u) * np.asarray(b, dtype=float)
    r1 = _dfield(p, hx, gridmod.AXIS_X, periodic, method) - _dfield(
        q, hy, gridmod.AXIS_Y, periodic, method
    )
    r2 = _dfield(p, hy, gridmod.AXIS_Y, periodic, method) + _dfield(
        q, hx, gridmod.AXIS_X, periodic, method
    )
    return float(max(np.abs(r1).max(), np.abs(r2).max()))


__all__ = [
    "InducedTensors",
    "SymTensor3",
    "HypersurfaceCoefficients",
    "hermitian_induced",
    "induced_tensors",
    "christoffel_conformal",
    "christoffel_from_field",
    "christoffel_generic",
    "riemann",
    "gauss_curvature",
    "gauss_residual",
    "lower_tensor",
    "trace_vector",
    "scalar_invariants",
    "closed_form_tensor",
    "mean_curvature_vector",
    "sphere_reduction_check",
    "codazzi_residual",
    "cauchy_riemann_residual",
    "inv2",
    "check_spd",
]
