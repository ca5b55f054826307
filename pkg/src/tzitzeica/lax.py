"""Linear z / zbar systems at a unit-modulus spectral parameter, their
bilinear pairing, and RK4 integration of the unitary moving frame.

The spectral vector psi solves

    d_z    psi = A psi,  A = [[-u_z, 0, i lam], [i, u_z, 0], [0, i, 0]]
    d_zbar psi = B psi,  B = [[0, i e^{-2u}, 0], [0, 0, i e^u],
                              [i e^u / lam, 0, 0]]

whose cross-derivative consistency is exactly u_{z zbar} = e^{-2u} - e^u.
The frame columns are the rescaled components (e^{u/2} psi_1, e^{-u/2} psi_2,
psi_3) of three independent solutions; in the real directions the frame
matrix U = [L M N] obeys d_x U = U Wx and d_y U = U Wy with

    Wx = [[ i uy/2,   i e^-u,  i e^{u/2}/lam ],     (anti-Hermitian for
          [ i e^-u,  -i uy/2,  i e^{u/2}     ],      |lam| = 1, which is
          [ i lam e^{u/2}, i e^{u/2}, 0      ]]      what keeps U unitary)

    Wy = [[-i ux/2,  -e^-u,    e^{u/2}/lam ],
          [ e^-u,     i ux/2, -e^{u/2}     ],
          [-lam e^{u/2}, e^{u/2}, 0        ]]

Integration marches the first grid row in x and then every column in y, with
`substeps` RK4 steps per grid cell; coefficient values between nodes come
from trigonometric interpolation, so within the integrator u is treated as
the trigonometric interpolant of its samples and all coefficient values are
exact for that interpolant.  Unitarity drift is a diagnostic and is never
repaired unless re-unitarization is explicitly requested.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidFrameError, UnitarityBlowupError
from .grid import AXIS_X, AXIS_Y, ScalarFieldPeriodic, ddx, ddy, trig_upsample
from .linalg3 import unitarity_defect, unitarity_defect_map

DEFAULT_SUBSTEPS = 24


@dataclass(frozen=True)
class SpectralPoint:
    """Unit-modulus parameter lam = cos(theta) + i sin(theta)."""

    theta: float

    @property
    def lam(self):
        return complex(np.cos(self.theta), np.sin(self.theta))


@dataclass
class PsiState:
    psi: np.ndarray
    z: complex
    spectral: SpectralPoint


# ---------------------------------------------------------------------------
# coefficient matrices
# ---------------------------------------------------------------------------


def lax_z_matrix(u, u_z, lam):
    u = np.asarray(u, dtype=float)
    u_z = np.asarray(u_z, dtype=complex)
    out = np.zeros(u.shape + (3, 3), dtype=complex)
    out[..., 0, 0] = -u_z
    out[..., 0, 2] = 1j * lam
    out[..., 1, 0] = 1j
    out[..., 1, 1] = u_z
    out[..., 2, 1] = 1j
    return out


def lax_zbar_matrix(u, lam):
    u = np.asarray(u, dtype=float)
    out = np.zeros(u.shape + (3, 3), dtype=complex)
    out[..., 0, 1] = 1j * np.exp(-2.0 * u)
    out[..., 1, 2] = 1j * np.exp(u)
    out[..., 2, 0] = 1j * np.exp(u) / lam
    return out


def psi_rhs(state, u, u_z, direction):
    """Right-hand side of the z or zbar system applied to state.psi."""
    lam = state.spectral.lam
    if direction == "z":
        mat = lax_z_matrix(u, u_z, lam)
    elif direction == "zbar":
        mat = lax_zbar_matrix(u, lam)
    else:
        raise ValueError(f"direction must be 'z' or 'zbar', got {direction!r}")
    return mat @ np.asarray(state.psi, dtype=complex)


def frame_coeff_x(u, ux, uy, lam):
    """Generator Wx of d_x U = U Wx; anti-Hermitian for |lam| = 1."""
    u = np.asarray(u, dtype=float)
    uy = np.asarray(uy, dtype=float)
    emu = np.exp(-u)
    eh = np.exp(0.5 * u)
    out = np.zeros(np.shape(u) + (3, 3), dtype=complex)
    out[..., 0, 0] = 0.5j * uy
    out[..., 0, 1] = 1j * emu
    out[..., 0, 2] = 1j * np.conj(lam) * eh
    out[..., 1, 0] = 1j * emu
    out[..., 1, 1] = -0.5j * uy
    out[..., 1, 2] = 1j * eh
    out[..., 2, 0] = 1j * lam * eh
    out[..., 2, 1] = 1j * eh
    return out


def frame_coeff_y(u, ux, uy, lam):
    """Generator Wy of d_y U = U Wy; anti-Hermitian for |lam| = 1."""
    u = np.asarray(u, dtype=float)
    ux = np.asarray(ux, dtype=float)
    emu = np.exp(-u)
    eh = np.exp(0.5 * u)
    out = np.zeros(np.shape(u) + (3, 3), dtype=complex)
    out[..., 0, 0] = -0.5j * ux
    out[..., 0, 1] = -emu
    out[..., 0, 2] = np.conj(lam) * eh
    out[..., 1, 0] = emu
    out[..., 1, 1] = 0.5j * ux
    out[..., 1, 2] = -eh
    out[..., 2, 0] = -lam * eh
    out[..., 2, 1] = eh
    return out


def frame_rhs(mat, u, ux, uy, spectral, direction):
    """d U = U W along the requested real direction."""
    lam = spectral.lam
    if direction == "x":
        coeff = frame_coeff_x(u, ux, uy, lam)
    elif direction == "y":
        coeff = frame_coeff_y(u, ux, uy, lam)
    else:
        raise ValueError(f"direction must be 'x' or 'y', got {direction!r}")
    return np.asarray(mat, dtype=complex) @ coeff


# ---------------------------------------------------------------------------
# zero-curvature diagnostic
# ---------------------------------------------------------------------------


def _expm_taylor(mat, terms=12):
    out = np.zeros_like(mat)
    out[...] = np.eye(3)
    power = out.copy()
    for k in range(1, terms + 1):
        power = power @ mat / k
        out = out + power
    return out


def compatibility_residual(u, spectral, method="fd4"):
    """Max commutator defect of one-cell transport, x-step then y-step versus
    y-step then x-step.

    The two edge generators are P = A + B (a z-advance plus a zbar-advance by
    the cell width) and Q = i (A - B); the loop defect per cell is
    hx*hy*|d_zbar A - d_z B + [A, B]| + O(h^3), and the bracket expression is
    diag(-1, 1, 0)/4 times the PDE residual, so the defect vanishes with it.
    """
    lam = spectral.lam
    grid = u.grid
    vals = u.values
    ux = ddx(vals, grid, method)
    uy = ddy(vals, grid, method)
    u_z = 0.5 * (ux - 1j * uy)
    a = lax_z_matrix(vals, u_z, lam)
    b = lax_zbar_matrix(vals, lam)
    p = a + b
    q = 1j * (a - b)
    px_bot = 0.5 * (p + np.roll(p, -1, AXIS_X))
    px_top = np.roll(px_bot, -1, AXIS_Y)
    qy_left = 0.5 * (q + np.roll(q, -1, AXIS_Y))
    qy_right = np.roll(qy_left, -1, AXIS_X)
    tx_bot = _expm_taylor(grid.hx * px_bot)
    tx_top = _expm_taylor(grid.hx * px_top)
    ty_left = _expm_taylor(grid.hy * qy_left)
    ty_right = _expm_taylor(grid.hy * qy_right)
    defect = ty_right @ tx_bot - tx_top @ ty_left
    return float(np.abs(defect).max())


# ---------------------------------------------------------------------------
# frame integration
# ---------------------------------------------------------------------------


def _polar(mat):
    w, _s, vh = np.linalg.svd(mat)
    return w @ vh


def _rk4_step(state, om0, omh, om1, h):
    k1 = state @ om0
    k2 = (state + 0.5 * h * k1) @ omh
    k3 = (state + 0.5 * h * k2) @ omh
    k4 = (state + h * k3) @ om1
    return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _march(state, coeffs, builder, lam, h, ncells, m, re_unitarize=False):
    """RK4-march d S = S W over ncells cells of m substeps each.

    coeffs = (u, ux, uy) arrays indexed by half-substep (2*m*ncells + 1
    samples along axis 0, remaining axes broadcast against state).  Returns
    the states at the ncells+1 cell boundaries.
    """
    uf, uxf, uyf = coeffs
    stored = np.empty((ncells + 1,) + state.shape, dtype=complex)
    stored[0] = state
    om_right = builder(uf[0], uxf[0], uyf[0], lam)
    hs = h / m
    for c in range(ncells):
        for s in range(m):
            p = 2 * (c * m + s)
            om0 = om_right
            omh = builder(uf[p + 1], uxf[p + 1], uyf[p + 1], lam)
            om1 = builder(uf[p + 2], uxf[p + 2], uyf[p + 2], lam)
            state = _rk4_step(state, om0, omh, om1, hs)
            om_right = om1
            if re_unitarize:
                state = _polar(state)
        stored[c + 1] = state
    return stored


def _fine_samples_1d(arrays, m, ncells):
    """Wrap 1D periodic fine arrays onto 2*m*ncells + 1 half-substep samples."""
    n = arrays[0].shape[0]
    idx = np.arange(2 * m * ncells + 1) % n
    return tuple(a[idx] for a in arrays)


@dataclass
class FrameField:
    """Unitary frames at every grid node (optionally extended past the
    period in each direction for closure measurements)."""

    grid: object
    spectral: SpectralPoint
    unitary: np.ndarray = field(repr=False)
    u: ScalarFieldPeriodic = field(repr=False)
    extend: tuple = (0, 0)
    substeps: int = DEFAULT_SUBSTEPS

    @property
    def base(self):
        return self.unitary[: self.grid.ny, : self.grid.nx]

    @property
    def normal(self):
        """Third frame column at the base nodes."""
        return self.base[..., :, 2]


def unitarity_defect_field(frame):
    return unitarity_defect_map(frame.unitary)


def frame_orthonormality_report(frame):
    """Max unitarity defect over every stored node."""
    return float(unitarity_defect_map(frame.unitary).max())


def integrate_frame(
    u,
    spectral,
    u0=None,
    substeps=DEFAULT_SUBSTEPS,
    extend=(0, 0),
    re_unitarize=False,
    order="xy",
    blowup=1e-6,
):
    """Integrate the frame over the grid from the corner value u0.

    Marches the first row in x and then all columns in y (order="yx" swaps
    the roles; the difference between the two orders is the path-dependence
    diagnostic).  extend = (ex, ey) integrates ex extra columns / ey extra
    rows past the period for closure measurements.  Raises
    UnitarityBlowupError when the defect exceeds `blowup`.
    """
    if u0 is None:
        u0 = np.eye(3, dtype=complex)
    u0 = np.asarray(u0, dtype=complex)
    if unitarity_defect(u0) >= 1e-12:
        raise InvalidFrameError("initial frame is not unitary to 1e-12")
    grid = u.grid
    lam = spectral.lam
    m = int(substeps)
    if m < 1:
        raise ValueError("substeps must be >= 1")
    ux = ddx(u.values, grid, "spectral")
    uy = ddy(u.values, grid, "spectral")

    if order == "xy":
        unitary = _integrate_rows_then_columns(
            u.values, ux, uy,
            grid.nx, grid.ny, grid.hx, grid.hy,
            frame_coeff_x, frame_coeff_y,
            lam, m, extend[0], extend[1], u0, re_unitarize,
        )
    elif order == "yx":
        swapped = _integrate_rows_then_columns(
            u.values.T, ux.T, uy.T,
            grid.ny, grid.nx, grid.hy, grid.hx,
            frame_coeff_y, frame_coeff_x,
            lam, m, extend[1], extend[0], u0, re_unitarize,
        )
        unitary = np.swapaxes(swapped, 0, 1)
    else:
        raise ValueError(f"order must be 'xy' or 'yx', got {order!r}")

    out = FrameField(grid, spectral, unitary, u, tuple(extend), m)
    defect = frame_orthonormality_report(out)
    if defect > blowup:
        raise UnitarityBlowupError(f"unitarity defect {defect:.3e} exceeds {blowup:.1e}")
    return out


def _integrate_rows_then_columns(
    vals, dx_vals, dy_vals, n1, n2, h1, h2, build1, build2, lam, m, e1, e2, u0, re_unit
):
    """Generic core: arrays are (n2, n1) with axis 1 the first march
    direction; returns frames of shape (n2 + e2, n1 + e1, 3, 3)."""
    n1_tot, n2_tot = n1 + e1, n2 + e2
    # first row, marched along axis 1
    row = tuple(
        trig_upsample(a[0], 2 * m, axis=0) for a in (vals, dx_vals, dy_vals)
    )
    row = _fine_samples_1d(row, m, n1_tot - 1)
    first = _march(u0, row, build1, lam, h1, n1_tot - 1, m, re_unit)
    # all columns at once, marched along axis 0
    cols_idx = np.arange(n1_tot) % n1
    fine_idx = np.arange(2 * m * (n2_tot - 1) + 1) % (2 * m * n2)
    cols = tuple(
        trig_upsample(a, 2 * m, axis=0)[np.ix_(fine_idx, cols_idx)]
        for a in (vals, dx_vals, dy_vals)
    )
    return _march(first, cols, build2, lam, h2, n2_tot - 1, m, re_unit)


def frame_axis_stencil(frame, axis, halfwidth=2):
    """Frames and exponent samples at offsets k * (h / substeps),
    k = -halfwidth..halfwidth, marched from every base node along `axis`.

    Gives finite-difference stencils for derivatives of frame-built fields at
    sub-grid spacing without assuming periodicity of the frame itself.
    Returns (frames, u_samples): lists indexed by k + halfwidth, each entry an
    (ny, nx, 3, 3) / (ny, nx) array.
    """
    grid = frame.grid
    u = frame.u
    m = frame.substeps
    lam = frame.spectral.lam
    ux = ddx(u.values, grid, "spectral")
    uy = ddy(u.values, grid, "spectral")
    if axis == "x":
        ax, n, h, builder = AXIS_X, grid.nx, grid.hx, frame_coeff_x
        node_idx = np.arange(grid.nx) * 2 * m
    elif axis == "y":
        ax, n, h, builder = AXIS_Y, grid.ny, grid.hy, frame_coeff_y
        node_idx = np.arange(grid.ny) * 2 * m
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    fine = [trig_upsample(a, 2 * m, axis=ax) for a in (u.values, ux, uy)]
    nf = 2 * m * n

    def coeff_at(offset):
        idx = (node_idx + offset) % nf
        if ax == AXIS_X:
            return tuple(a[:, idx] for a in fine)
        return tuple(a[idx, :] for a in fine)

    hs = h / m
    frames = {0: frame.base.copy()}
    for sign in (+1, -1):
        state = frame.base.copy()
        for k in range(1, halfwidth + 1):
            base_off = sign * 2 * (k - 1)
            c0 = coeff_at(base_off)
            ch = coeff_at(base_off + sign)
            c1 = coeff_at(base_off + 2 * sign)
            om0 = builder(c0[0], c0[1], c0[2], lam)
            omh = builder(ch[0], ch[1], ch[2], lam)
            om1 = builder(c1[0], c1[1], c1[2], lam)
            state = _rk4_step(state, om0, omh, om1, sign * hs)
            frames[sign * k] = state.copy()
    offsets = range(-halfwidth, halfwidth + 1)
    u_samples = [coeff_at(2 * k)[0] for k in offsets]
    return [frames[k] for k in offsets], u_samples


# ---------------------------------------------------------------------------
# psi propagation and the bilinear pairing
# ---------------------------------------------------------------------------


def _march_vec(psi, coeffs, builder, lam, h, ncells, m):
    uf, uxf, uyf = coeffs
    stored = np.empty((ncells + 1, 3), dtype=complex)
    stored[0] = psi
    mat_right = builder(uf[0], uxf[0], uyf[0], lam)
    hs = h / m
    for c in range(ncells):
        for s in range(m):
            p = 2 * (c * m + s)
            m0 = mat_right
            mh = builder(uf[p + 1], uxf[p + 1], uyf[p + 1], lam)
            m1 = builder(uf[p + 2], uxf[p + 2], uyf[p + 2], lam)
            k1 = m0 @ psi
            k2 = mh @ (psi + 0.5 * hs * k1)
            k3 = mh @ (psi + 0.5 * hs * k2)
            k4 = m1 @ (psi + hs * k3)
            psi = psi + (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            mat_right = m1
        stored[c + 1] = psi
    return stored


def _psi_builder(mode):
    def build(u, ux, uy, lam):
        u_z = 0.5 * (np.asarray(ux) - 1j * np.asarray(uy))
        if mode == "x":
            return lax_z_matrix(u, u_z, lam) + lax_zbar_matrix(u, lam)
        if mode == "z":
            return lax_z_matrix(u, u_z, lam)
        if mode == "zbar":
            return lax_zbar_matrix(u, lam)
        raise ValueError(f"mode must be 'x', 'z' or 'zbar', got {mode!r}")

    return build


def propagate_psi(u, spectral, psi0, row=0, mode="x", substeps=DEFAULT_SUBSTEPS, periods=1):
    """March psi along grid row `row` in the x direction.

    mode "x" advances with the full generator A + B (a physical x-move);
    modes "z" / "zbar" advance with one subsystem alone, which is the setting
    where the single-sided pairing derivative identities are exact.  Returns
    (x positions, psi values) at the nx*periods + 1 node boundaries.
    """
    grid = u.grid
    m = int(substeps)
    ux = ddx(u.values, grid, "spectral")
    uy = ddy(u.values, grid, "spectral")
    fine = tuple(
        trig_upsample(a[row], 2 * m, axis=0) for a in (u.values, ux, uy)
    )
    ncells = grid.nx * periods
    coeffs = _fine_samples_1d(fine, m, ncells)
    psis = _march_vec(np.asarray(psi0, dtype=complex), coeffs, _psi_builder(mode),
                      spectral.lam, grid.hx, ncells, m)
    xs = np.arange(ncells + 1) * grid.hx
    return xs, psis


def pairing(psi_state, phi_state):
    """Bilinear pairing lam (psi1 phi2 - psi2 phi1) - lam^2 psi3 phi3, with
    lam taken from the first argument.

    For phi propagated at the opposite parameter -mu the pairing obeys
    d_z pairing = i (mu - lam) lam psi2 phi3 and
    d_zbar pairing = i e^u (lam/mu - 1) lam psi3 phi1,
    so it is constant in both variables when mu = lam.
    """
    lam = psi_state.spectral.lam
    return complex(pairing_series(lam, psi_state.psi, phi_state.psi))


def pairing_series(lam, psis, phis):
    p = np.asarray(psis, dtype=complex)
    q = np.asarray(phis, dtype=complex)
    return lam * (p[..., 0] * q[..., 1] - p[..., 1] * q[..., 0]) - lam**2 * p[..., 2] * q[..., 2]


def pairing_derivative_z(lam, mu, psis, phis):
    p = np.asarray(psis, dtype=complex)
    q = np.asarray(phis, dtype=complex)
    return 1j * (mu - lam) * lam * p[..., 1] * q[..., 2]


def pairing_derivative_zbar(lam, mu, u, psis, phis):
    p = np.asarray(psis, dtype=complex)
    q = np.asarray(phis, dtype=complex)
    return 1j * np.exp(np.asarray(u)) * (lam / mu - 1.0) * lam * p[..., 2] * q[..., 0]


def pairing_derivative_x(lam, mu, u, psis, phis):
    """d/dx of the pairing when both factors are propagated in mode 'x'."""
    return pairing_derivative_z(lam, mu, psis, phis) + pairing_derivative_zbar(
        lam, mu, u, psis, phis
    )
