"""Sphere immersion built from a frame field, and its verification report.

The surface is r = R * N with N the third frame column.  Its tangents have
the closed form

    E1 = i R e^{u/2} (M + L / lam),   E2 = R e^{u/2} (L / lam - M),

which makes the immersion complexly normal (<E_i|N> = 0 in the Hermitian
product) with conformal induced metric g = 2 R^2 e^u I and vanishing skew
form, so the normal-plane vectors are F_i = i E_i.  The cubic form is
extracted by numerically differentiating the tangent fields at substep
resolution (stencils marched from each node, no periodicity assumed),
subtracting the conformal connection, and projecting onto (F1, F2, N).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import invariants as inv
from .errors import InvalidFrameError
from .grid import ScalarFieldPeriodic, ddx, ddy
from .lax import frame_axis_stencil, frame_orthonormality_report
from .linalg3 import hermitian_inner


@dataclass
class SurfaceMesh:
    grid: object
    points: np.ndarray = field(repr=False)  # (ny, nx, 3) complex, |r| = R
    e1: np.ndarray = field(repr=False)
    e2: np.ndarray = field(repr=False)
    radius: float = 1.0


def tangent_analytic(frame, u, radius):
    """Closed-form tangents from the frame columns and the exponent field."""
    lam = frame.spectral.lam
    base = frame.base
    col_l, col_m = base[..., :, 0], base[..., :, 1]
    scale = radius * np.exp(0.5 * u.values)[..., None]
    e1 = 1j * scale * (col_m + np.conj(lam) * col_l)
    e2 = scale * (np.conj(lam) * col_l - col_m)
    return e1, e2


def build_surface(frame, radius, validate=True):
    """Embed r = R * N with analytic tangents attached."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    if validate:
        defect = frame_orthonormality_report(frame)
        if defect >= 1e-8:
            raise InvalidFrameError(f"frame unitarity defect {defect:.3e} >= 1e-8")
    points = radius * frame.normal
    e1, e2 = tangent_analytic(frame, frame.u, radius)
    return SurfaceMesh(frame.grid, points, e1, e2, float(radius))


def fd_tangents(mesh, method="fd4"):
    """Grid finite-difference tangents of the embedding (valid when the frame
    closes over the grid periods)."""
    return (
        ddx(mesh.points, mesh.grid, method),
        ddy(mesh.points, mesh.grid, method),
    )


def normality_map(e1, e2, normal):
    """Per-node max |<E_i|N>|."""
    return np.maximum(
        np.abs(hermitian_inner(e1, normal)), np.abs(hermitian_inner(e2, normal))
    )


# ---------------------------------------------------------------------------
# cubic-form extraction
# ---------------------------------------------------------------------------


def _tangents_at(frames, u_vals, lam, radius):
    col_l, col_m = frames[..., :, 0], frames[..., :, 1]
    scale = radius * np.exp(0.5 * np.asarray(u_vals))[..., None]
    e1 = 1j * scale * (col_m + np.conj(lam) * col_l)
    e2 = scale * (np.conj(lam) * col_l - col_m)
    return e1, e2


def _fd4_stencil(values, h):
    """4th-order first derivative from 5 samples at offsets -2..2 of size h."""
    return (-values[4] + 8.0 * values[3] - 8.0 * values[1] + values[0]) / (12.0 * h)


@dataclass
class ExtractedSecondForm:
    tensor: inv.SymTensor3
    normal_coeff: np.ndarray = field(repr=False)  # (ny, nx, 2, 2) complex


def extract_second_form(frame, u, radius, theta=None, method="fd4"):
    """Cubic-form components from numerical derivatives of the tangents.

    Tangent derivatives use 5-point stencils at substep spacing, marched from
    each node, so no periodicity of the frame is assumed; the connection
    comes from the conformal closed form on u.  The normal coefficient of
    nabla_i E_j (which must be -2 R e^u delta_ij) is returned alongside.
    """
    grid = frame.grid
    lam = frame.spectral.lam
    m = frame.substeps

    de = {}
    for axis, h in (("x", grid.hx), ("y", grid.hy)):
        frames, u_samples = frame_axis_stencil(frame, axis, halfwidth=2)
        e1s, e2s = [], []
        for fr, uv in zip(frames, u_samples):
            e1, e2 = _tangents_at(fr, uv, lam, radius)
            e1s.append(e1)
            e2s.append(e2)
        hf = h / m
        de[(axis, 1)] = _fd4_stencil(e1s, hf)
        de[(axis, 2)] = _fd4_stencil(e2s, hf)

    e1, e2 = tangent_analytic(frame, u, radius)
    tangents = (e1, e2)
    # partial derivatives indexed [i][j] = d_i E_j  (coordinate 0 = x)
    partial = [
        [de[("x", 1)], de[("x", 2)]],
        [de[("y", 1)], de[("y", 2)]],
    ]
    gamma = inv.christoffel_from_field(u, method)
    normal = frame.normal
    conf = 2.0 * radius**2 * np.exp(u.values)

    tens = np.empty((grid.ny, grid.nx, 2, 2, 2))
    ncoeff = np.empty((grid.ny, grid.nx, 2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            nab = partial[i][j] - (
                gamma[..., 0, i, j, None] * e1 + gamma[..., 1, i, j, None] * e2
            )
            for k in range(2):
                proj = hermitian_inner(1j * tangents[k], nab).real
                tens[..., k, i, j] = proj / conf
            ncoeff[..., i, j] = hermitian_inner(normal, nab)
    sym = inv.SymTensor3(tens, u=u.values, theta=theta, radius=radius)
    return ExtractedSecondForm(sym, ncoeff)


# ---------------------------------------------------------------------------
# closure and the full report
# ---------------------------------------------------------------------------


@dataclass
class ClosureResult:
    shift: tuple
    defect: float


@dataclass
class ClosureReport:
    results: list
    is_candidate: bool

    @property
    def max_defect(self):
        return max(r.defect for r in self.results)


def torus_closure(frame, shifts, tol=1e-4):
    """Frame mismatch U(p + shift) - U(p) over the base nodes, per shift.

    Shifts are node-index pairs (dx, dy) and must lie within the integrated
    extension.  A torus candidate needs two linearly independent shifts with
    defect below tol.
    """
    ex, ey = frame.extend
    grid = frame.grid
    results = []
    for sx, sy in shifts:
        sx, sy = int(sx), int(sy)
        if sx < 0 or sy < 0 or sx > ex or sy > ey:
            raise ValueError(
                f"shift ({sx}, {sy}) outside integrated extension ({ex}, {ey})"
            )
        shifted = frame.unitary[sy : sy + grid.ny, sx : sx + grid.nx]
        defect = float(np.abs(shifted - frame.base).max())
        results.append(ClosureResult((sx, sy), defect))
    good = [r.shift for r in results if r.defect < tol]
    is_candidate = any(
        a[0] * b[1] - a[1] * b[0] != 0 for ai, a in enumerate(good) for b in good[ai + 1 :]
    )
    return ClosureReport(results, is_candidate)


@dataclass
class ImmersionReport:
    """Named sup-norm residuals of one built surface; convergence slopes can
    be attached when a refinement study produced them."""

    normality_defect: float
    conformal_defect: float
    minimality_H: float
    h2_max: float
    tensor_match_defect: float
    tensor_trace_max: float
    normal_coeff_defect: float
    gauss_defect: float
    gauss_curvature_max: float
    codazzi_defect: float
    invariant_t2_defect: float
    invariant_t4_defect: float
    sphere_defect: float
    unitarity_defect: float
    closure_defect: float | None = None
    slopes: dict = field(default_factory=dict)

    def to_dict(self):
        out = {}
        for key in (
            "normality_defect",
            "conformal_defect",
            "minimality_H",
            "h2_max",
            "tensor_match_defect",
            "tensor_trace_max",
            "normal_coeff_defect",
            "gauss_defect",
            "gauss_curvature_max",
            "codazzi_defect",
            "invariant_t2_defect",
            "invariant_t4_defect",
            "sphere_defect",
            "unitarity_defect",
        ):
            out[key] = float(getattr(self, key))
        if self.closure_defect is not None:
            out["closure_defect"] = float(self.closure_defect)
        for key, val in self.slopes.items():
            out[f"slope_{key}"] = float(val)
        return out


def full_report(mesh, frame, u, theta, shifts=None, method="fd4"):
    """Evaluate every verification residual on one built surface."""
    grid = mesh.grid
    radius = mesh.radius
    conf = 2.0 * radius**2 * np.exp(u.values)

    norm_map = normality_map(mesh.e1, mesh.e2, frame.normal)
    g_meas, om_meas = inv.hermitian_induced(mesh.e1, mesh.e2, check=False)
    conformal = max(
        float(np.abs(g_meas[..., 0, 0] - conf).max()),
        float(np.abs(g_meas[..., 1, 1] - conf).max()),
        float(np.abs(g_meas[..., 0, 1]).max()),
        float(np.abs(om_meas).max()),
    )

    extracted = extract_second_form(frame, u, radius, theta, method)
    tens = extracted.tensor.values
    closed = inv.closed_form_tensor(u.values, theta)
    tensor_match = float(np.abs(tens - closed).max())
    trace_max = float(np.abs(inv.trace_vector(tens)).max())

    target = -2.0 * radius * np.exp(u.values)
    ncf = extracted.normal_coeff
    normal_coeff = max(
        float(np.abs(ncf[..., 0, 0] - target).max()),
        float(np.abs(ncf[..., 1, 1] - target).max()),
        float(np.abs(ncf[..., 0, 1]).max()),
        float(np.abs(ncf[..., 1, 0]).max()),
    )

    g_an = np.zeros(conf.shape + (2, 2))
    g_an[..., 0, 0] = conf
    g_an[..., 1, 1] = conf
    h2, t2, t4 = inv.scalar_invariants(tens, g_an)
    h2_max = float(np.abs(h2).max())

    gamma = inv.christoffel_from_field(u, method)
    riem = inv.riemann(gamma, grid.hx, grid.hy)
    k_curv = inv.gauss_curvature(g_an, riem)
    gauss = float(np.abs(inv.gauss_residual(k_curv, h2, t2, radius)).max())
    codazzi = float(
        inv.codazzi_residual(tens, gamma, g_an, grid.hx, grid.hy, method=method).max()
    )

    scale3 = radius**2 * np.exp(3.0 * u.values)
    scale6 = radius**4 * np.exp(6.0 * u.values)
    t2_defect = float(np.abs(t2 * scale3 - 2.0).max())
    t4_defect = float(np.abs(t4 * scale6 - 2.0).max())

    radii = np.sqrt(np.sum(np.abs(mesh.points) ** 2, axis=-1))
    sphere = float(np.abs(radii - radius).max())

    closure = None
    ex, ey = frame.extend
    if shifts is None and ex >= grid.nx and ey >= grid.ny:
        shifts = [(grid.nx, 0), (0, grid.ny)]
    if shifts:
        closure = torus_closure(frame, shifts).max_defect

    return ImmersionReport(
        normality_defect=float(norm_map.max()),
        conformal_defect=conformal,
        minimality_H=math.sqrt(max(h2_max, 0.0)),
        h2_max=h2_max,
        tensor_match_defect=tensor_match,
        tensor_trace_max=trace_max,
        normal_coeff_defect=normal_coeff,
        gauss_defect=gauss,
        gauss_curvature_max=float(np.abs(k_curv).max()),
        codazzi_defect=codazzi,
        invariant_t2_defect=t2_defect,
        invariant_t4_defect=t4_defect,
        sphere_defect=sphere,
        unitarity_defect=frame_orthonormality_report(frame),
        closure_defect=closure,
    )
