"""Numerical checks of the smooth rolling-spheres connection.

For an immersion f with unit normal n and a function h, the tangent sphere
congruence is ``Sigma = T_f [[n, 0], [-h, -n]] T_f^-1`` and the connection is
``d - Sigma dSigma / 2``.  The holonomy of small parameter squares is compared
with the closed-form curvature

    R(d_u, d_v) = 1/2 T_f [[X sigma, 0], [Y, X sigma]] T_f^-1,
    X = ((H^2 - K) - (H - h)^2) n,   Y = h_u w_v - h_v w_u,

where ``w = (H - h) df + q`` and ``q = dn - H df``.  Both sides are computed
independently: the holonomy uses finite differences of the Sigma matrices
only, never the formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import expm

from . import qmat2
from .errors import DomainError, UnsupportedError
from .moebius import PointS3
from .qmat2 import QMat2
from .quat import ImQuaternion, Quaternion
from .spheres import Sphere2, incidence_residual, sphere_from_center_radius

__all__ = [
    "ParamSurface",
    "ShapeData",
    "SphereCongruenceField",
    "plane",
    "round_sphere",
    "torus",
    "shape_data",
    "sigma_matrix",
    "loop_holonomy",
    "curvature_formula",
    "compare_holonomy",
    "sample_points",
    "convergence_table",
    "varying_h",
    "willmore_integrand_quadrature",
    "torus_willmore_exact",
    "integrate_orthogonal_trajectory",
    "tractrix_path",
    "tractrix_velocity",
    "tractrix_exact",
]

TWO_PI = 2.0 * math.pi
REL_FLOOR = 1e-10


@dataclass
class ParamSurface:
    """f(u, v) with analytic derivatives.

    ``jet(u, v)`` returns (f, f_u, f_v, f_uu, f_uv, f_vv) as an array of
    shape (6, 3) followed by the broadcast shape of u and v.  ``closed`` marks doubly periodic presets.
    """

    name: str
    jet: Callable[[float, float], np.ndarray]
    domain: tuple
    closed: bool = False

    def point(self, u, v) -> np.ndarray:
        return self.jet(u, v)[0]


def _grid(u, v):
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    return u, v, np.zeros_like(u), np.ones_like(u)


def plane() -> ParamSurface:
    def jet(u, v):
        u, v, z, o = _grid(u, v)
        return np.array([[u, v, z], [o, z, z], [z, o, z], [z, z, z], [z, z, z], [z, z, z]])

    return ParamSurface("plane", jet, ((-10.0, 10.0), (-10.0, 10.0)))


def round_sphere(rho: float = 1.0) -> ParamSurface:
    """Longitude u, latitude v; outward normal."""

    def jet(u, v):
        u, v, z, _ = _grid(u, v)
        cu, su, cv, sv = np.cos(u), np.sin(u), np.cos(v), np.sin(v)
        return rho * np.array(
            [
                [cu * cv, su * cv, sv],
                [-su * cv, cu * cv, z],
                [-cu * sv, -su * sv, cv],
                [-cu * cv, -su * cv, z],
                [su * sv, -cu * sv, z],
                [-cu * cv, -su * cv, -sv],
            ]
        )

    return ParamSurface(f"sphere(rho={rho})", jet, ((0.0, TWO_PI), (-math.pi / 2, math.pi / 2)), closed=True)


def torus(R: float = 2.0, r: float = 1.0) -> ParamSurface:
    """Torus of revolution; u around the z axis, v around the tube."""
    if not R > r > 0:
        raise DomainError("torus needs R > r > 0")

    def jet(u, v):
        u, v, z, _ = _grid(u, v)
        cu, su, cv, sv = np.cos(u), np.sin(u), np.cos(v), np.sin(v)
        w = R + r * cv
        return np.array(
            [
                [w * cu, w * su, r * sv],
                [-w * su, w * cu, z],
                [-r * sv * cu, -r * sv * su, r * cv],
                [-w * cu, -w * su, z],
                [r * sv * su, -r * sv * cu, z],
                [-r * cv * cu, -r * cv * su, -r * sv],
            ]
        )

    return ParamSurface(f"torus(R={R}, r={r})", jet, ((0.0, TWO_PI), (0.0, TWO_PI)), closed=True)


@dataclass
class ShapeData:
    f: np.ndarray
    n: np.ndarray
    H: float
    K: float
    q_u: np.ndarray
    q_v: np.ndarray
    sigma: float
    f_u: np.ndarray
    f_v: np.ndarray
    n_u: np.ndarray
    n_v: np.ndarray


def shape_data(surface: ParamSurface, u: float, v: float) -> ShapeData:
    """Normal, mean and Gauss curvature, q = dn - H df and the area density.

    The shape operator W solves dn = df W; H = tr W / 2 and K = det W, so the
    outward unit sphere has H = 1.
    """
    f, fu, fv, fuu, fuv, fvv = surface.jet(u, v)
    c = np.cross(fu, fv)
    sigma = float(np.linalg.norm(c))
    if sigma < 1e-12 * max(1.0, np.linalg.norm(fu) * np.linalg.norm(fv)):
        raise DomainError(f"degenerate metric at ({u}, {v})")
    n = c / sigma
    g = np.array([[fu @ fu, fu @ fv], [fu @ fv, fv @ fv]])
    # -f_ij . n = f_i . n_j
    B = -np.array([[fuu @ n, fuv @ n], [fuv @ n, fvv @ n]])
    W = np.linalg.solve(g, B)
    H = 0.5 * float(np.trace(W))
    K = float(np.linalg.det(W))
    n_u = W[0, 0] * fu + W[1, 0] * fv
    n_v = W[0, 1] * fu + W[1, 1] * fv
    return ShapeData(f, n, H, K, n_u - H * fu, n_v - H * fv, sigma, fu, fv, n_u, n_v)


class SphereCongruenceField:
    """Tangent sphere congruence with curvature function h.

    ``h`` may be None (mean curvature spheres, h = H), a constant, or a
    callable ``h(u, v, shape) -> float``.  ``dh`` optionally gives the analytic
    partials; otherwise 6th order central differences are used.
    """

    def __init__(self, surface: ParamSurface, h=None, dh=None, fd_step: float = 1e-4):
        self.surface = surface
        self._h = h
        self._dh = dh
        self.fd_step = fd_step

    def h(self, u, v, sd: ShapeData | None = None) -> float:
        if sd is None:
            sd = shape_data(self.surface, u, v)
        if self._h is None:
            return sd.H
        if callable(self._h):
            return float(self._h(u, v, sd))
        return float(self._h)

    def dh(self, u, v):
        if self._dh is not None:
            return self._dh(u, v)
        return (
            _d6(lambda s: self.h(u + s, v), self.fd_step),
            _d6(lambda s: self.h(u, v + s), self.fd_step),
        )

    def matrix(self, u, v) -> QMat2:
        sd = shape_data(self.surface, u, v)
        return sigma_matrix(sd.f, sd.n, self.h(u, v, sd))

    def sphere(self, u, v) -> Sphere2:
        return Sphere2(self.matrix(u, v), check=False)

    def real(self, u, v) -> np.ndarray:
        return qmat2.real_representation(self.matrix(u, v))


def sigma_matrix(f, n, h) -> QMat2:
    """T_f [[n, 0], [-h, -n]] T_f^-1 written out entrywise."""
    f = np.asarray(f, float)
    n = np.asarray(n, float)
    F = ImQuaternion(*f)
    N = ImQuaternion(*n)
    return QMat2(N - F * h, 2.0 * float(f @ n) - h * float(f @ f), -h, F * h - N)


_D6 = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0


def _d6(fun, step):
    """Sixth order central difference of a scalar or array valued function at 0."""
    vals = [fun(k * step) for k in range(-3, 4)]
    return sum(c * val for c, val in zip(_D6, vals) if c != 0.0) / step


def _connection_form(field: SphereCongruenceField, u, v):
    """Real 8x8 matrices of A(d_u), A(d_v) with A = -Sigma dSigma / 2."""
    s = field.fd_step
    S = field.real(u, v)
    Su = _d6(lambda t: field.real(u + t, v), s)
    Sv = _d6(lambda t: field.real(u, v + t), s)
    return -0.5 * S @ Su, -0.5 * S @ Sv


def loop_holonomy(field: SphereCongruenceField, center, eps: float) -> QMat2:
    """Scaled holonomy (I - M) / (eps^2 sigma) of the counterclockwise square of side eps.

    Each edge is transported by exp(-A(edge)) with A evaluated at the edge
    midpoint; since M = I - R(d_u, d_v) eps^2 + ..., the result approximates
    the curvature divided by the area density.
    """
    u0, v0 = center
    (ua, ub), (va, vb) = field.surface.domain
    if not field.surface.closed and not (ua <= u0 - eps and u0 + eps <= ub and va <= v0 - eps and v0 + eps <= vb):
        raise DomainError("loop leaves the parameter domain")
    h = 0.5 * eps
    corners = [(u0 - h, v0 - h), (u0 + h, v0 - h), (u0 + h, v0 + h), (u0 - h, v0 + h)]
    M = np.eye(8)
    for a in range(4):
        p, q = corners[a], corners[(a + 1) % 4]
        mu, mv = 0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])
        du, dv = q[0] - p[0], q[1] - p[1]
        Au, Av = _connection_form(field, mu, mv)
        M = expm(-(Au * du + Av * dv)) @ M
    sigma = shape_data(field.surface, u0, v0).sigma
    return qmat2.from_real_representation((np.eye(8) - M) / (eps * eps * sigma))


def curvature_formula(field: SphereCongruenceField, u, v) -> QMat2:
    """R(d_u, d_v) / sigma from the closed form."""
    sd = shape_data(field.surface, u, v)
    h = field.h(u, v, sd)
    hu, hv = field.dh(u, v)
    X = ((sd.H ** 2 - sd.K) - (sd.H - h) ** 2) * sd.n
    w_u = (sd.H - h) * sd.f_u + sd.q_u
    w_v = (sd.H - h) * sd.f_v + sd.q_v
    Y = (hu * w_v - hv * w_u) / sd.sigma
    local = QMat2(ImQuaternion(*(0.5 * X)), 0.0, ImQuaternion(*(0.5 * Y)), ImQuaternion(*(0.5 * X)))
    F = ImQuaternion(*sd.f)
    return qmat2.mul(qmat2.mul(qmat2.translation_matrix(F), local), qmat2.translation_matrix(-F))


def _local_blocks(M: QMat2, f) -> tuple:
    F = ImQuaternion(*np.asarray(f, float))
    L = qmat2.mul(qmat2.mul(qmat2.translation_matrix(-F), M), qmat2.translation_matrix(F))
    return L


def compare_holonomy(field: SphereCongruenceField, center, eps: float) -> dict:
    """Relative errors of the holonomy against the formula, blockwise in the frame at f."""
    u, v = center
    sd = shape_data(field.surface, u, v)
    Hm = _local_blocks(loop_holonomy(field, center, eps), sd.f)
    Fm = _local_blocks(curvature_formula(field, u, v), sd.f)
    diag_ref = math.sqrt(Fm.a.norm2() + Fm.d.norm2())
    diag_err = math.sqrt((Hm.a - Fm.a).norm2() + (Hm.d - Fm.d).norm2())
    off_ref = Fm.c.norm()
    off_err = (Hm.c - Fm.c).norm()
    upper = Hm.b.norm()
    return {
        # relative errors are undefined where the formula vanishes
        "diag_rel": diag_err / diag_ref if diag_ref > REL_FLOOR else math.nan,
        "off_rel": off_err / off_ref if off_ref > REL_FLOOR else math.nan,
        "diag_abs": diag_err,
        "off_abs": off_err,
        "upper_abs": upper,
        "holonomy": Hm,
        "formula": Fm,
    }


def varying_h(amp: float = 0.3):
    """h = H + amp sin(u) cos(v), a non-constant congruence for testing the off-diagonal block."""

    def h(u, v, sd):
        return sd.H + amp * math.sin(u) * math.cos(v)

    return h


def sample_points(surface: ParamSurface, n: int, rng=None, margin: float = 0.1) -> list:
    """n random parameter points kept a fraction margin away from the domain edges."""
    rng = np.random.default_rng(rng)
    (ua, ub), (va, vb) = surface.domain
    du, dv = margin * (ub - ua), margin * (vb - va)
    u = rng.uniform(ua + du, ub - du, size=n)
    v = rng.uniform(va + dv, vb - dv, size=n)
    return list(zip(u.tolist(), v.tolist()))


def _nanmax(xs):
    xs = [x for x in xs if not math.isnan(x)]
    return max(xs) if xs else math.nan


def convergence_table(field: SphereCongruenceField, points, eps_list) -> list:
    """Worst-case holonomy errors over the points, one row per eps."""
    rows = []
    for eps in eps_list:
        res = [compare_holonomy(field, p, eps) for p in points]
        rows.append(
            {
                "eps": float(eps),
                "diag_rel": _nanmax([r["diag_rel"] for r in res]),
                "off_rel": _nanmax([r["off_rel"] for r in res]),
                "diag_abs": max(r["diag_abs"] for r in res),
                "off_abs": max(r["off_abs"] for r in res),
                "upper_abs": max(r["upper_abs"] for r in res),
            }
        )
    return rows


def _curvature_grid(surface: ParamSurface, U, V):
    """H, K and sigma on arrays of parameters, from the same fundamental forms as shape_data."""
    f, fu, fv, fuu, fuv, fvv = surface.jet(U, V)
    c = np.cross(fu, fv, axis=0)
    sigma = np.linalg.norm(c, axis=0)
    n = c / sigma
    E, F, G = (fu * fu).sum(0), (fu * fv).sum(0), (fv * fv).sum(0)
    L, M, N = -(fuu * n).sum(0), -(fuv * n).sum(0), -(fvv * n).sum(0)
    det = E * G - F * F
    H = 0.5 * (G * L - 2 * F * M + E * N) / det
    K = (L * N - M * M) / det
    return H, K, sigma


def willmore_integrand_quadrature(surface: ParamSurface, n: int = 256) -> float:
    """Tensor Gauss-Legendre quadrature of (H^2 - K) sigma over the parameter domain."""
    if not surface.closed:
        raise UnsupportedError("quadrature needs a closed preset surface")
    x, w = leggauss(n)
    (ua, ub), (va, vb) = surface.domain
    us = 0.5 * (ub - ua) * (x + 1) + ua
    vs = 0.5 * (vb - va) * (x + 1) + va
    wu = 0.5 * (ub - ua) * w
    wv = 0.5 * (vb - va) * w
    U, V = np.meshgrid(us, vs, indexing="ij")
    H, K, sigma = _curvature_grid(surface, U, V)
    return float(wu @ ((H * H - K) * sigma) @ wv)


def torus_willmore_exact(R: float, r: float) -> float:
    """Closed form pi^2 c^2 / sqrt(c^2 - 1), c = R/r."""
    c = R / r
    return math.pi ** 2 * c * c / math.sqrt(c * c - 1.0)


@dataclass
class Trajectory:
    times: np.ndarray
    points: np.ndarray  # (m, 3); NaN rows where the chart point is at infinity
    incidence: np.ndarray
    orthogonality: np.ndarray


def integrate_orthogonal_trajectory(
    sphere_path: Callable[[float], Sphere2],
    psi0,
    t0: float,
    t1: float,
    steps: int,
    sphere_velocity: Callable[[float], QMat2] | None = None,
    fd_step: float = 1e-4,
) -> Trajectory:
    """Classical RK4 for the parallel transport equation psi' = Sigma Sigma' psi / 2.

    ``psi0`` is a homogeneous vector or a PointS3 on the initial sphere.  The
    incidence residual on Sigma_t and the sine of the angle between velocity
    and sphere normal are recorded at every step.
    """
    if isinstance(psi0, PointS3):
        psi0 = psi0.psi
    elif isinstance(psi0, Quaternion) or not (len(psi0) == 2 and all(isinstance(x, Quaternion) for x in psi0)):
        psi0 = PointS3(psi0).psi

    def S(t):
        return qmat2.real_representation(sphere_path(t).m)

    if sphere_velocity is None:

        def dS(t):
            return _d6(lambda s: S(t + s), fd_step)

    else:

        def dS(t):
            return qmat2.real_representation(sphere_velocity(t))

    def rhs(t, x):
        return 0.5 * (S(t) @ (dS(t) @ x))

    dt = (t1 - t0) / steps
    x = qmat2.vector_to_real(psi0)
    times = t0 + dt * np.arange(steps + 1)
    pts = np.full((steps + 1, 3), np.nan)
    inc = np.zeros(steps + 1)
    orth = np.zeros(steps + 1)
    for s, t in enumerate(times):
        psi = qmat2.vector_from_real(x)
        p = PointS3.from_homogeneous(psi, check=False)
        M = sphere_path(t).m
        inc[s] = incidence_residual(M, p)
        if not p.is_infinity:
            pts[s] = p.affine.to_array()
            # velocity of the chart point: (x0' - p x1') x1^-1
            dx = rhs(t, x)
            d0, d1 = qmat2.vector_from_real(dx)
            vel = (d0 - p.affine * d1) * psi[1].inverse()
            vel = np.array([vel.x, vel.y, vel.z])
            nrm = np.array(list(M.a - p.affine * M.c)[1:])
            nv, nn = np.linalg.norm(vel), np.linalg.norm(nrm)
            orth[s] = np.linalg.norm(np.cross(vel, nrm)) / (nv * nn) if nv > 1e-300 and nn > 0 else 0.0
        if s == steps:
            break
        k1 = rhs(t, x)
        k2 = rhs(t + 0.5 * dt, x + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, x + 0.5 * dt * k2)
        k4 = rhs(t + dt, x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return Trajectory(times, pts, inc, orth)


def tractrix_path(t: float) -> Sphere2:
    """Unit sphere rolling on the plane z = 0 along the x axis."""
    return sphere_from_center_radius(ImQuaternion(t, 0.0, 1.0), 1.0)


def tractrix_velocity(t: float) -> QMat2:
    # d/dt of [[-c, -(|c|^2 - 1)], [-1, c]] with c = (t, 0, 1)
    return QMat2(ImQuaternion(-1.0, 0.0, 0.0), -2.0 * t, 0.0, ImQuaternion(1.0, 0.0, 0.0))


def tractrix_exact(t) -> np.ndarray:
    """Orthogonal trajectory of the top point: (t - tanh t, 0, 1 + sech t)."""
    t = np.asarray(t, float)
    return np.stack([t - np.tanh(t), np.zeros_like(t), 1.0 + 1.0 / np.cosh(t)], axis=-1)
