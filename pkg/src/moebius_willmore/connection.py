"""Rolling the edge circumspheres over a triangle mesh.

Along the Kagome arc from edge ij to edge ik inside face ijk both
circumspheres contain the circumcircle C_ijk, so the rotation
exp(alpha/2 C_ijk) about that circle carries S_ij onto S_ik.  Composing these
rotations around a vertex star gives the vertex monodromy; acting on the lift
of f_i it is right multiplication by a unit quaternion whose rotation angle
about the sphere normal is the vertex energy W_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qmat2
from .errors import DegenerateError, DomainError, InconsistentOrientationError, NotApplicableError
from .moebius import MoebiusMap
from .qmat2 import IDENTITY, QMat2
from .quat import ImQuaternion, Quaternion, exp_im, mul
from .spheres import Sphere2, sphere_from_point_normal_h, sphere_normal_at
from .surface import SimplicialSurface, build_kagome, corner_tangent

__all__ = [
    "KagomeTransport",
    "VertexMonodromy",
    "RollingConnection",
    "transport",
    "monodromy",
    "spherical_polygon_product",
    "exterior_angle_sum",
]


@dataclass(frozen=True)
class KagomeTransport:
    arc: int
    alpha: float
    map: MoebiusMap
    source: Sphere2
    target: Sphere2
    circle: QMat2


@dataclass(frozen=True)
class VertexMonodromy:
    vertex: int
    matrix: MoebiusMap
    mu: Quaternion
    theta: float
    matches_energy: bool
    energy: float
    error: float
    n0: ImQuaternion


class RollingConnection:
    """Transports of one mesh, memoized per arc and per edge sphere."""

    def __init__(self, mesh: SimplicialSurface):
        self.mesh = mesh
        self.kagome = build_kagome(mesh)
        self._spheres = {}
        self._transports = {}

    def edge_sphere(self, e: int) -> Sphere2:
        """Circumsphere of edge e; concircular quads get a stand-in from the pencil.

        Any sphere through the common circle works there: both transports at
        that edge rotate about the same circle, so the choice cancels.
        """
        S = self._spheres.get(e)
        if S is None:
            mesh = self.mesh
            i, j = mesh.edge_vertices(e)
            try:
                S = mesh.circumsphere(i, j)
            except DegenerateError:
                S = self._pencil_representative(i, j)
            self._spheres[e] = S
        return S

    def _pencil_representative(self, i, j) -> Sphere2:
        mesh = self.mesh
        _, _, k, _ = mesh.quad(i, j)
        fi = mesh.positions[i]
        t = corner_tangent(fi, mesh.positions[j], mesh.positions[k])
        t = t / np.linalg.norm(t)
        nv = mesh.vertex_normal(i)
        n = nv - nv.dot(t) * t
        if np.linalg.norm(n) < 1e-8:
            n = np.cross(t, [1.0, 0.0, 0.0])
            if np.linalg.norm(n) < 1e-8:
                n = np.cross(t, [0.0, 1.0, 0.0])
        n = n / np.linalg.norm(n)
        d = mesh.positions[j] - fi
        h = -2.0 * d.dot(n) / d.dot(d)
        return sphere_from_point_normal_h(ImQuaternion(*fi), ImQuaternion(*n), h)

    def transport(self, arc: int) -> KagomeTransport:
        T = self._transports.get(arc)
        if T is not None:
            return T
        a = self.kagome.arcs[arc]
        S1 = self.edge_sphere(a.source)
        S2 = self.edge_sphere(a.target)
        C = self.mesh.circumcircle((a.i, a.j, a.k)).m
        cos_a = qmat2.inner(S1.m, S2.m)
        if cos_a <= -1.0 + 1e-14:
            raise InconsistentOrientationError(f"arc {arc}: circumspheres are anti-aligned")
        sin_a = qmat2.inner(qmat2.cross(S1.m, S2.m), C)
        alpha = math.atan2(sin_a, cos_a)
        P = MoebiusMap(qmat2.exp(C * (0.5 * alpha)), normalize=False)
        T = KagomeTransport(arc, alpha, P, S1, S2, C)
        self._transports[arc] = T
        return T

    def face_cycle(self, f: int):
        """Composed transport around the Kagome triangle of face f and its angle."""
        M = IDENTITY
        theta = 0.0
        for arc in self.kagome.face_cycles[f]:
            T = self.transport(arc)
            M = qmat2.mul(T.map.m, M)
            theta += 0.5 * T.alpha
        return M, theta

    def monodromy(self, i: int, tol: float = 1e-8, start: int = 0) -> VertexMonodromy:
        """Transport around the star of i, beginning at the edge from i to its start-th neighbor."""
        mesh = self.mesh
        if not mesh.is_interior_vertex(i):
            raise NotApplicableError(f"vertex {i} is on the boundary")
        arcs = self.kagome.vertex_cycles[int(i)]
        start %= len(arcs)
        arcs = arcs[start:] + arcs[:start]
        M = IDENTITY
        for arc in arcs:
            M = qmat2.mul(self.transport(arc).map.m, M)
        fi = ImQuaternion(*mesh.positions[i])
        x, mu = M.act((fi, Quaternion(1.0)))
        S0 = self.edge_sphere(self.kagome.arcs[arcs[0]].source)
        n0 = sphere_normal_at(S0, fi)
        im = ImQuaternion(mu.x, mu.y, mu.z)
        theta = (2.0 * math.atan2(-im.dot(n0), mu.w)) % (2.0 * math.pi)
        W = mesh.willmore_vertex(i).W
        expected = exp_im(n0 * (-0.5 * W))
        err = min((expected - mu).max_abs(), (expected + mu).max_abs())
        return VertexMonodromy(int(i), MoebiusMap(M, normalize=False), mu, theta, err < tol, W, err, n0)


def transport(mesh: SimplicialSurface, arc: int) -> KagomeTransport:
    return RollingConnection(mesh).transport(arc)


def monodromy(mesh: SimplicialSurface, i: int, tol: float = 1e-8) -> VertexMonodromy:
    return RollingConnection(mesh).monodromy(i, tol)


def _axis_angles(normals):
    ns = [np.asarray(list(n) if not isinstance(n, np.ndarray) else n, float)[-3:] for n in normals]
    m = len(ns)
    if m < 3:
        raise DomainError("a spherical polygon needs at least three vertices")
    alphas, axes = [], []
    for l in range(m):
        a, b = ns[l], ns[(l + 1) % m]
        c = np.cross(a, b)
        s = np.linalg.norm(c)
        if a.dot(b) <= -1.0 + 1e-12:
            raise DomainError("consecutive normals are antipodal")
        if s < 1e-15:
            alphas.append(0.0)
            axes.append(None)
            continue
        alphas.append(math.atan2(s, a.dot(b)))
        axes.append(c / s)
    return ns, alphas, axes


def spherical_polygon_product(normals) -> Quaternion:
    """rho_{m-1} ... rho_0 with rho_l = exp(alpha_l/2 t_l) the transport n_l -> n_{l+1}."""
    _, alphas, axes = _axis_angles(normals)
    q = Quaternion(1.0)
    for a, t in zip(alphas, axes):
        if t is None:
            continue
        q = mul(exp_im(ImQuaternion(*(0.5 * a * t))), q)
    return q


def exterior_angle_sum(normals) -> float:
    """Sum of the angles between consecutive transport axes t_{l-1}, t_l."""
    _, _, axes = _axis_angles(normals)
    axes = [t for t in axes if t is not None]
    total = 0.0
    for l in range(len(axes)):
        a, b = axes[l - 1], axes[l]
        total += math.atan2(np.linalg.norm(np.cross(a, b)), a.dot(b))
    return total
