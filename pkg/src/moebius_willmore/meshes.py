"""Small test meshes: platonic solids, subdivision and jitter."""

import numpy as np

from .errors import DomainError
from .moebius import MoebiusMap, random_sp11
from .surface import SimplicialSurface

__all__ = ["tetrahedron", "octahedron", "icosahedron", "subdivide", "jitter", "mesh_radius", "sphere_mesh", "hexagon_fan", "torus_mesh", "moebius_image", "random_guarded_transform"]


def _orient_outward(P, T):
    # flip faces whose normal points toward the centroid
    c = P.mean(axis=0)
    T = np.array(T, dtype=np.int64)
    for f, (i, j, k) in enumerate(T):
        n = np.cross(P[j] - P[i], P[k] - P[i])
        if n.dot(P[i] + P[j] + P[k] - 3 * c) < 0:
            T[f] = (i, k, j)
    return T


def tetrahedron() -> SimplicialSurface:
    P = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / np.sqrt(3.0)
    T = [(0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)]
    return SimplicialSurface(P, _orient_outward(P, T))


def octahedron() -> SimplicialSurface:
    P = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float)
    T = [(0, 2, 4), (2, 1, 4), (1, 3, 4), (3, 0, 4), (2, 0, 5), (1, 2, 5), (3, 1, 5), (0, 3, 5)]
    return SimplicialSurface(P, _orient_outward(P, T))


def icosahedron() -> SimplicialSurface:
    g = (1.0 + np.sqrt(5.0)) / 2.0
    P = np.array(
        [
            [-1, g, 0], [1, g, 0], [-1, -g, 0], [1, -g, 0],
            [0, -1, g], [0, 1, g], [0, -1, -g], [0, 1, -g],
            [g, 0, -1], [g, 0, 1], [-g, 0, -1], [-g, 0, 1],
        ],
        dtype=float,
    )
    P /= np.linalg.norm(P[0])
    T = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    return SimplicialSurface(P, _orient_outward(P, T))


def subdivide(mesh: SimplicialSurface, levels: int = 1, project: bool = True) -> SimplicialSurface:
    """Midpoint 1-to-4 subdivision, optionally projected to the unit sphere."""
    P = mesh.positions.copy()
    T = mesh.triangles.copy()
    for _ in range(levels):
        mid = {}
        pts = list(P)
        faces = []

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in mid:
                mid[key] = len(pts)
                pts.append(0.5 * (P[a] + P[b]))
            return mid[key]

        for i, j, k in T:
            a, b, c = midpoint(i, j), midpoint(j, k), midpoint(k, i)
            faces += [(i, a, c), (a, j, b), (c, b, k), (a, b, c)]
        P = np.array(pts)
        if project:
            P /= np.linalg.norm(P, axis=1)[:, None]
        T = np.array(faces, dtype=np.int64)
    return SimplicialSurface(P, T)


def sphere_mesh(levels: int = 2) -> SimplicialSurface:
    """Subdivided icosahedron on the unit sphere (levels=2 has 162 vertices)."""
    return subdivide(icosahedron(), levels)


def mesh_radius(mesh: SimplicialSurface) -> float:
    """RMS distance of the vertices from their centroid."""
    P = mesh.positions
    return float(np.sqrt(np.mean(np.sum((P - P.mean(axis=0)) ** 2, axis=1))))


def jitter(mesh: SimplicialSurface, amount: float, rng=None, fixed=()) -> SimplicialSurface:
    """Displace every vertex by an isotropic Gaussian of std amount * mesh radius."""
    rng = np.random.default_rng(rng)
    d = rng.normal(size=mesh.positions.shape) * (amount * mesh_radius(mesh) / np.sqrt(3.0))
    if len(fixed):
        d[list(fixed)] = 0.0
    return mesh.with_positions(mesh.positions + d)


def hexagon_fan(height: float = 0.0) -> SimplicialSurface:
    """Regular hexagon around a center vertex lifted by height."""
    ang = np.arange(6) * np.pi / 3.0
    P = np.vstack([[0.0, 0.0, height], np.stack([np.cos(ang), np.sin(ang), np.zeros(6)], axis=1)])
    T = [(0, 1 + a, 1 + (a + 1) % 6) for a in range(6)]
    return SimplicialSurface(P, T)


def torus_mesh(R: float = 2.0, r: float = 1.0, nu: int = 24, nv: int = 12) -> SimplicialSurface:
    """Triangulated torus of revolution, outward oriented."""
    P = []
    for a in range(nu):
        for b in range(nv):
            u = 2 * np.pi * a / nu
            v = 2 * np.pi * b / nv
            P.append([(R + r * np.cos(v)) * np.cos(u), (R + r * np.cos(v)) * np.sin(u), r * np.sin(v)])
    T = []
    for a in range(nu):
        for b in range(nv):
            i = a * nv + b
            j = ((a + 1) % nu) * nv + b
            k = ((a + 1) % nu) * nv + (b + 1) % nv
            l = a * nv + (b + 1) % nv
            T += [(i, j, k), (i, k, l)]
    return SimplicialSurface(np.array(P), T)


def _qmul(p, q):
    # Hamilton product of quaternion arrays with shape (..., 4)
    w1, x1, y1, z1 = np.moveaxis(p, -1, 0)
    w2, x2, y2, z2 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ],
        axis=-1,
    )


def moebius_image(mesh: SimplicialSurface, A: MoebiusMap, max_scale: float = 1e3) -> SimplicialSurface:
    """Mesh with every vertex mapped by q -> (aq+b)(cq+d)^-1.

    Raises DomainError when a vertex would land near infinity, i.e. when
    |cq+d| is below 1/max_scale of the matrix norm.
    """
    m = A.m
    n = mesh.n_vertices
    q = np.zeros((n, 4))
    q[:, 1:] = mesh.positions
    a, b, c, d = (np.broadcast_to(np.array(list(x), float), (n, 4)) for x in (m.a, m.b, m.c, m.d))
    num = _qmul(a, q) + b
    den = _qmul(c, q) + d
    dn2 = np.sum(den * den, axis=1)
    scale = m.norm() * (1.0 + np.linalg.norm(mesh.positions, axis=1))
    if np.any(np.sqrt(dn2) * max_scale < scale):
        raise DomainError("Moebius map sends a vertex too close to infinity")
    inv = den * np.array([1.0, -1.0, -1.0, -1.0]) / dn2[:, None]
    img = _qmul(num, inv)
    return mesh.with_positions(img[:, 1:])


def random_guarded_transform(mesh: SimplicialSurface, rng, scale: float = 0.5, max_scale: float = 1e2, tries: int = 100):
    """Random Sp(1,1) word whose image of the mesh stays away from infinity."""
    for _ in range(tries):
        A = random_sp11(rng, scale=scale)
        try:
            return A, moebius_image(mesh, A, max_scale)
        except DomainError:
            continue
    raise DomainError(f"no guarded transform found in {tries} tries")
