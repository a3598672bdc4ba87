"""Triangle meshes in R^3 with circumcircles, edge circumspheres and the
circumcircle-angle Willmore energy.

Halfedge ``3 f + k`` of face ``f = (v0, v1, v2)`` runs from ``v_k`` to
``v_{k+1}``.  An undirected edge ``ij`` is stored through the halfedge
``i -> j``; its left face is ``ijk`` and the face across is ``jil``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .errors import DegenerateError, MeshStructureError, NotApplicableError
from .quat import ImQuaternion
from .spheres import Circle, Sphere2, circle_through_points, sphere_from_point_normal_h

log = logging.getLogger(__name__)

# |sin beta| below this counts as a concircular quad
CONCIRCULAR_TOL = 1e-10

__all__ = [
    "SimplicialSurface",
    "VertexEnergyReport",
    "KagomeComplex",
    "KagomeArc",
    "build_kagome",
    "corner_tangent",
]


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def corner_tangent(fi, fj, fk) -> np.ndarray:
    """Tangent at fi of the circle fi -> fj -> fk (unnormalized)."""
    a = np.asarray(fj, float) - fi
    b = np.asarray(fk, float) - fi
    return a / a.dot(a) - b / b.dot(b)


@dataclass
class VertexEnergyReport:
    vertex: int
    betas: list
    W: float
    K: float
    neighbors: list = field(default_factory=list)
    degenerate_edges: list = field(default_factory=list)


class SimplicialSurface:
    """Oriented triangle mesh with derived halfedge adjacency."""

    def __init__(self, positions, triangles):
        P = np.array(positions, dtype=float)
        T = np.array(triangles, dtype=np.int64)
        if P.ndim != 2 or P.shape[1] != 3:
            raise MeshStructureError("positions must have shape (n, 3)")
        if T.size == 0:
            T = T.reshape(0, 3)
        if T.ndim != 2 or T.shape[1] != 3:
            raise MeshStructureError("triangles must have shape (m, 3)")
        if T.size and (T.min() < 0 or T.max() >= len(P)):
            raise MeshStructureError("triangle references a missing vertex")
        if np.any(T[:, 0] == T[:, 1]) or np.any(T[:, 1] == T[:, 2]) or np.any(T[:, 2] == T[:, 0]):
            raise MeshStructureError("triangle with repeated vertex")
        if not np.all(np.isfinite(P)):
            raise MeshStructureError("non-finite vertex position")
        self.positions = P
        self.triangles = T
        self._build()

    # combinatorics ----------------------------------------------------------

    def _build(self):
        T = self.triangles
        nf = len(T)
        nh = 3 * nf
        origin = T.reshape(-1)
        dest = np.roll(T, -1, axis=1).reshape(-1)
        index = {}
        for h in range(nh):
            key = (int(origin[h]), int(dest[h]))
            if key in index:
                raise MeshStructureError(
                    f"directed edge {key} appears twice: faces are not consistently oriented or the mesh is not manifold"
                )
            index[key] = h
        twin = np.full(nh, -1, dtype=np.int64)
        for (u, v), h in index.items():
            twin[h] = index.get((v, u), -1)

        edge_of = np.full(nh, -1, dtype=np.int64)
        edge_h = []
        for h in range(nh):
            if edge_of[h] >= 0:
                continue
            e = len(edge_h)
            edge_of[h] = e
            if twin[h] >= 0:
                edge_of[twin[h]] = e
            edge_h.append(h)
        self.origin = origin
        self.dest = dest
        self.twin = twin
        self.edge_of = edge_of
        self.edge_halfedge = np.array(edge_h, dtype=np.int64)
        self._halfedge_index = index

        nv = len(self.positions)
        out = [[] for _ in range(nv)]
        for h in range(nh):
            out[origin[h]].append(h)
        self._outgoing = out
        self._stars = [self._walk_star(v) for v in range(nv)]

    @staticmethod
    def next(h: int) -> int:
        return h - h % 3 + (h + 1) % 3

    @staticmethod
    def prev(h: int) -> int:
        return h - h % 3 + (h + 2) % 3

    def _walk_star(self, v: int):
        """Outgoing halfedges of v in counterclockwise order and whether v is interior."""
        out = self._outgoing[v]
        if not out:
            return [], False
        # rotate clockwise to a boundary start if there is one
        h0 = out[0]
        h = h0
        interior = True
        for _ in range(len(out) + 1):
            t = self.twin[h]
            if t < 0:
                interior = False
                break
            g = self.next(t)
            if g == h0:
                break
            h = g
        start = h0 if interior else h
        star = [start]
        h = start
        while True:
            t = self.twin[self.prev(h)]
            if t < 0 or t == start:
                if t < 0 and interior:
                    raise MeshStructureError(f"vertex {v}: star is not a disk")
                break
            star.append(t)
            h = t
            if len(star) > len(out):
                raise MeshStructureError(f"vertex {v}: star does not close")
        if len(star) != len(out):
            raise MeshStructureError(f"vertex {v} is non-manifold (several fans)")
        return star, interior

    @property
    def n_vertices(self) -> int:
        return len(self.positions)

    @property
    def n_faces(self) -> int:
        return len(self.triangles)

    @property
    def n_edges(self) -> int:
        return len(self.edge_halfedge)

    def halfedge(self, i: int, j: int) -> int:
        try:
            return self._halfedge_index[(int(i), int(j))]
        except KeyError:
            raise MeshStructureError(f"no halfedge {i} -> {j}") from None

    def edge_id(self, i: int, j: int) -> int:
        h = self._halfedge_index.get((int(i), int(j)))
        if h is None:
            h = self.halfedge(j, i)
        return int(self.edge_of[h])

    def edge_vertices(self, e: int):
        h = self.edge_halfedge[e]
        return int(self.origin[h]), int(self.dest[h])

    def is_interior_edge(self, e: int) -> bool:
        return self.twin[self.edge_halfedge[e]] >= 0

    def is_interior_vertex(self, v: int) -> bool:
        return self._stars[v][1]

    @cached_property
    def interior_vertices(self) -> np.ndarray:
        return np.array([v for v in range(self.n_vertices) if self._stars[v][1]], dtype=np.int64)

    def star(self, v: int):
        """Neighbors j_0, ..., j_{N-1} of v in counterclockwise order.

        Consecutive neighbors span the faces (v, j_a, j_{a+1}).
        """
        hs, interior = self._stars[v]
        js = [int(self.dest[h]) for h in hs]
        if hs and not interior:
            js.append(int(self.dest[self.next(hs[-1])]))
        return js

    def star_halfedges(self, v: int):
        return list(self._stars[v][0])

    def degree(self, v: int) -> int:
        return len(self.star(v))

    def quad(self, i: int, j: int):
        """(i, j, k, l) for the faces ijk and jil adjacent to edge ij."""
        h = self._halfedge_index.get((int(i), int(j)))
        if h is None and (int(j), int(i)) in self._halfedge_index:
            raise NotApplicableError(f"edge ({i}, {j}) is a boundary edge")
        if h is None:
            h = self.halfedge(i, j)
        t = self.twin[h]
        if t < 0:
            raise NotApplicableError(f"edge ({i}, {j}) is a boundary edge")
        k = int(self.dest[self.next(h)])
        l = int(self.dest[self.next(t)])
        return int(i), int(j), k, l

    @cached_property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    @cached_property
    def is_closed(self) -> bool:
        return bool(np.all(self.twin >= 0))

    # edge arrays for the kernels ------------------------------------------

    @cached_property
    def interior_edge_ids(self) -> np.ndarray:
        return np.array([e for e in range(self.n_edges) if self.is_interior_edge(e)], dtype=np.int64)

    @cached_property
    def edge_quads(self) -> np.ndarray:
        """(i, j, k, l) per interior edge, in the order of interior_edge_ids."""
        rows = [self.quad(*self.edge_vertices(e)) for e in self.interior_edge_ids]
        return np.array(rows, dtype=np.int64).reshape(-1, 4)

    @cached_property
    def edge_weights(self) -> np.ndarray:
        """Half the number of interior endpoints per interior edge."""
        interior = np.zeros(self.n_vertices, dtype=bool)
        interior[self.interior_vertices] = True
        q = self.edge_quads
        return 0.5 * (interior[q[:, 0]].astype(float) + interior[q[:, 1]])

    @cached_property
    def vertex_edge_pairs(self):
        """(vertex, interior edge index, slot) for every vertex of every quad."""
        q = self.edge_quads
        ne = len(q)
        pv = q.reshape(-1)
        pe = np.repeat(np.arange(ne, dtype=np.int64), 4)
        ps = np.tile(np.arange(4, dtype=np.int64), ne)
        return pv, pe, ps

    def with_positions(self, positions) -> "SimplicialSurface":
        """Same connectivity, new positions (combinatorics are shared)."""
        new = object.__new__(SimplicialSurface)
        new.__dict__.update({k: v for k, v in self.__dict__.items() if k != "positions"})
        P = np.array(positions, dtype=float)
        if P.shape != self.positions.shape:
            raise MeshStructureError("position array has the wrong shape")
        new.positions = P
        return new

    # geometry ---------------------------------------------------------------

    def _f(self, i) -> np.ndarray:
        return self.positions[i]

    def circumcircle(self, face) -> Circle:
        """Oriented circumcircle of a face, given by index or vertex triple."""
        if np.ndim(face) == 0:
            i, j, k = self.triangles[int(face)]
            fid = int(face)
        else:
            i, j, k = face
            fid = int(self.halfedge(i, j)) // 3
        try:
            return circle_through_points(*(ImQuaternion(*self._f(v)) for v in (i, j, k)))
        except DegenerateError as exc:
            raise DegenerateError(f"face {fid}: {exc}", element=("face", fid)) from None

    def corner_tangent(self, i, j, k) -> np.ndarray:
        """Unit tangent at f_i of the circumcircle of face ijk."""
        return _unit(corner_tangent(self._f(i), self._f(j), self._f(k)))

    def beta(self, i: int, j: int) -> float:
        """Intersection angle of the circumcircles of the faces ijk and jil."""
        q = self.quad(i, j)
        return float(kernels.quad_betas(self.positions[list(q)][None])[0])

    def circumsphere_frame(self, i: int, j: int, from_vertex=None):
        """(point, unit normal, mean curvature) of the circumsphere of edge ij
        evaluated at f_i (or at f_j when from_vertex == j).

        The normal at f_i points along t^i_jil x t^i_ijk.
        """
        i, j, k, l = self.quad(i, j)
        if from_vertex is not None and from_vertex == j:
            # edge ji has faces jil and ijk
            return self.circumsphere_frame(j, i)
        fi = self._f(i)
        t_ijk = corner_tangent(fi, self._f(j), self._f(k))
        t_jil = corner_tangent(fi, self._f(l), self._f(j))
        cr = np.cross(t_jil, t_ijk)
        if np.linalg.norm(cr) <= CONCIRCULAR_TOL * np.linalg.norm(t_ijk) * np.linalg.norm(t_jil):
            e = self.edge_id(i, j)
            raise DegenerateError(f"edge {e} ({i}, {j}): the four points are concircular", element=("edge", e))
        n = _unit(cr)
        d = self._f(j) - fi
        h = -2.0 * d.dot(n) / d.dot(d)
        return fi, n, h

    def circumsphere(self, i: int, j: int, from_vertex=None) -> Sphere2:
        p, n, h = self.circumsphere_frame(i, j, from_vertex)
        return sphere_from_point_normal_h(ImQuaternion(*p), ImQuaternion(*n), h)

    def circumsphere_by_edge(self, e: int) -> Sphere2:
        return self.circumsphere(*self.edge_vertices(e))

    def corner_angle(self, i, j, k) -> float:
        a = self._f(j) - self._f(i)
        b = self._f(k) - self._f(i)
        return math.atan2(np.linalg.norm(np.cross(a, b)), a.dot(b))

    def gauss_defect(self, i: int) -> float:
        """2 pi minus the Euclidean angle sum at vertex i."""
        if not self.is_interior_vertex(i):
            raise NotApplicableError(f"vertex {i} is on the boundary")
        js = self.star(i)
        n = len(js)
        return 2.0 * math.pi - sum(self.corner_angle(i, js[a], js[(a + 1) % n]) for a in range(n))

    def willmore_vertex(self, i: int) -> VertexEnergyReport:
        """W_i = sum of beta over the star edges minus 2 pi."""
        if not self.is_interior_vertex(i):
            raise NotApplicableError(f"vertex {i} is on the boundary")
        js = self.star(i)
        Q = np.array([self.positions[list(self.quad(i, j))] for j in js])
        betas = kernels.quad_betas(Q)
        degenerate = [self.edge_id(i, j) for j, b in zip(js, betas) if abs(math.sin(b)) < CONCIRCULAR_TOL]
        if degenerate:
            log.debug("vertex %d: concircular edges %s contribute beta = 0", i, degenerate)
        W = float(np.sum(betas) - 2.0 * math.pi)
        return VertexEnergyReport(i, [float(b) for b in betas], W, self.gauss_defect(i), js, degenerate)

    def edge_betas(self) -> np.ndarray:
        """beta per interior edge, ordered as interior_edge_ids."""
        return kernels.edge_betas(self.positions, self.edge_quads)

    def vertex_energies(self) -> np.ndarray:
        """W_i for every vertex; NaN on the boundary."""
        W = np.full(self.n_vertices, np.nan)
        b = self.edge_betas()
        q = self.edge_quads
        acc = np.bincount(q[:, 0], weights=b, minlength=self.n_vertices) + np.bincount(
            q[:, 1], weights=b, minlength=self.n_vertices
        )
        iv = self.interior_vertices
        W[iv] = acc[iv] - 2.0 * math.pi
        return W

    def willmore_total(self) -> float:
        """Half the sum of W_i over the interior vertices."""
        return float(
            kernels.willmore_energy(self.positions, self.edge_quads, self.edge_weights, len(self.interior_vertices))
        )

    def bbox_diagonal(self) -> float:
        return float(np.linalg.norm(self.positions.max(axis=0) - self.positions.min(axis=0)))

    def vertex_normal(self, i: int) -> np.ndarray:
        """Area weighted normal from the incident faces."""
        js = self.star(i)
        n = len(js)
        fi = self._f(i)
        acc = np.zeros(3)
        stop = n if self.is_interior_vertex(i) else n - 1
        for a in range(stop):
            acc += np.cross(self._f(js[a]) - fi, self._f(js[(a + 1) % n]) - fi)
        return _unit(acc)


# Kagome complex ---------------------------------------------------------------

@dataclass(frozen=True)
class KagomeArc:
    """Arc i_{jk}: from edge ij to edge ik inside face ijk."""

    corner: int  # halfedge i -> j of face ijk
    i: int
    j: int
    k: int
    source: int  # edge id of ij
    target: int  # edge id of ik


@dataclass
class KagomeComplex:
    nodes: list  # mesh edge ids
    arcs: list  # KagomeArc per corner, indexed by halfedge
    face_cycles: list  # per mesh face: three arc indices
    vertex_cycles: dict  # interior vertex -> arc indices in ccw order

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)


def build_kagome(mesh: SimplicialSurface) -> KagomeComplex:
    arcs = []
    for h in range(3 * mesh.n_faces):
        i = int(mesh.origin[h])
        j = int(mesh.dest[h])
        k = int(mesh.dest[mesh.next(h)])
        arcs.append(KagomeArc(h, i, j, k, int(mesh.edge_of[h]), int(mesh.edge_of[mesh.prev(h)])))
    face_cycles = []
    for f in range(mesh.n_faces):
        h0 = 3 * f
        # i_{jk}: ij -> ik, then k_{ij}: ki -> kj, then j_{ki}: jk -> ji
        face_cycles.append([h0, mesh.prev(h0), mesh.next(h0)])
    vertex_cycles = {int(v): mesh.star_halfedges(int(v)) for v in mesh.interior_vertices}
    return KagomeComplex(list(range(mesh.n_edges)), arcs, face_cycles, vertex_cycles)
