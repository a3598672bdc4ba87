"""Numpy implementation of the per-edge kernels.

An interior edge ij with faces ijk and jil is stored as the quad (i, j, k, l).
With a = f_j - f_i, b = f_k - f_i, c = f_l - f_i and x' = x/|x|^2 the
circumcircle tangents at f_i are parallel to a' - b' (face ijk) and c' - a'
(face jil); beta is the angle between them.
"""

import numpy as np

BACKEND = "numpy"


def quad_betas(Q: np.ndarray) -> np.ndarray:
    """Circumcircle intersection angles for quads of positions, shape (N, 4, 3)."""
    Q = np.asarray(Q, dtype=float)
    a = Q[:, 1] - Q[:, 0]
    b = Q[:, 2] - Q[:, 0]
    c = Q[:, 3] - Q[:, 0]
    a = a / np.einsum("ij,ij->i", a, a)[:, None]
    b = b / np.einsum("ij,ij->i", b, b)[:, None]
    c = c / np.einsum("ij,ij->i", c, c)[:, None]
    u = a - b
    v = c - a
    s = np.linalg.norm(np.cross(u, v), axis=1)
    return np.arctan2(s, np.einsum("ij,ij->i", u, v))


def edge_betas(P: np.ndarray, quads: np.ndarray) -> np.ndarray:
    return quad_betas(np.asarray(P, dtype=float)[np.asarray(quads)])


def willmore_energy(P, quads, weights, n_interior: int) -> float:
    """sum_e w_e beta_e - pi * (number of interior vertices)."""
    return float(np.dot(weights, edge_betas(P, quads)) - np.pi * n_interior)


def fd_gradient(P, quads, weights, pair_vertex, pair_edge, pair_slot, step: float) -> np.ndarray:
    """Central-difference gradient of the energy.

    Moving vertex v only changes the edges whose quad contains v; the pair
    arrays list every (v, edge, slot in quad) incidence.
    """
    P = np.asarray(P, dtype=float)
    Q = P[quads[pair_edge]]
    w = weights[pair_edge]
    idx = np.arange(len(pair_edge))
    grad = np.zeros_like(P)
    for c in range(3):
        Qp = Q.copy()
        Qp[idx, pair_slot, c] += step
        Qm = Q.copy()
        Qm[idx, pair_slot, c] -= step
        d = w * (quad_betas(Qp) - quad_betas(Qm)) / (2.0 * step)
        grad[:, c] = np.bincount(pair_vertex, weights=d, minlength=len(P))
    return grad
