"""Gradient descent on the discrete Willmore energy, and face spheres."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels, qmat2
from .errors import DegenerateError, DomainError
from .spheres import Sphere2, is_sphere
from .surface import SimplicialSurface

log = logging.getLogger(__name__)

__all__ = ["FlowConfig", "FlowResult", "energy_gradient", "flow", "harmonic_mean_face_sphere", "directional_derivative"]


@dataclass
class FlowConfig:
    max_steps: int = 100
    step_init: float = 1e-2  # largest first trial displacement, in bbox diagonals
    armijo_c: float = 1e-4
    shrink: float = 0.5
    fd_step: float = 1e-6  # in bbox diagonals
    fixed_vertices: frozenset = field(default_factory=frozenset)
    grad_tol: float = 1e-10
    max_shrinks: int = 40

    def __post_init__(self):
        self.fixed_vertices = frozenset(int(v) for v in self.fixed_vertices)
        if not 0.0 < self.armijo_c < 1.0:
            raise DomainError("armijo_c must lie in (0, 1)")
        if not 0.0 < self.shrink < 1.0:
            raise DomainError("shrink must lie in (0, 1)")
        if not self.fd_step > 0.0:
            raise DomainError("fd_step must be positive")
        if self.max_steps < 0:
            raise DomainError("max_steps must be non-negative")


def energy_gradient(mesh: SimplicialSurface, fd_step: float = 1e-6, fixed=(), positions=None) -> np.ndarray:
    """Central differences of willmore_total, step fd_step * bbox diagonal.

    Only the edges whose quad contains a vertex are re-evaluated when that
    vertex moves.  A non-finite result is retried once with half the step.
    """
    P = mesh.positions if positions is None else positions
    diag = float(np.linalg.norm(P.max(axis=0) - P.min(axis=0)))
    pv, pe, ps = mesh.vertex_edge_pairs
    h = fd_step * diag
    for _ in range(2):
        g = kernels.fd_gradient(P, mesh.edge_quads, mesh.edge_weights, pv, pe, ps, h)
        if np.all(np.isfinite(g)):
            break
        h *= 0.5
    else:
        raise DegenerateError("energy gradient is not finite (coincident vertices?)")
    if len(fixed):
        g[list(fixed)] = 0.0
    return g


def _energy(mesh: SimplicialSurface, P) -> float:
    return float(kernels.willmore_energy(P, mesh.edge_quads, mesh.edge_weights, len(mesh.interior_vertices)))


def directional_derivative(mesh: SimplicialSurface, d: np.ndarray, h: float = 1e-6) -> float:
    """(E(x + h d) - E(x - h d)) / 2h with h relative to the bbox diagonal."""
    s = h * mesh.bbox_diagonal()
    return (_energy(mesh, mesh.positions + s * d) - _energy(mesh, mesh.positions - s * d)) / (2.0 * s)


@dataclass
class FlowResult:
    mesh: SimplicialSurface
    energies: list
    grad_norms: list
    step_sizes: list
    steps: int
    status: str


def flow(mesh: SimplicialSurface, config: FlowConfig | None = None) -> FlowResult:
    """Steepest descent with Armijo backtracking.

    The first trial step moves the fastest vertex by step_init * diagonal;
    later iterations start from twice the previously accepted step.
    """
    cfg = config or FlowConfig()
    P = mesh.positions.copy()
    fixed = sorted(cfg.fixed_vertices)
    E = _energy(mesh, P)
    energies, grad_norms, step_sizes = [E], [], []
    diag = mesh.bbox_diagonal()
    t_prev = None
    status = "max_steps"
    for it in range(cfg.max_steps):
        g = energy_gradient(mesh, cfg.fd_step, fixed, positions=P)
        gn2 = float(np.sum(g * g))
        grad_norms.append(math.sqrt(gn2))
        if math.sqrt(gn2) <= cfg.grad_tol:
            status = "converged"
            break
        t_max = cfg.step_init * diag / float(np.max(np.linalg.norm(g, axis=1)))
        t = t_max if t_prev is None else min(2.0 * t_prev, t_max)
        for _ in range(cfg.max_shrinks + 1):
            Pn = P - t * g
            if fixed:
                Pn[fixed] = P[fixed]
            En = _energy(mesh, Pn)
            if np.isfinite(En) and En <= E - cfg.armijo_c * t * gn2:
                break
            t *= cfg.shrink
        else:
            status = f"line search failed at step {it} after {cfg.max_shrinks} shrinks"
            log.warning(status)
            break
        P, E, t_prev = Pn, En, t
        energies.append(E)
        step_sizes.append(t)
    out = mesh.with_positions(P)
    return FlowResult(out, energies, grad_norms, step_sizes, len(step_sizes), status)


def harmonic_mean_face_sphere(mesh: SimplicialSurface, face) -> Sphere2:
    """(S_ij + S_jk + S_ki) scaled to unit Lorentz norm."""
    i, j, k = mesh.triangles[int(face)] if np.ndim(face) == 0 else face
    total = mesh.circumsphere(i, j).m + mesh.circumsphere(j, k).m + mesh.circumsphere(k, i).m
    n2 = qmat2.inner(total, total)
    if not n2 > 1e-24:
        raise DegenerateError(f"face {face}: sum of edge spheres is not spacelike (<S,S> = {n2:.3e})", element=("face", face))
    S = total * (1.0 / math.sqrt(n2))
    if not is_sphere(S):
        raise DegenerateError(f"face {face}: normalized sum is not a sphere", element=("face", face))
    return Sphere2(S, check=False)
