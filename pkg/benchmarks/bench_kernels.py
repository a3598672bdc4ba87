"""Compare the compiled and numpy kernels on subdivided sphere meshes.

Run with ``python3 benchmarks/bench_kernels.py``.
"""

import argparse
import timeit

import numpy as np

from moebius_willmore import _kernels_py
from moebius_willmore.meshes import jitter, sphere_mesh

try:
    from moebius_willmore import _kernels as _compiled
except ImportError:
    _compiled = None


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench(levels, repeat):
    mesh = jitter(sphere_mesh(levels), 0.02, np.random.default_rng(0))
    P, Q, w = mesh.positions, mesh.edge_quads, mesh.edge_weights
    pv, pe, ps = mesh.vertex_edge_pairs
    n_int = len(mesh.interior_vertices)
    h = 1e-6 * mesh.bbox_diagonal()
    backends = [("numpy", _kernels_py)] + ([("cython", _compiled)] if _compiled else [])
    rows = []
    for name, k in backends:
        t_e = _time(lambda: k.willmore_energy(P, Q, w, n_int), repeat)
        t_g = _time(lambda: k.fd_gradient(P, Q, w, pv, pe, ps, h), repeat)
        rows.append((name, t_e, t_g, k.fd_gradient(P, Q, w, pv, pe, ps, h)))
    print(f"{mesh.n_vertices} vertices, {len(Q)} interior edges")
    for name, t_e, t_g, _ in rows:
        print(f"  {name:>7}: energy {t_e * 1e3:9.3f} ms   gradient {t_g * 1e3:9.3f} ms")
    if len(rows) == 2:
        (_, e0, g0, G0), (_, e1, g1, G1) = rows
        print(f"  speedup: energy x{e0 / e1:.1f}, gradient x{g0 / g1:.1f}, max gradient difference {np.abs(G0 - G1).max():.2e}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--levels", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _compiled is None:
        print("compiled extension not built; timing numpy only")
    for lv in args.levels:
        bench(lv, args.repeat)


if __name__ == "__main__":
    main()
