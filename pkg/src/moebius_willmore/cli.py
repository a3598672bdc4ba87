"""Command line interface.

Exit codes: 0 success, 1 verification failure, 2 input error,
3 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

import numpy as np

from . import __version__
from .connection import RollingConnection
from .errors import DegenerateError, GeometryError, InconsistentOrientationError, MeshStructureError, ObjParseError, UnsupportedError
from .flow import FlowConfig, flow
from .io import energy_report, face_sphere_records, read_obj, write_csv, write_json, write_obj
from .meshes import random_guarded_transform
from .smooth import (
    SphereCongruenceField,
    convergence_table,
    plane,
    round_sphere,
    sample_points,
    torus,
    torus_willmore_exact,
    varying_h,
    willmore_integrand_quadrature,
)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_DEGENERATE = 3

log = logging.getLogger("moebius_willmore")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated vertex ids, got {text!r}") from None


def cmd_energy(args) -> int:
    mesh = read_obj(args.mesh)
    doc = energy_report(mesh, tol=args.tol)
    print(f"W = {doc['totals']['W']:.17g}")
    print(f"sum K = {doc['totals']['K']:.17g}")
    if not args.quiet:
        print(f"{'vertex':>7} {'deg':>4} {'W_i':>24} {'K_i':>24} {'theta':>24}")
        for r in doc["vertices"]:
            th = "-" if r["theta"] is None else f"{r['theta']:.17g}"
            print(f"{r['id']:>7} {r['degree']:>4} {r['W']:>24.17g} {r['K']:>24.17g} {th:>24}")
    if args.json:
        write_json(doc, args.json)
    return EXIT_OK


def cmd_verify(args) -> int:
    mesh = read_obj(args.mesh)
    conn = RollingConnection(mesh)
    failed, worst = [], 0.0
    for i in mesh.interior_vertices:
        m = conn.monodromy(int(i), args.tol)
        worst = max(worst, m.error)
        if not m.matches_energy:
            failed.append((int(i), m.error))
    n = len(mesh.interior_vertices)
    print(f"{n - len(failed)}/{n} interior vertices match, max error {worst:.3e} (tol {args.tol:g})")
    for i, err in failed:
        print(f"  vertex {i}: error {err:.3e}")
    return EXIT_OK if not failed else EXIT_VERIFY


def cmd_fuzz(args) -> int:
    mesh = read_obj(args.mesh)
    rng = np.random.default_rng(args.seed)
    W = mesh.willmore_total()
    worst = 0.0
    for _ in range(args.trials):
        _, img = random_guarded_transform(mesh, rng, scale=args.scale)
        worst = max(worst, abs(img.willmore_total() - W))
    rel = worst / abs(W) if W != 0 else math.inf if worst else 0.0
    print(f"W = {W:.17g}")
    print(f"max |dW| = {worst:.3e} over {args.trials} transforms (relative {rel:.3e})")
    if args.tol is not None and worst > args.tol * max(abs(W), 1.0):
        return EXIT_VERIFY
    return EXIT_OK


def cmd_flow(args) -> int:
    mesh = read_obj(args.input)
    pins = args.pin or []
    bad = [p for p in pins if not 0 <= p < mesh.n_vertices]
    if bad:
        raise MeshStructureError(f"pinned vertex ids out of range: {bad}")
    cfg = FlowConfig(max_steps=args.steps, step_init=args.step_init, fd_step=args.fd_step, fixed_vertices=pins)
    res = flow(mesh, cfg)
    write_obj(res.mesh, args.output)
    E = res.energies
    print(f"{res.steps} steps, W {E[0]:.10g} -> {E[-1]:.10g} ({res.status})")
    if args.trace:
        gn = res.grad_norms + [math.nan] * (len(E) - len(res.grad_norms))
        st = [math.nan] + res.step_sizes
        write_csv(args.trace, ["step", "energy", "grad_norm", "step_size"], [(k, E[k], gn[k], st[k]) for k in range(len(E))])
    return EXIT_OK


def _surface(args):
    if args.surface == "plane":
        return plane()
    if args.surface == "sphere":
        return round_sphere(args.r)
    return torus(args.R, args.r)


def cmd_smooth(args) -> int:
    surf = _surface(args)
    if args.quadrature:
        value = willmore_integrand_quadrature(surf, args.n)
        print(f"integral of (H^2 - K) dA over {surf.name}: {value:.15g}")
        if args.surface == "torus":
            exact = torus_willmore_exact(args.R, args.r)
            print(f"closed form: {exact:.15g} (relative difference {abs(value - exact) / exact:.3e})")
        return EXIT_OK
    field = SphereCongruenceField(surf, varying_h(args.h_amp) if args.h_amp else None)
    pts = sample_points(surf, args.points, args.seed)
    rows = convergence_table(field, pts, args.eps_list)
    keys = ["eps", "diag_rel", "off_rel", "diag_abs", "off_abs", "upper_abs"]
    print(" ".join(f"{k:>11}" for k in keys))
    for r in rows:
        print(" ".join(f"{r[k]:>11.3e}" for k in keys))
    if args.csv:
        write_csv(args.csv, keys, [[r[k] for k in keys] for r in rows])
    return EXIT_OK


def cmd_facespheres(args) -> int:
    mesh = read_obj(args.mesh)
    recs = face_sphere_records(mesh)
    write_json({"version": __version__, "faces": recs}, args.json)
    bad = sum(r["kind"] == "degenerate" for r in recs)
    print(f"{len(recs)} faces written to {args.json}, {bad} degenerate")
    return EXIT_OK if not bad else EXIT_DEGENERATE


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="moebius-willmore", description="Discrete Willmore energy and rolling sphere checks.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("energy", help="total and per-vertex energy")
    s.add_argument("mesh")
    s.add_argument("--json")
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("-q", "--quiet", action="store_true", help="totals only")
    s.set_defaults(func=cmd_energy)

    s = sub.add_parser("verify", help="monodromy against the angle sum at every interior vertex")
    s.add_argument("mesh")
    s.add_argument("--tol", type=float, default=1e-8)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("moebius-fuzz", help="energy change under random Moebius transforms")
    s.add_argument("mesh")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--scale", type=float, default=0.5)
    s.add_argument("--tol", type=float, default=None, help="fail when |dW| exceeds tol * max(|W|, 1)")
    s.set_defaults(func=cmd_fuzz)

    s = sub.add_parser("flow", help="Willmore gradient descent")
    s.add_argument("input")
    s.add_argument("output")
    s.add_argument("--steps", type=int, default=100)
    s.add_argument("--pin", type=_int_list)
    s.add_argument("--trace")
    s.add_argument("--step-init", type=float, default=1e-2)
    s.add_argument("--fd-step", type=float, default=1e-6)
    s.set_defaults(func=cmd_flow)

    s = sub.add_parser("smooth-check", help="small-loop holonomy convergence or the Willmore integral")
    s.add_argument("--surface", choices=["plane", "sphere", "torus"], default="torus")
    s.add_argument("--R", type=float, default=2.0, help="torus center radius")
    s.add_argument("--r", type=float, default=1.0, help="torus tube or sphere radius")
    s.add_argument("--eps-list", type=_float_list, default=[4e-3, 2e-3, 1e-3])
    s.add_argument("--points", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--h-amp", type=float, default=0.0, help="use h = H + amp sin(u) cos(v)")
    s.add_argument("--csv")
    s.add_argument("--quadrature", action="store_true")
    s.add_argument("--n", type=int, default=256, help="quadrature nodes per direction")
    s.set_defaults(func=cmd_smooth)

    s = sub.add_parser("facespheres", help="harmonic-mean face spheres as JSON")
    s.add_argument("mesh")
    s.add_argument("--json", required=True)
    s.set_defaults(func=cmd_facespheres)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (DegenerateError, InconsistentOrientationError) as exc:
        print(f"error: numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (OSError, ObjParseError, UnsupportedError, MeshStructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
