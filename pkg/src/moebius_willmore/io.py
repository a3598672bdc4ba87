"""OBJ mesh files, JSON energy reports and CSV traces."""

from __future__ import annotations

import csv
import json
import logging
import math
import os

import numpy as np

from . import __version__
from .connection import RollingConnection
from .errors import DegenerateError, GeometryError, NotApplicableError, ObjParseError, UnsupportedError
from .flow import harmonic_mean_face_sphere
from .spheres import Plane, sphere_geometry
from .surface import SimplicialSurface

log = logging.getLogger(__name__)

__all__ = [
    "REPORT_SCHEMA",
    "read_obj",
    "write_obj",
    "energy_report",
    "check_energy_report",
    "write_json",
    "write_csv",
    "face_sphere_records",
]

REPORT_SCHEMA = "moebius-willmore/energy-report/1"
_SKIPPED = {"vn", "vt", "vp", "g", "o", "s", "mtllib", "usemtl", "l", "p"}


def _vertex_index(tok: str, n: int, lineno: int) -> int:
    head = tok.split("/", 1)[0]
    try:
        k = int(head)
    except ValueError:
        raise ObjParseError(f"bad face index {tok!r}", lineno) from None
    if k == 0:
        raise ObjParseError("face index 0 is not valid in OBJ", lineno)
    idx = k - 1 if k > 0 else n + k
    if not 0 <= idx < n:
        raise ObjParseError(f"face index {k} out of range (have {n} vertices)", lineno)
    return idx


def read_obj(path) -> SimplicialSurface:
    """Read the v/f subset of OBJ.  Texture and normal indices are ignored."""
    verts, faces = [], []
    warned = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tag, *rest = line.split()
            if tag == "v":
                if len(rest) not in (3, 4):
                    raise ObjParseError(f"vertex needs 3 coordinates, got {len(rest)}", lineno)
                try:
                    xyz = [float(t) for t in rest[:3]]
                except ValueError:
                    raise ObjParseError(f"bad vertex coordinate in {line!r}", lineno) from None
                if not all(math.isfinite(c) for c in xyz):
                    raise ObjParseError("non-finite vertex coordinate", lineno)
                verts.append(xyz)
            elif tag == "f":
                if len(rest) < 3:
                    raise ObjParseError("face needs at least 3 vertices", lineno)
                if len(rest) > 3:
                    raise UnsupportedError(f"line {lineno}: face with {len(rest)} vertices; only triangles are supported")
                faces.append([_vertex_index(t, len(verts), lineno) for t in rest])
            else:
                if tag not in warned:
                    log.warning("line %d: skipping unsupported OBJ statement %r", lineno, tag)
                    warned.add(tag)
                if tag not in _SKIPPED:
                    log.debug("unknown OBJ tag %r", tag)
    if not verts:
        raise ObjParseError("no vertices", 0)
    return SimplicialSurface(np.array(verts, float), np.array(faces, np.int64).reshape(-1, 3))


def write_obj(mesh: SimplicialSurface, path) -> None:
    """Positions with 17 significant digits so that reading back is exact."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# moebius-willmore {__version__}\n")
        for p in mesh.positions:
            fh.write("v {:.17g} {:.17g} {:.17g}\n".format(*p))
        for t in mesh.triangles:
            fh.write("f {} {} {}\n".format(*(int(i) + 1 for i in t)))


def energy_report(mesh: SimplicialSurface, tol: float = 1e-8, monodromy: bool = True) -> dict:
    """Per-vertex energies and totals as a JSON-ready document."""
    conn = RollingConnection(mesh) if monodromy else None
    records = []
    for i in mesh.interior_vertices:
        i = int(i)
        rep = mesh.willmore_vertex(i)
        if not (math.isfinite(rep.W) and math.isfinite(rep.K)):
            raise DegenerateError(f"vertex {i}: energy is not finite (coincident or degenerate neighbours?)", element=("vertex", i))
        rec = {
            "id": i,
            "degree": mesh.degree(i),
            "betas": rep.betas,
            "W": rep.W,
            "K": rep.K,
            "theta": None,
            "matches_energy": None,
        }
        if conn is not None:
            try:
                mono = conn.monodromy(i, tol)
                rec["theta"] = mono.theta
                rec["matches_energy"] = bool(mono.matches_energy)
                rec["monodromy_error"] = mono.error
            except GeometryError as exc:
                rec["error"] = str(exc)
        records.append(rec)
    lo = mesh.positions.min(axis=0)
    hi = mesh.positions.max(axis=0)
    doc = {
        "schema": REPORT_SCHEMA,
        "version": __version__,
        "mesh": {
            "vertices": mesh.n_vertices,
            "faces": mesh.n_faces,
            "edges": mesh.n_edges,
            "interior_vertices": len(records),
            "closed": mesh.is_closed,
            "bbox": {"min": lo.tolist(), "max": hi.tolist()},
        },
        "tolerances": {"monodromy": tol},
        "vertices": records,
        "totals": {
            "W": 0.5 * math.fsum(r["W"] for r in records),
            "K": math.fsum(r["K"] for r in records),
        },
    }
    check_energy_report(doc)
    return doc


def check_energy_report(doc: dict, rtol: float = 1e-12) -> None:
    """Raise ValueError unless the totals match the records."""
    if doc.get("schema") != REPORT_SCHEMA:
        raise ValueError(f"unknown report schema {doc.get('schema')!r}")
    recs = doc["vertices"]
    W = 0.5 * math.fsum(r["W"] for r in recs)
    K = math.fsum(r["K"] for r in recs)
    for name, val in (("W", W), ("K", K)):
        tot = doc["totals"][name]
        if abs(tot - val) > rtol * max(1.0, abs(val)):
            raise ValueError(f"total {name} = {tot!r} does not match the records ({val!r})")
    if doc["mesh"]["interior_vertices"] != len(recs):
        raise ValueError("interior vertex count does not match the records")


def write_json(doc: dict, path) -> None:
    if doc.get("schema") == REPORT_SCHEMA:
        check_energy_report(doc)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, allow_nan=False)
        fh.write("\n")
    os.replace(tmp, path)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])


def face_sphere_records(mesh: SimplicialSurface) -> list:
    """Harmonic-mean face spheres as plane or center/radius records."""
    out = []
    for f in range(mesh.n_faces):
        rec = {"face": f, "vertices": [int(x) for x in mesh.triangles[f]]}
        try:
            g = sphere_geometry(harmonic_mean_face_sphere(mesh, f))
        except NotApplicableError:
            rec.update(kind="boundary")
            out.append(rec)
            continue
        except DegenerateError as exc:
            rec.update(kind="degenerate", error=str(exc))
            out.append(rec)
            continue
        if isinstance(g, Plane):
            rec.update(kind="plane", normal=g.normal.to_array().tolist(), offset=g.offset)
        else:
            rec.update(kind="sphere", center=g.center.to_array().tolist(), radius=g.radius, orientation=g.orientation)
        out.append(rec)
    return out
