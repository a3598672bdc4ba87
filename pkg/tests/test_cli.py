import csv
import json
import math
import shutil
import subprocess

import numpy as np
import pytest

from moebius_willmore.cli import main
from moebius_willmore.io import read_obj, write_obj
from moebius_willmore.meshes import icosahedron, jitter, octahedron, sphere_mesh


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, mesh in (
        ("oct", octahedron()),
        ("pico", jitter(icosahedron(), 0.05, np.random.default_rng(3))),
        ("sph", jitter(sphere_mesh(1), 0.02, np.random.default_rng(0))),
    ):
        p = tmp_path / f"{name}.obj"
        write_obj(mesh, p)
        paths[name] = str(p)
    paths["dir"] = tmp_path
    return paths


def first_number(text, prefix):
    for line in text.splitlines():
        if line.startswith(prefix):
            return float(line.split("=")[1].split()[0])
    raise AssertionError(f"no line starting with {prefix!r}")


def test_energy_octahedron(files, capsys):
    out_json = files["dir"] / "e.json"
    assert main(["energy", files["oct"], "--json", str(out_json)]) == 0
    out = capsys.readouterr().out
    assert abs(first_number(out, "W =")) < 1e-10
    doc = json.loads(out_json.read_text())
    assert len(doc["vertices"]) == 6 and abs(doc["totals"]["W"]) < 1e-10


def test_verify_perturbed_icosahedron(files, capsys):
    assert main(["verify", files["pico"]]) == 0
    assert "12/12" in capsys.readouterr().out


def test_verify_failure_exit_code(files, capsys):
    # an impossible tolerance makes the check fail
    assert main(["verify", files["pico"], "--tol", "1e-30"]) == 1


def test_fuzz_is_deterministic(files, capsys):
    assert main(["moebius-fuzz", files["pico"], "--trials", "10", "--seed", "4", "--tol", "1e-8"]) == 0
    a = capsys.readouterr().out
    main(["moebius-fuzz", files["pico"], "--trials", "10", "--seed", "4"])
    b = capsys.readouterr().out
    assert a == b


def test_flow_command(files, capsys):
    out_obj = files["dir"] / "out.obj"
    trace = files["dir"] / "trace.csv"
    assert main(["flow", files["sph"], str(out_obj), "--steps", "5", "--pin", "0,2", "--trace", str(trace)]) == 0
    before, after = read_obj(files["sph"]), read_obj(out_obj)
    assert np.array_equal(before.positions[[0, 2]], after.positions[[0, 2]])
    rows = list(csv.reader(trace.open()))
    assert rows[0] == ["step", "energy", "grad_norm", "step_size"]
    E = [float(r[1]) for r in rows[1:]]
    assert len(E) == 6 and all(b <= a for a, b in zip(E, E[1:]))
    assert math.isclose(E[-1], after.willmore_total(), rel_tol=1e-12)


def test_smooth_check_sphere(capsys, tmp_path):
    out_csv = tmp_path / "s.csv"
    assert main(["smooth-check", "--surface", "sphere", "--points", "4", "--csv", str(out_csv)]) == 0
    rows = list(csv.DictReader(out_csv.open()))
    assert len(rows) == 3
    for r in rows:
        assert float(r["diag_abs"]) < 1e-7 and float(r["off_abs"]) < 1e-7


def test_smooth_check_torus_and_quadrature(capsys):
    assert main(["smooth-check", "--points", "3", "--eps-list", "2e-3,1e-3"]) == 0
    assert main(["smooth-check", "--quadrature", "--R", str(math.sqrt(2)), "--n", "64"]) == 0
    out = capsys.readouterr().out
    assert "19.7392088" in out


def test_facespheres(files):
    out = files["dir"] / "f.json"
    assert main(["facespheres", files["oct"], "--json", str(out)]) == 0
    recs = json.loads(out.read_text())["faces"]
    assert len(recs) == 8 and all(r["kind"] == "sphere" for r in recs)


def test_input_errors(files, tmp_path, capsys):
    assert main(["energy", str(tmp_path / "missing.obj")]) == 2
    bad = tmp_path / "bad.obj"
    bad.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n")
    assert main(["energy", str(bad)]) == 2
    assert "line 4" in capsys.readouterr().err
    quad = tmp_path / "quad.obj"
    quad.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
    assert main(["energy", str(quad)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["energy", files["oct"], "--bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_degenerate_exit_code(tmp_path, capsys):
    # vertex 2 placed on vertex 0: six faces lose their circumcircle
    m = octahedron()
    P = m.positions.copy()
    P[2] = P[0]
    p = tmp_path / "coincident.obj"
    write_obj(m.with_positions(P), p)
    with np.errstate(all="ignore"):
        assert main(["energy", str(p)]) == 3
        assert main(["verify", str(p)]) == 3
        assert main(["facespheres", str(p), "--json", str(tmp_path / "f.json")]) == 3
        assert main(["flow", str(p), str(tmp_path / "o.obj"), "--steps", "2"]) == 3
    assert "numerical degeneracy" in capsys.readouterr().err


@pytest.mark.skipif(shutil.which("moebius-willmore") is None, reason="console script not installed")
def test_console_script(files):
    res = subprocess.run(["moebius-willmore", "verify", files["pico"]], capture_output=True, text=True)
    assert res.returncode == 0
