import math

import numpy as np
import pytest

from moebius_willmore import qmat2
from moebius_willmore.errors import DegenerateError, DomainError
from moebius_willmore.flow import FlowConfig, directional_derivative, energy_gradient, flow, harmonic_mean_face_sphere
from moebius_willmore.meshes import icosahedron, jitter, octahedron, sphere_mesh, subdivide
from moebius_willmore.moebius import PointS3, sp11_basis, vector_field_at
from moebius_willmore.quat import ImQuaternion
from moebius_willmore.spheres import is_incident, is_sphere, sphere_from_plane, sphere_geometry


@pytest.fixture
def noisy(rng):
    return jitter(subdivide(icosahedron(), 1), 0.03, rng)


def test_config_validation():
    for bad in (dict(armijo_c=0.0), dict(armijo_c=1.0), dict(shrink=1.5), dict(fd_step=0.0), dict(max_steps=-1)):
        with pytest.raises(DomainError):
            FlowConfig(**bad)
    assert FlowConfig(fixed_vertices=[3, 1]).fixed_vertices == frozenset({1, 3})


def test_gradient_vanishes_at_inscribed_meshes():
    for m in (octahedron(), icosahedron()):
        assert np.abs(energy_gradient(m)).max() < 1e-6 * m.bbox_diagonal()


def test_gradient_consistency(noisy, rng):
    g = energy_gradient(noisy)
    for _ in range(20):
        d = rng.normal(size=g.shape)
        gd = float(np.sum(g * d))
        assert abs(gd - directional_derivative(noisy, d)) / (1 + abs(gd)) < 1e-4


def test_gradient_translation_and_moebius_gauge(noisy):
    g = energy_gradient(noisy)
    assert np.abs(g.sum(axis=0)).max() < 1e-6 * np.linalg.norm(g)
    for Y in sp11_basis():
        X = np.array([vector_field_at(Y, PointS3(ImQuaternion(*p))).to_array() for p in noisy.positions])
        assert abs(np.sum(g * X)) < 1e-6 * np.linalg.norm(g) * np.linalg.norm(X)


def test_gradient_zero_at_fixed(noisy):
    g = energy_gradient(noisy, fixed=[0, 5])
    assert np.all(g[[0, 5]] == 0.0)


def test_flow_decreases_energy(rng):
    m = jitter(sphere_mesh(1), 0.02, rng)
    res = flow(m, FlowConfig(max_steps=30))
    E = np.array(res.energies)
    assert np.all(np.diff(E) <= 0.0)
    assert E[-1] < 0.5 * E[0]
    assert res.steps == len(res.step_sizes) == len(E) - 1
    assert math.isclose(res.mesh.willmore_total(), E[-1], rel_tol=1e-12, abs_tol=1e-15)


def test_flow_zero_steps_identity(noisy):
    res = flow(noisy, FlowConfig(max_steps=0))
    assert np.array_equal(res.mesh.positions, noisy.positions)
    assert res.energies == [noisy.willmore_total()]


def test_flow_pins_vertices(noisy):
    pins = [0, 3, 17]
    res = flow(noisy, FlowConfig(max_steps=10, fixed_vertices=pins))
    assert np.array_equal(res.mesh.positions[pins], noisy.positions[pins])
    assert not np.array_equal(res.mesh.positions, noisy.positions)


def test_flow_converged_status():
    res = flow(octahedron(), FlowConfig(max_steps=5, grad_tol=1e-6))
    assert res.status == "converged" and res.steps == 0


def test_line_search_failure_is_reported(noisy):
    res = flow(noisy, FlowConfig(max_steps=5, armijo_c=0.999999, max_shrinks=2))
    assert res.status.startswith("line search failed")
    assert all(np.diff(res.energies) <= 0)


def test_harmonic_mean_sphere_examples():
    m = octahedron()
    for f in range(m.n_faces):
        g = sphere_geometry(harmonic_mean_face_sphere(m, f))
        assert g.center.norm() < 1e-12 and math.isclose(g.radius, 1.0)


def test_harmonic_mean_sphere_random(noisy):
    for f in range(noisy.n_faces):
        S = harmonic_mean_face_sphere(noisy, f)
        assert is_sphere(S.m)
        assert math.isclose(qmat2.inner(S.m, S.m), 1.0, rel_tol=1e-12)
        for v in noisy.triangles[f]:
            # all three edge spheres contain the face circle, so the sum does too
            assert is_incident(S, ImQuaternion(*noisy.positions[v]), 1e-8)


def test_harmonic_mean_sphere_degenerate(monkeypatch):
    m = octahedron()
    normals = iter(
        [ImQuaternion(1, 0, 0), ImQuaternion(-0.5, math.sqrt(3) / 2, 0), ImQuaternion(-0.5, -math.sqrt(3) / 2, 0)]
    )
    monkeypatch.setattr(type(m), "circumsphere", lambda self, i, j, from_vertex=None: sphere_from_plane(next(normals), 0.0))
    with pytest.raises(DegenerateError):
        harmonic_mean_face_sphere(m, 0)
