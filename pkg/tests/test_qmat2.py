import math

import numpy as np
import pytest
from hypothesis import given, settings

from moebius_willmore import qmat2
from moebius_willmore.errors import DomainError
from moebius_willmore.qmat2 import IDENTITY, ZERO, QMat2
from moebius_willmore.quat import ImQuaternion, Quaternion
from moebius_willmore.spheres import circle_from_point_tangent_binormal, euclidean_lift, sphere_from_plane

from conftest import im_quaternions, qmats, quaternions, sp11_words, unit_vectors


def close(A, B, tol):
    return (A - B).max_abs() <= tol


def test_identity_and_translations():
    A = QMat2(Quaternion(1, 2, 3, 4), ImQuaternion(1, 0, 0), 0.5, Quaternion(0, 0, 0, 2))
    assert close(qmat2.mul(A, IDENTITY), A, 0.0)
    x, y = ImQuaternion(1, 2, 3), ImQuaternion(-0.5, 0.25, 4)
    T = qmat2.mul(qmat2.translation_matrix(x), qmat2.translation_matrix(y))
    assert close(T, qmat2.translation_matrix(x + y), 1e-15)


def test_star_and_trace_examples():
    assert close(qmat2.adjoint_star(IDENTITY), IDENTITY, 0.0)
    assert qmat2.real_trace(IDENTITY) == 2.0
    S = sphere_from_plane(ImQuaternion(0, 0, 1), 0.7).m
    assert abs(qmat2.real_trace(S)) < 1e-15
    assert math.isclose(qmat2.inner(S, S), 1.0)


def test_lift_and_plane_products():
    assert abs(qmat2.inner(euclidean_lift(ImQuaternion(1, -2, 0.5)).m, euclidean_lift(ImQuaternion(1, -2, 0.5)).m)) < 1e-14
    n1, n2 = ImQuaternion(0, 0, 1), ImQuaternion(0, math.sin(1.0), math.cos(1.0))
    P1, P2 = sphere_from_plane(n1, 0.0).m, sphere_from_plane(n2, 0.0).m
    assert math.isclose(qmat2.inner(P1, P2), math.cos(1.0), rel_tol=1e-14)
    # cross of origin planes: sin(alpha) times the line through 0 along n1 x n2
    line = circle_from_point_tangent_binormal(ImQuaternion(), n1.cross(n2).normalized(), ImQuaternion()).m
    assert close(qmat2.cross(P1, P2), line * math.sin(1.0), 1e-14)
    assert close(qmat2.cross(P1, P1), ZERO, 0.0)


def test_exp_examples():
    assert close(qmat2.exp(ZERO), IDENTITY, 0.0)
    C = circle_from_point_tangent_binormal(ImQuaternion(0.2, 0, 1), ImQuaternion(1, 0, 0), ImQuaternion(0, 0.5, 0)).m
    th = 0.7
    assert close(qmat2.exp(C * th), IDENTITY * math.cos(th) + C * math.sin(th), 1e-14)
    N = QMat2(0.0, ImQuaternion(0, 0, 1), 0.0, 0.0)
    assert close(qmat2.exp(N), IDENTITY + N, 0.0)


def test_inverse_examples():
    assert close(qmat2.inverse(IDENTITY), IDENTITY, 0.0)
    x = ImQuaternion(1, -2, 3)
    assert close(qmat2.inverse(qmat2.translation_matrix(x)), qmat2.translation_matrix(-x), 1e-15)
    with pytest.raises(DomainError):
        qmat2.inverse(QMat2(1.0, 1.0, 1.0, 1.0))
    with pytest.raises(DomainError):
        qmat2.inverse(ZERO)


def test_real_representation_roundtrip(rng):
    A = QMat2.from_array(rng.normal(size=(2, 2, 4)))
    B = QMat2.from_array(rng.normal(size=(2, 2, 4)))
    R = qmat2.real_representation(A)
    assert close(qmat2.from_real_representation(R), A, 0.0)
    assert np.allclose(qmat2.real_representation(qmat2.mul(A, B)), R @ qmat2.real_representation(B), atol=1e-13)
    psi = (Quaternion(*rng.normal(size=4)), Quaternion(*rng.normal(size=4)))
    assert np.allclose(R @ qmat2.vector_to_real(psi), qmat2.vector_to_real(A.act(psi)), atol=1e-13)


def _scale(*Ms):
    return max(1.0, *(M.max_abs() for M in Ms))


@given(qmats, qmats, qmats)
def test_mul_associative(A, B, C):
    s = _scale(A) * _scale(B) * _scale(C)
    assert close(qmat2.mul(qmat2.mul(A, B), C), qmat2.mul(A, qmat2.mul(B, C)), 1e-12 * s * 4)


@given(qmats, qmats)
def test_star_antihomomorphism(A, B):
    lhs = qmat2.adjoint_star(qmat2.mul(A, B))
    rhs = qmat2.mul(qmat2.adjoint_star(B), qmat2.adjoint_star(A))
    assert close(lhs, rhs, 1e-12 * _scale(A) * _scale(B) * 4)
    assert close(qmat2.adjoint_star(qmat2.adjoint_star(A)), A, 0.0)


@given(qmats, quaternions, quaternions, quaternions, quaternions)
def test_star_is_adjoint(A, p0, p1, f0, f1):
    psi, phi = (p0, p1), (f0, f1)
    lhs = qmat2.hermitian_form(A.star().act(psi), phi)
    rhs = qmat2.hermitian_form(psi, A.act(phi))
    assert (lhs - rhs).max_abs() <= 1e-11 * _scale(A) * 100


@given(qmats, qmats)
def test_trace_cyclic(A, B):
    assert abs(qmat2.real_trace(qmat2.mul(A, B)) - qmat2.real_trace(qmat2.mul(B, A))) <= 1e-11 * _scale(A) * _scale(B)


@given(qmats, qmats)
def test_cross_antisymmetric(A, B):
    assert close(qmat2.cross(A, B), -qmat2.cross(B, A), 0.0)


def _lorentz(a, beta, gamma):
    return QMat2(a, beta, gamma, -a)


@given(im_quaternions, im_quaternions, quaternions, quaternions)
def test_lorentz_signature_and_anticommutator(a1, a2, s1, s2):
    Y1 = _lorentz(a1, s1.w, s2.w)
    Y2 = _lorentz(a2, s2.x, s1.y)
    assert math.isclose(qmat2.inner(Y1, Y1), a1.norm2() - s1.w * s2.w, rel_tol=1e-12, abs_tol=1e-12)
    anti = (qmat2.mul(Y1, Y2) + qmat2.mul(Y2, Y1)) * 0.5
    assert close(anti, IDENTITY * (-qmat2.inner(Y1, Y2)), 1e-11 * _scale(Y1) * _scale(Y2))


@settings(max_examples=200)
@given(qmats)
def test_exp_closed_form_matches_series(A):
    n = A.norm()
    if n > 2.0:
        A = A * (2.0 / n)
    assert close(qmat2.exp(A), qmat2._exp_series(A, terms=20), 1e-10)


@given(im_quaternions, unit_vectors())
def test_exp_branches_match_series(p, t):
    C = circle_from_point_tangent_binormal(ImQuaternion(*(p.to_array() * 0.3)), t, ImQuaternion())
    X = C.m * (1.0 / max(1.0, C.m.norm()))
    assert close(qmat2.exp(X), qmat2._exp_series(X, terms=30), 1e-10)


@given(sp11_words())
def test_inverse_of_group_elements(A):
    m = A.m
    assert close(qmat2.mul(m, qmat2.inverse(m)), IDENTITY, 1e-10)
    # general path through the real representation
    M = m + QMat2(Quaternion(0.1), 0.0, 0.0, 0.0)
    try:
        Mi = qmat2.inverse(M)
    except DomainError:
        return
    cond = np.linalg.cond(qmat2.real_representation(M))
    if cond < 1e6:
        assert close(qmat2.mul(M, Mi), IDENTITY, 1e-14 * cond * 10)
