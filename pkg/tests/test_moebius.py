import math

import numpy as np
import pytest
from hypothesis import assume, given, settings

from moebius_willmore import qmat2
from moebius_willmore.errors import DomainError, UnsupportedError
from moebius_willmore.moebius import (
    MoebiusMap,
    MoebiusVectorFieldElem,
    PointS3,
    apply,
    decompose,
    inv_translation,
    random_sp11,
    reassemble,
    sp11_basis,
    stretch_rotation,
    translation,
    vector_field_at,
)
from moebius_willmore.qmat2 import IDENTITY, ZERO, QMat2
from moebius_willmore.quat import ImQuaternion, Quaternion, mul
from moebius_willmore.spheres import (
    circle_through_points,
    is_circle,
    is_incident,
    is_sphere,
    point_pair,
    sphere_from_center_radius,
)

from conftest import im_quaternions, nonzero_im, nonzero_quaternions, sp11_words


def P(*x):
    return PointS3(ImQuaternion(*x))


def test_translation_examples():
    x = ImQuaternion(1, -2, 0.5)
    assert translation(ImQuaternion()).isclose(MoebiusMap.identity())
    assert apply(translation(x), P(0.25, 0, 3)).isclose(P(1.25, -2, 3.5))
    assert apply(translation(x), PointS3.infinity()).is_infinity


def test_stretch_rotation_examples():
    p = ImQuaternion(0.3, 1.0, -2.0)
    assert stretch_rotation(Quaternion(1)).isclose(MoebiusMap.identity())
    mu = Quaternion(0.5, -1.0, 2.0, 0.25)
    expected = mul(mul(mu, p), mu.conj())
    assert apply(stretch_rotation(mu), PointS3(p)).isclose(PointS3(ImQuaternion(expected.x, expected.y, expected.z)))
    with pytest.raises(DomainError):
        stretch_rotation(Quaternion())


def test_inv_translation_example():
    p, y = ImQuaternion(0.3, 1.0, -2.0), ImQuaternion(1, 0.5, 0)
    q = (p.inverse() + y).inverse()
    assert apply(inv_translation(y), PointS3(p)).isclose(PointS3(q), 1e-13)


def test_normalization_and_orientation():
    A = MoebiusMap(qmat2.translation_matrix(ImQuaternion(1, 2, 3)) * 3.0)
    assert (qmat2.mul(A.m.star(), A.m) - IDENTITY).max_abs() < 1e-14
    assert A.orientation == 1
    R = MoebiusMap(QMat2(1.0, 0.0, 0.0, -1.0))
    assert R.orientation == -1
    assert R(ImQuaternion(1, 2, 3)).isclose(ImQuaternion(-1, -2, -3))
    with pytest.raises(DomainError):
        MoebiusMap(QMat2(1.0, 1.0, 0.0, 1.0))


def test_from_homogeneous_infinity_threshold():
    assert PointS3.from_homogeneous((Quaternion(1.0), Quaternion(1e-13))).is_infinity
    assert not PointS3.from_homogeneous((Quaternion(0, 1.0), Quaternion(1e-6)), check=False).is_infinity
    with pytest.raises(DomainError):
        PointS3.from_homogeneous((Quaternion(), Quaternion()))
    with pytest.raises(DomainError):
        PointS3.from_homogeneous((Quaternion(1.0), Quaternion(1.0)))  # not isotropic


def test_decompose_examples():
    x = ImQuaternion(0.5, -1, 2)
    y, mu, xx = decompose(translation(x))
    assert y.norm() == 0 and mu.isclose(Quaternion(1)) and xx.isclose(x)
    y0, mu0 = ImQuaternion(0.3, 0.1, -0.7), Quaternion(1.2, 0.3, -0.4, 0.1)
    A = reassemble(y0, mu0, x)
    y, mu, xx = decompose(A)
    # A is normalized, so mu agrees with mu0 up to sign and positive scale
    s = mu0.norm() / mu.norm() * (1.0 if (mu - mu0).norm() < (mu + mu0).norm() else -1.0)
    assert y.isclose(y0, 1e-12)
    assert (mu * s).isclose(mu0, 1e-12)
    assert reassemble(y, mu, xx).isclose(A, 1e-12)


def test_decompose_errors():
    with pytest.raises(UnsupportedError):
        decompose(MoebiusMap(QMat2(1.0, 0.0, 0.0, -1.0)))
    with pytest.raises(DomainError):
        decompose(QMat2(0.0, 1.0, 0.0, 0.0))  # a = c = 0


def test_decompose_counterexample_infinity_to_origin():
    # p -> p^-1 sends infinity to 0: A = [[0, 1], [1, 0]] lies in Sp(1,1)
    # but has no factorization T^_y R_mu T_x, since those all send infinity to y^-1 or keep it
    A = MoebiusMap(QMat2(0.0, 1.0, 1.0, 0.0))
    assert A.orientation == 1
    assert apply(A, PointS3.infinity()).isclose(P(0, 0, 0))
    with pytest.raises(DomainError):
        decompose(A)


def test_vector_field_examples():
    p = P(0.5, -1.0, 2.0)
    assert vector_field_at(ZERO, p).norm() == 0.0
    U = point_pair(P(0, 0, 0), PointS3.infinity()).m
    # U = diag(1, -1) generates the dilation p -> e^{2t} p
    assert vector_field_at(U, p).isclose(p.affine * 2.0, 1e-15)
    with pytest.raises(UnsupportedError):
        vector_field_at(U, PointS3.infinity())
    with pytest.raises(DomainError):
        MoebiusVectorFieldElem(IDENTITY)


def test_vector_field_matches_flow_derivative():
    p = P(0.5, -1.0, 2.0)

    def central(Y, t):
        plus = apply(MoebiusMap(qmat2.exp(Y.y * t), normalize=False), p).affine
        minus = apply(MoebiusMap(qmat2.exp(Y.y * -t), normalize=False), p).affine
        return (plus - minus) * (0.5 / t)

    for Y in sp11_basis():
        v = vector_field_at(Y, p)
        e1 = (central(Y, 1e-3) - v).norm()
        e2 = (central(Y, 5e-4) - v).norm()
        assert e1 < 1e-4
        if e1 > 1e-9:
            assert 3.5 < e1 / e2 < 4.5


def test_sp11_basis_is_independent():
    B = np.array([Y.y.to_array().ravel() for Y in sp11_basis()])
    assert np.linalg.matrix_rank(B) == 10
    for Y in sp11_basis():
        g = MoebiusMap(qmat2.exp(Y.y * 0.3))
        assert g.orientation == 1


@given(sp11_words(), sp11_words())
def test_membership_closed_under_mul_and_inverse(A, B):
    for M in (A @ B, A.inverse(), B.inverse() @ A):
        m = M.m
        assert (qmat2.mul(m.star(), m) - IDENTITY).max_abs() < 1e-9
    assert (A @ A.inverse()).isclose(MoebiusMap.identity(), 1e-9)


@given(sp11_words(), sp11_words(), im_quaternions)
def test_apply_is_action(A, B, p):
    q = PointS3(p)
    lhs = apply(A @ B, q)
    rhs = apply(A, apply(B, q))
    if lhs.is_infinity or rhs.is_infinity or lhs.affine.norm() > 1e4:
        return
    assert lhs.isclose(rhs, 1e-8)


@settings(max_examples=300)
@given(sp11_words(length=4))
def test_decompose_roundtrip(A):
    try:
        y, mu, x = decompose(A)
    except DomainError:
        return
    assert reassemble(y, mu, x).isclose(A, 1e-10 * max(1.0, A.m.max_abs()) ** 2)


@given(sp11_words(), im_quaternions, nonzero_im)
def test_equivariance_on_spheres(A, c, r):
    S = sphere_from_center_radius(c, 0.5 + r.norm())
    T = A.conjugate(S.m)
    assert is_sphere(T, 1e-8)
    rng = np.random.default_rng(0)
    for _ in range(4):
        d = rng.normal(size=3)
        pt = PointS3(c + ImQuaternion(*(d / np.linalg.norm(d) * (0.5 + r.norm()))))
        img = apply(A, pt)
        assume(img.is_infinity or img.affine.norm() < 1e4)
        assert is_incident(T, img, 1e-8)


@given(sp11_words(), im_quaternions)
def test_concircular_points_stay_concircular(A, p):
    pts = [p + ImQuaternion(math.cos(t), math.sin(t), 0.0) for t in (0.1, 1.7, 3.0, 4.4)]
    imgs = [apply(A, PointS3(q)) for q in pts]
    assume(all(not q.is_infinity and q.affine.norm() < 1e3 for q in imgs))
    C = circle_through_points(*(q.affine for q in imgs[:3]))
    assert is_circle(C.m, 1e-8)
    assert is_incident(C, imgs[3], 1e-7)


def test_random_sp11_is_group_element(rng):
    for _ in range(50):
        A = random_sp11(rng)
        assert (qmat2.mul(A.m.star(), A.m) - IDENTITY).max_abs() < 1e-9
