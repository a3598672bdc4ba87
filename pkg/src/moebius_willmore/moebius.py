"""Moebius transformations of S^3 = R^3 u {oo} as quaternionic 2x2 matrices.

A point of S^3 is an isotropic line psi H of the indefinite Hermitian form
``<psi, phi> = conj(psi0) phi1 + conj(psi1) phi0``; affine points ``p`` are the
lines of ``(p, 1)`` and infinity is the line of ``(1, 0)``.  Matrices with
``A* A = +I`` (Sp(1,1)) act as orientation preserving maps, ``A* A = -I`` as
orientation reversing ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qmat2
from .errors import DomainError, UnsupportedError
from .qmat2 import IDENTITY, QMat2
from .quat import ImQuaternion, Quaternion, as_im, mul

__all__ = [
    "PointS3",
    "MoebiusMap",
    "MoebiusVectorFieldElem",
    "translation",
    "stretch_rotation",
    "inv_translation",
    "apply",
    "decompose",
    "vector_field_at",
    "random_sp11",
    "sp11_basis",
]

# second homogeneous component below INFINITY_RTOL * |first| charts to oo
INFINITY_RTOL = 1e-12
ISOTROPY_RTOL = 1e-10


class PointS3:
    """A point of S^3: either an affine point of R^3 or infinity."""

    __slots__ = ("affine",)

    def __init__(self, affine=None):
        self.affine = None if affine is None else as_im(affine)

    @classmethod
    def infinity(cls) -> "PointS3":
        return cls(None)

    @classmethod
    def from_homogeneous(cls, psi, check=True) -> "PointS3":
        p0, p1 = psi
        n0, n1 = p0.norm(), p1.norm()
        if n0 == 0.0 and n1 == 0.0:
            raise DomainError("zero vector does not define a point")
        if check:
            iso = qmat2.hermitian_form(psi, psi).norm()
            if iso > ISOTROPY_RTOL * (n0 * n0 + n1 * n1):
                raise DomainError(f"vector is not isotropic (residual {iso:.3e})")
        if n1 <= INFINITY_RTOL * n0:
            return cls(None)
        p = mul(p0, p1.inverse())
        return cls(ImQuaternion(p.x, p.y, p.z))

    @property
    def is_infinity(self) -> bool:
        return self.affine is None

    @property
    def psi(self):
        """Homogeneous representative (p, 1) or (1, 0)."""
        if self.affine is None:
            return (Quaternion(1.0), Quaternion(0.0))
        return (self.affine, Quaternion(1.0))

    def isclose(self, other: "PointS3", tol=1e-10) -> bool:
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        return (self.affine - other.affine).norm() <= tol * max(1.0, self.affine.norm())

    def __repr__(self):
        return "PointS3(oo)" if self.affine is None else f"PointS3({self.affine.to_array().tolist()})"


class MoebiusMap:
    """A Moebius transformation, stored scale-normalized so that A* A = +-I.

    The sign of the matrix itself is kept (Sp(1,1) is a double cover), so two
    maps describe the same transformation iff their matrices agree up to sign.
    """

    __slots__ = ("m", "orientation")

    def __init__(self, m: QMat2, normalize: bool = True, tol: float = 1e-9):
        if normalize:
            P = qmat2.mul(qmat2.adjoint_star(m), m)
            lam = 0.5 * qmat2.real_trace(P)
            n2 = m.norm() ** 2
            if n2 == 0.0 or abs(lam) <= 1e-14 * n2:
                raise DomainError("matrix is not a Moebius transformation (A*A singular)")
            if (P - IDENTITY * lam).norm() > tol * n2:
                raise DomainError("matrix is not a Moebius transformation (A*A != lam I)")
            m = m * (1.0 / math.sqrt(abs(lam)))
            self.orientation = 1 if lam > 0 else -1
        else:
            self.orientation = 1 if qmat2.real_trace(qmat2.mul(qmat2.adjoint_star(m), m)) > 0 else -1
        self.m = m

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(IDENTITY, normalize=False)

    def __matmul__(self, other):
        if isinstance(other, MoebiusMap):
            return MoebiusMap(qmat2.mul(self.m, other.m))
        if isinstance(other, PointS3):
            return apply(self, other)
        return NotImplemented

    def __call__(self, p):
        if isinstance(p, PointS3):
            return apply(self, p)
        return apply(self, PointS3(p)).affine

    def inverse(self) -> "MoebiusMap":
        # A^-1 = +-A* for normalized matrices
        s = qmat2.adjoint_star(self.m)
        return MoebiusMap(s if self.orientation > 0 else -s, normalize=False)

    def conjugate(self, X: QMat2) -> QMat2:
        """A X A^-1: the matrix X expressed in the transformed coordinates."""
        return qmat2.mul(qmat2.mul(self.m, X), self.inverse().m)

    def isclose(self, other: "MoebiusMap", tol=1e-10, up_to_sign=True) -> bool:
        if (self.m - other.m).max_abs() <= tol:
            return True
        return up_to_sign and (self.m + other.m).max_abs() <= tol

    def __repr__(self):
        return f"MoebiusMap(orientation={self.orientation}, m={self.m!r})"


@dataclass(frozen=True)
class MoebiusVectorFieldElem:
    """An element Y of sp(1,1), i.e. Y* + Y = 0."""

    y: QMat2

    def __post_init__(self):
        err = (qmat2.adjoint_star(self.y) + self.y).max_abs()
        if err > 1e-9 * max(1.0, self.y.max_abs()):
            raise DomainError(f"matrix is not in sp(1,1) (|Y*+Y| = {err:.3e})")


def translation(x) -> MoebiusMap:
    """T_x: p -> p + x."""
    return MoebiusMap(qmat2.translation_matrix(as_im(x)), normalize=False)


def stretch_rotation(mu: Quaternion) -> MoebiusMap:
    """R_mu: p -> mu p conj(mu)."""
    if mu.norm2() == 0.0:
        raise DomainError("stretch rotation by the zero quaternion")
    return MoebiusMap(QMat2(mu, 0.0, 0.0, mu.conj().inverse()), normalize=False)


def inv_translation(y) -> MoebiusMap:
    """T^_y: p -> (p^-1 + y)^-1, the translation conjugated by inversion."""
    return MoebiusMap(QMat2(1.0, 0.0, as_im(y), 1.0), normalize=False)


def apply(A: MoebiusMap, p: PointS3) -> PointS3:
    m = A.m if isinstance(A, MoebiusMap) else A
    return PointS3.from_homogeneous(m.act(p.psi), check=False)


def decompose(A: MoebiusMap, tol: float = 1e-12):
    """Factor A = T^_y R_mu T_x and return (y, mu, x).

    Maps fixing infinity (c = 0) give y = 0, mu = a, x = conj(d) b.  Otherwise
    the image of infinity p = a c^-1 yields y = p^-1 and the reduced matrix
    T^_{-y} A fixes infinity.  Maps sending infinity to the origin have no
    such factorization and raise DomainError.
    """
    if not isinstance(A, MoebiusMap):
        A = MoebiusMap(A)
    if A.orientation < 0:
        raise UnsupportedError("decompose is defined on Sp(1,1) only")
    m = A.m
    scale = m.max_abs()
    a, b, c, d = m.a, m.b, m.c, m.d
    if c.norm() <= tol * scale:
        if a.norm() <= tol * scale:
            raise DomainError("malformed matrix: a = c = 0")
        x = mul(d.conj(), b)
        return ImQuaternion(0.0, 0.0, 0.0), a, ImQuaternion(x.x, x.y, x.z)
    if a.norm() <= 1e-9 * scale:
        raise DomainError("map sends infinity to the origin; no T^ R T factorization exists")
    p_inf = mul(a, c.inverse())
    y = as_im(p_inf.inverse())
    d_red = d - mul(y, b)
    x = mul(d_red.conj(), b)
    return y, a, ImQuaternion(x.x, x.y, x.z)


def reassemble(y, mu, x) -> MoebiusMap:
    return inv_translation(y) @ stretch_rotation(mu) @ translation(x)


def vector_field_at(Y, p: PointS3) -> ImQuaternion:
    """Velocity d/dt exp(tY).p at t = 0 in the affine chart.

    With Y (p, 1) = (u, w) the curve (p + t u)(1 + t w)^-1 has velocity
    u - p w.
    """
    y = Y.y if isinstance(Y, MoebiusVectorFieldElem) else Y
    if p.is_infinity:
        raise UnsupportedError("vector field at infinity needs a different chart")
    pt = p.affine
    u = mul(y.a, pt) + y.b
    w = mul(y.c, pt) + y.d
    v = u - mul(pt, w)
    return ImQuaternion(v.x, v.y, v.z)


def sp11_basis():
    """A basis of the 10-dimensional Lie algebra sp(1,1).

    Y = [[a, b], [c, -conj(a)]] with a in H, b and c imaginary.
    """
    basis = []
    units = [ImQuaternion(1, 0, 0), ImQuaternion(0, 1, 0), ImQuaternion(0, 0, 1)]
    basis.append(QMat2(Quaternion(1.0), 0.0, 0.0, Quaternion(-1.0)))
    for e in units:
        basis.append(QMat2(e, 0.0, 0.0, e))
    for e in units:
        basis.append(QMat2(0.0, e, 0.0, 0.0))
    for e in units:
        basis.append(QMat2(0.0, 0.0, e, 0.0))
    return [MoebiusVectorFieldElem(y) for y in basis]


def random_sp11(rng: np.random.Generator, scale: float = 1.0, length: int = 3) -> MoebiusMap:
    """Random word in the generators T_x, R_mu, T^_y."""
    A = MoebiusMap.identity()
    for _ in range(length):
        kind = rng.integers(3)
        if kind == 0:
            g = translation(ImQuaternion(*(scale * rng.normal(size=3))))
        elif kind == 1:
            q = Quaternion(*rng.normal(size=4))
            q = q * (math.exp(0.3 * scale * rng.normal()) / q.norm())
            g = stretch_rotation(q)
        else:
            g = inv_translation(ImQuaternion(*(scale * rng.normal(size=3))))
        A = A @ g
    return A
