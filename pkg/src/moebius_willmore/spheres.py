"""Oriented spheres, circles and point pairs as quaternionic matrices.

Every object is the matrix of its inversion (reflection):

* sphere ``S``: ``S* = S``, ``tr S = 0``, ``S^2 = -I``;
* circle ``C``: ``C* = -C``, ``C^2 = -I`` (half turn about the circle);
* point pair ``U``: ``U* = -U``, ``U^2 = I``.

Negating a matrix flips the orientation and keeps the point set.  Spheres and
point lifts span the Minkowski space R^{4,1} of self-adjoint trace free
matrices, with ``<A, B> = -tr(AB)/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import qmat2
from .errors import DegenerateError, DomainError, InconsistentOrientationError
from .moebius import MoebiusMap, PointS3
from .qmat2 import IDENTITY, QMat2
from .quat import ImQuaternion, Quaternion, as_im, mul

MEMBERSHIP_TOL = 1e-9
INCIDENCE_TOL = 1e-8
PARABOLIC_TOL = 1e-8

__all__ = [
    "Sphere2",
    "Circle",
    "PointPair",
    "LightVector",
    "InfTranslation",
    "PencilKind",
    "PencilClass",
    "Plane",
    "RoundSphere",
    "is_sphere",
    "is_circle",
    "is_point_pair",
    "sphere_from_point_normal_h",
    "sphere_from_center_radius",
    "sphere_from_plane",
    "circle_from_point_tangent_binormal",
    "circle_through_points",
    "point_pair",
    "euclidean_lift",
    "lift_infinity",
    "inf_translation",
    "classify_pencil",
    "rolling_map",
    "circle_circle_product",
    "sphere_pointpair_product",
    "sphere_normal_at",
    "sphere_mean_curvature_at",
    "circle_tangent_at",
    "circle_binormal_at",
    "sphere_geometry",
    "incidence_residual",
    "is_incident",
]


# membership predicates -------------------------------------------------------

def _scale(m: QMat2) -> float:
    return max(1.0, m.max_abs())


def is_sphere(m: QMat2, tol: float = MEMBERSHIP_TOL) -> bool:
    s = _scale(m)
    if abs(qmat2.real_trace(m)) > tol * s:
        return False
    if (qmat2.adjoint_star(m) - m).max_abs() > tol * s:
        return False
    return (qmat2.mul(m, m) + IDENTITY).max_abs() <= tol * s * s


def is_circle(m: QMat2, tol: float = MEMBERSHIP_TOL) -> bool:
    s = _scale(m)
    if (qmat2.adjoint_star(m) + m).max_abs() > tol * s:
        return False
    return (qmat2.mul(m, m) + IDENTITY).max_abs() <= tol * s * s


def is_point_pair(m: QMat2, tol: float = MEMBERSHIP_TOL) -> bool:
    s = _scale(m)
    if (qmat2.adjoint_star(m) + m).max_abs() > tol * s:
        return False
    return (qmat2.mul(m, m) - IDENTITY).max_abs() <= tol * s * s


def incidence_residual(m: QMat2, p: PointS3) -> float:
    """How far the line of p is from being an eigenline of m.

    For an affine point the residual of ``a p + b = p (c p + d)`` is returned,
    relative to ``|m| (1 + |p|^2)``; at infinity it is ``|c| / |m|``.
    """
    n = max(m.max_abs(), 1e-300)
    if p.is_infinity:
        return m.c.norm() / n
    q = p.affine
    r = mul(m.a, q) + m.b - mul(q, mul(m.c, q) + m.d)
    return r.norm() / (n * (1.0 + q.norm2()))


def is_incident(obj, p, tol: float = INCIDENCE_TOL) -> bool:
    m = obj.m if hasattr(obj, "m") else obj
    if not isinstance(p, PointS3):
        p = PointS3(p)
    return incidence_residual(m, p) < tol


class _Reflection:
    """Common behavior of the matrix wrapper types."""

    __slots__ = ("m",)
    _predicate = None
    _label = ""

    def __init__(self, m: QMat2, check: bool = True):
        if check and not type(self)._predicate(m):
            raise DomainError(f"matrix is not an oriented {self._label}")
        self.m = m

    def __neg__(self):
        return type(self)(-self.m, check=False)

    def transformed(self, A: MoebiusMap):
        """Image under a Moebius transformation, A m A^-1."""
        return type(self)(A.conjugate(self.m), check=False)

    def contains(self, p, tol: float = INCIDENCE_TOL) -> bool:
        return is_incident(self.m, p, tol)

    def isclose(self, other, tol: float = 1e-10) -> bool:
        return self.m.isclose(other.m, tol)

    def __repr__(self):
        return f"{type(self).__name__}({self.m!r})"


class Sphere2(_Reflection):
    __slots__ = ()
    _predicate = staticmethod(is_sphere)
    _label = "2-sphere"

    @property
    def gamma(self) -> float:
        return self.m.c.w

    @property
    def beta(self) -> float:
        return self.m.b.w

    @property
    def a(self) -> ImQuaternion:
        return as_im(self.m.a)


class Circle(_Reflection):
    __slots__ = ()
    _predicate = staticmethod(is_circle)
    _label = "circle"


class PointPair(_Reflection):
    __slots__ = ()
    _predicate = staticmethod(is_point_pair)
    _label = "point pair"


class LightVector(_Reflection):
    """Null vector of R^{4,1}, the lift of a point of S^3."""

    __slots__ = ()
    _label = "light cone vector"

    @staticmethod
    def _predicate(m: QMat2, tol: float = MEMBERSHIP_TOL) -> bool:
        s = _scale(m)
        if abs(qmat2.real_trace(m)) > tol * s:
            return False
        if (qmat2.adjoint_star(m) - m).max_abs() > tol * s:
            return False
        return abs(qmat2.inner(m, m)) <= tol * s * s

    def point(self) -> PointS3:
        """The point whose lift this is."""
        g = self.m.c.w
        if abs(g) <= 1e-12 * _scale(self.m):
            return PointS3.infinity()
        return PointS3(as_im(self.m.a) * (1.0 / g))


class InfTranslation:
    """Element of sp(1,1) translating infinitesimally at a point.

    Its kernel and image both equal the line of the basepoint, so it is
    nilpotent.  At infinity it is ``[[0, v], [0, 0]]``, the Euclidean
    translation field with velocity ``v``.
    """

    __slots__ = ("m", "basepoint")

    def __init__(self, m: QMat2, basepoint: PointS3 | None = None, check: bool = True):
        if basepoint is None:
            basepoint = _nilpotent_line(m)
        if check:
            s = _scale(m)
            if (qmat2.adjoint_star(m) + m).max_abs() > MEMBERSHIP_TOL * s:
                raise DomainError("matrix is not in sp(1,1)")
            psi = basepoint.psi
            k0, k1 = m.act(psi)
            if max(k0.norm(), k1.norm()) > MEMBERSHIP_TOL * s * (1.0 + psi[0].norm2()):
                raise DomainError("basepoint is not in the kernel")
            if (qmat2.mul(m, m)).max_abs() > MEMBERSHIP_TOL * s * s:
                raise DomainError("matrix is not nilpotent")
        self.m = m
        self.basepoint = basepoint

    def __repr__(self):
        return f"InfTranslation(basepoint={self.basepoint!r}, m={self.m!r})"


def _nilpotent_line(m: QMat2) -> PointS3:
    # the image of a nilpotent matrix is its kernel line
    one, zero = Quaternion(1.0), Quaternion(0.0)
    u = m.act((one, zero))
    v = m.act((zero, one))
    w = u if (u[0].norm2() + u[1].norm2()) >= (v[0].norm2() + v[1].norm2()) else v
    return PointS3.from_homogeneous(w, check=False)


# constructors ---------------------------------------------------------------

def _conj_translation(p: ImQuaternion, X: QMat2) -> QMat2:
    T = qmat2.translation_matrix(p)
    Ti = qmat2.translation_matrix(-p)
    return qmat2.mul(qmat2.mul(T, X), Ti)


def _check_unit(v: ImQuaternion, name: str):
    if abs(v.norm() - 1.0) > 1e-9:
        raise DomainError(f"{name} must be a unit vector (|{name}| = {v.norm():.12g})")


def sphere_from_point_normal_h(p, n, h: float) -> Sphere2:
    """Sphere through p with unit normal n and mean curvature h there.

    ``h = 0`` gives a plane; otherwise the center is ``p - n/h``.
    """
    p, n = as_im(p), as_im(n)
    _check_unit(n, "n")
    h = float(h)
    pn = p.dot(n)
    m = QMat2(n - p * h, 2.0 * pn - h * p.norm2(), -h, p * h - n)
    return Sphere2(m, check=False)


def sphere_from_center_radius(center, radius: float, outward: bool = True) -> Sphere2:
    c = as_im(center)
    r = float(radius)
    if not r > 0.0:
        raise DomainError("radius must be positive")
    s = 1.0 if outward else -1.0
    m = QMat2(c * (-s / r), -s * (c.norm2() - r * r) / r, -s / r, c * (s / r))
    return Sphere2(m, check=False)


def sphere_from_plane(n, offset: float) -> Sphere2:
    """Plane ``n . x = offset`` oriented by the unit normal n."""
    n = as_im(n)
    _check_unit(n, "n")
    return Sphere2(QMat2(n, 2.0 * float(offset), 0.0, -n), check=False)


def circle_from_point_tangent_binormal(p, t, kb) -> Circle:
    """Circle through p with unit tangent t and curvature binormal kb.

    Here ``kb = kappa (N x t)`` for the principal normal N, so ``kb = 0`` is
    the straight line through p in direction t.
    """
    p, t, kb = as_im(p), as_im(t), as_im(kb)
    _check_unit(t, "t")
    if abs(t.dot(kb)) > 1e-9 * max(1.0, kb.norm()):
        raise DomainError("curvature binormal must be orthogonal to the tangent")
    X = QMat2(t, 0.0, -kb, t)
    return Circle(_conj_translation(p, X), check=False)


def _circle_frame(p1, p2, p3):
    """Tangent and curvature binormal at p1 of the circle p1 -> p2 -> p3.

    Inverting about p1 turns the circle into the line through
    a' = a/|a|^2 and b' = b/|b|^2, whose direction is the tangent at p1 and
    whose foot point f gives kappa N = 2 f.
    """
    a = p2 - p1
    b = p3 - p1
    na, nb = a.norm2(), b.norm2()
    scale = max(na, nb, 1e-300)
    if na <= 1e-24 * scale or nb <= 1e-24 * scale or (p3 - p2).norm2() <= 1e-24 * scale:
        raise DegenerateError("coincident points do not determine a circle")
    ai = a * (1.0 / na)
    bi = b * (1.0 / nb)
    d = ai - bi
    t = d.normalized()
    kb = ai.cross(t) * 2.0
    return t, kb


def circle_through_points(p1, p2, p3) -> Circle:
    """The oriented circle through three points traversed p1 -> p2 -> p3.

    Collinear points yield the oriented line; coincident points raise
    DegenerateError.
    """
    p1, p2, p3 = as_im(p1), as_im(p2), as_im(p3)
    t, kb = _circle_frame(p1, p2, p3)
    return Circle(_conj_translation(p1, QMat2(t, 0.0, -kb, t)), check=False)


def point_pair(p1, p2) -> PointPair:
    """Oriented point pair with U psi1 = -psi1 and U psi2 = psi2."""
    p1 = p1 if isinstance(p1, PointS3) else PointS3(p1)
    p2 = p2 if isinstance(p2, PointS3) else PointS3(p2)
    if p1.is_infinity and p2.is_infinity:
        raise DomainError("coincident points")
    if p1.is_infinity:
        return -point_pair(p2, p1)
    q1 = p1.affine
    if p2.is_infinity:
        X = QMat2(1.0, 0.0, 0.0, -1.0)
    else:
        v = p2.affine - q1
        if v.norm() <= 1e-14 * max(1.0, q1.norm()):
            raise DomainError("coincident points")
        X = QMat2(1.0, 0.0, v.inverse() * 2.0, -1.0)
    return PointPair(_conj_translation(q1, X), check=False)


def euclidean_lift(p) -> LightVector:
    """Psi_p = [[p, |p|^2], [1, -p]]; <Psi_p, Psi_q> = -|p - q|^2 / 2."""
    p = as_im(p)
    return LightVector(QMat2(p, p.norm2(), 1.0, -p), check=False)


def lift_infinity() -> LightVector:
    return LightVector(QMat2(0.0, 1.0, 0.0, 0.0), check=False)


def inf_translation(p, v) -> InfTranslation:
    """Infinitesimal translation at p; at infinity v is the translation velocity."""
    p = p if isinstance(p, PointS3) else PointS3(p)
    v = as_im(v)
    if p.is_infinity:
        return InfTranslation(QMat2(0.0, v, 0.0, 0.0), p, check=False)
    m = _conj_translation(p.affine, QMat2(0.0, 0.0, v, 0.0))
    return InfTranslation(m, p, check=False)


# pencils --------------------------------------------------------------------

class PencilKind(str, Enum):
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class PencilClass:
    """Type of the pencil spanned by two spheres.

    ``angle_or_sigma`` is the intersection angle (elliptic), 0 (parabolic) or
    the rapidity (hyperbolic).  ``axis`` is the unit circle, infinitesimal
    translation or unit point pair with ``exp(generator/2) S1 = S2 exp(generator/2)``.
    """

    kind: PencilKind
    angle_or_sigma: float
    axis: QMat2
    inner: float

    @property
    def generator(self) -> QMat2:
        if self.kind is PencilKind.PARABOLIC:
            return self.axis
        return self.axis * self.angle_or_sigma

    def geodesic(self, t: float) -> MoebiusMap:
        """exp(t generator / 2): t = 1 carries S1 to S2."""
        return MoebiusMap(qmat2.exp(self.generator * (0.5 * t)), normalize=False)


def classify_pencil(S1: Sphere2, S2: Sphere2) -> PencilClass:
    m1, m2 = _m(S1), _m(S2)
    s = qmat2.inner(m1, m2)
    if (m1 - m2).max_abs() <= 1e-12 * _scale(m1) or (m1 + m2).max_abs() <= 1e-12 * _scale(m1):
        raise DegenerateError("spheres coincide up to orientation")
    X = qmat2.cross(m1, m2)
    if abs(s - 1.0) < PARABOLIC_TOL:
        return PencilClass(PencilKind.PARABOLIC, 0.0, X, s)
    if s <= -1.0:
        raise InconsistentOrientationError(
            f"<S1, S2> = {s:.12g} <= -1: no orientation preserving map between the spheres"
        )
    if s < 1.0:
        alpha = math.acos(s)
        return PencilClass(PencilKind.ELLIPTIC, alpha, X * (1.0 / math.sin(alpha)), s)
    sigma = math.acosh(s)
    return PencilClass(PencilKind.HYPERBOLIC, sigma, X * (1.0 / math.sinh(sigma)), s)


def rolling_map(S1: Sphere2, S2: Sphere2) -> MoebiusMap:
    """Q = I - S2 S1, normalized.  Q S1 = S2 Q and Q* Q = 2 (1 + <S1, S2>) I."""
    m1, m2 = _m(S1), _m(S2)
    s = qmat2.inner(m1, m2)
    if s <= -1.0:
        raise InconsistentOrientationError(f"<S1, S2> = {s:.12g} <= -1")
    Q = IDENTITY - qmat2.mul(m2, m1)
    return MoebiusMap(Q * (1.0 / math.sqrt(2.0 * (1.0 + s))), normalize=False)


def circle_circle_product(C1: Circle, C2: Circle):
    """(cos beta, cross) of two circles intersecting at angle beta.

    cross = sin(beta) times the unit circle normal to the common sphere at
    the intersection points.
    """
    m1, m2 = _m(C1), _m(C2)
    return qmat2.inner(m1, m2), qmat2.cross(m1, m2)


def sphere_pointpair_product(S: Sphere2, U: PointPair) -> Circle:
    """Circle C = S U through the two points, orthogonal to S.  C S = -U, C U = S."""
    ms, mu = _m(S), _m(U)
    comm = qmat2.mul(ms, mu) - qmat2.mul(mu, ms)
    if comm.max_abs() > 1e-8 * _scale(ms) * _scale(mu):
        raise DomainError("point pair does not lie on the sphere")
    return Circle(qmat2.mul(ms, mu), check=False)


def _m(obj) -> QMat2:
    return obj.m if hasattr(obj, "m") else obj


# extractors -----------------------------------------------------------------

def _local_entries(m: QMat2, p: PointS3):
    """Upper-left and lower-left entries of T_{-p} m T_p."""
    if p.is_infinity:
        raise DomainError("extractors use the affine chart; point at infinity")
    q = p.affine
    return m.a - mul(q, m.c), m.c


def _require_incident(m: QMat2, p: PointS3):
    r = incidence_residual(m, p)
    if r >= INCIDENCE_TOL:
        raise DomainError(f"point is not incident (residual {r:.3e})")


def sphere_normal_at(S: Sphere2, p) -> ImQuaternion:
    p = p if isinstance(p, PointS3) else PointS3(p)
    m = _m(S)
    _require_incident(m, p)
    n, _ = _local_entries(m, p)
    return as_im(n).normalized()


def sphere_mean_curvature_at(S: Sphere2, p) -> float:
    m = _m(S)
    return -m.c.w


def circle_tangent_at(C: Circle, p) -> ImQuaternion:
    p = p if isinstance(p, PointS3) else PointS3(p)
    m = _m(C)
    _require_incident(m, p)
    t, _ = _local_entries(m, p)
    return as_im(t).normalized()


def circle_binormal_at(C: Circle, p) -> ImQuaternion:
    """Curvature binormal kb; translation conjugation keeps the lower-left entry, so it is constant."""
    p = p if isinstance(p, PointS3) else PointS3(p)
    m = _m(C)
    _require_incident(m, p)
    return as_im(-m.c)


@dataclass(frozen=True)
class Plane:
    normal: ImQuaternion
    offset: float

    kind = "plane"


@dataclass(frozen=True)
class RoundSphere:
    center: ImQuaternion
    radius: float
    orientation: int  # +1 when the normal points outward

    kind = "round"


def sphere_geometry(S: Sphere2):
    """Plane(normal, offset) or RoundSphere(center, radius, orientation)."""
    m = _m(S)
    a = as_im(m.a)
    gamma = m.c.w
    beta = m.b.w
    if abs(gamma) <= 1e-14 * _scale(m):
        return Plane(a, 0.5 * beta)
    return RoundSphere(a * (1.0 / gamma), 1.0 / abs(gamma), 1 if gamma < 0 else -1)
