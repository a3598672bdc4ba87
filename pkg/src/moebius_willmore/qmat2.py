"""The algebra of 2x2 quaternionic matrices.

``QMat2`` holds the entries of ``[[a, b], [c, d]]``.  It houses Moebius
transformations, Lie algebra elements, spheres, circles, point pairs and light
cone vectors alike; the geometric meaning lives in the wrapper types of the
other modules.  Homogeneous vectors of H^2 are plain 2-tuples of quaternions.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .quat import ImQuaternion, Quaternion
from .quat import mul as mul_q

__all__ = [
    "QMat2",
    "IDENTITY",
    "ZERO",
    "mul",
    "adjoint_star",
    "real_trace",
    "inner",
    "cross",
    "exp",
    "inverse",
    "hermitian_form",
    "translation_matrix",
    "conjugate",
]

_ONE = Quaternion(1.0)
_ZERO = Quaternion(0.0)


class QMat2:
    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a = _q(a)
        self.b = _q(b)
        self.c = _q(c)
        self.d = _q(d)

    @classmethod
    def identity(cls) -> "QMat2":
        return cls(_ONE, _ZERO, _ZERO, _ONE)

    @classmethod
    def zero(cls) -> "QMat2":
        return cls(_ZERO, _ZERO, _ZERO, _ZERO)

    @classmethod
    def from_array(cls, arr) -> "QMat2":
        arr = np.asarray(arr, dtype=float).reshape(2, 2, 4)
        return cls(
            Quaternion.from_array(arr[0, 0]),
            Quaternion.from_array(arr[0, 1]),
            Quaternion.from_array(arr[1, 0]),
            Quaternion.from_array(arr[1, 1]),
        )

    def to_array(self) -> np.ndarray:
        """Real array of shape (2, 2, 4)."""
        return np.array([[list(self.a), list(self.b)], [list(self.c), list(self.d)]])

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    # arithmetic
    def __add__(self, other: "QMat2") -> "QMat2":
        return QMat2(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    def __sub__(self, other: "QMat2") -> "QMat2":
        return QMat2(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __neg__(self) -> "QMat2":
        return QMat2(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, s) -> "QMat2":
        if isinstance(s, QMat2):
            return mul(self, s)
        return QMat2(self.a * s, self.b * s, self.c * s, self.d * s)

    __rmul__ = __mul__

    def __truediv__(self, s) -> "QMat2":
        return QMat2(self.a / s, self.b / s, self.c / s, self.d / s)

    def __matmul__(self, other):
        if isinstance(other, QMat2):
            return mul(self, other)
        return self.act(other)

    def act(self, psi):
        """Apply to a homogeneous vector (psi0, psi1)."""
        p0, p1 = psi
        return (mul_q(self.a, p0) + mul_q(self.b, p1), mul_q(self.c, p0) + mul_q(self.d, p1))

    def star(self) -> "QMat2":
        return adjoint_star(self)

    def norm(self) -> float:
        """Frobenius norm over the 16 real components."""
        return math.sqrt(self.a.norm2() + self.b.norm2() + self.c.norm2() + self.d.norm2())

    def max_abs(self) -> float:
        return max(self.a.max_abs(), self.b.max_abs(), self.c.max_abs(), self.d.max_abs())

    def isclose(self, other: "QMat2", tol=1e-10) -> bool:
        return (self - other).max_abs() <= tol

    def __repr__(self):
        return f"QMat2(a={self.a!r}, b={self.b!r}, c={self.c!r}, d={self.d!r})"


def _q(v) -> Quaternion:
    if isinstance(v, Quaternion):
        return v
    if isinstance(v, (int, float)):
        return Quaternion(v)
    arr = list(v)
    if len(arr) == 3:
        return ImQuaternion(*arr)
    return Quaternion(*arr)


IDENTITY = QMat2.identity()
ZERO = QMat2.zero()


def mul(A: QMat2, B: QMat2) -> QMat2:
    """Matrix product over H; the order of factors matters."""
    return QMat2(
        mul_q(A.a, B.a) + mul_q(A.b, B.c),
        mul_q(A.a, B.b) + mul_q(A.b, B.d),
        mul_q(A.c, B.a) + mul_q(A.d, B.c),
        mul_q(A.c, B.b) + mul_q(A.d, B.d),
    )


def adjoint_star(A: QMat2) -> QMat2:
    """Adjoint with respect to the indefinite Hermitian form: [[d~, b~], [c~, a~]]."""
    return QMat2(A.d.conj(), A.b.conj(), A.c.conj(), A.a.conj())


def real_trace(A: QMat2) -> float:
    return A.a.w + A.d.w


def _re_mul(p: Quaternion, q: Quaternion) -> float:
    return p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z


def inner(A: QMat2, B: QMat2) -> float:
    """<A, B> = -1/2 tr_R(AB)."""
    tr = _re_mul(A.a, B.a) + _re_mul(A.b, B.c) + _re_mul(A.c, B.b) + _re_mul(A.d, B.d)
    return -0.5 * tr


def cross(A: QMat2, B: QMat2) -> QMat2:
    """Half the commutator, (AB - BA)/2."""
    return (mul(A, B) - mul(B, A)) * 0.5


def hermitian_form(psi, phi) -> Quaternion:
    """<psi, phi> = conj(psi0) phi1 + conj(psi1) phi0."""
    return mul_q(psi[0].conj(), phi[1]) + mul_q(psi[1].conj(), phi[0])


def translation_matrix(x: ImQuaternion) -> QMat2:
    return QMat2(_ONE, x, _ZERO, _ONE)


def conjugate(A: QMat2, X: QMat2, A_inv: QMat2 | None = None) -> QMat2:
    """A X A^-1."""
    if A_inv is None:
        A_inv = inverse(A)
    return mul(mul(A, X), A_inv)


def _exp_coefficients(s: float):
    """c, d with exp(A) = c I + d A whenever A^2 = s I."""
    if abs(s) < 1e-6:
        c = 1.0 + s / 2.0 + s * s / 24.0 + s ** 3 / 720.0
        d = 1.0 + s / 6.0 + s * s / 120.0 + s ** 3 / 5040.0
    elif s < 0.0:
        w = math.sqrt(-s)
        c, d = math.cos(w), math.sin(w) / w
    else:
        w = math.sqrt(s)
        c, d = math.cosh(w), math.sinh(w) / w
    return c, d


def exp(A: QMat2, tol: float = 1e-9) -> QMat2:
    """Matrix exponential.

    Uses the closed form ``c(s) I + d(s) A`` when ``A^2 = s I`` for a real
    ``s`` (rotations about circles, parabolic translations and hyperbolic
    scalings all fall in this case).  Other arguments go through a truncated
    Taylor series with scaling and squaring.
    """
    A2 = mul(A, A)
    s = 0.5 * real_trace(A2)
    scale = max(A.norm() ** 2, 1e-300)
    if (A2 - IDENTITY * s).norm() <= tol * scale:
        c, d = _exp_coefficients(s)
        return QMat2(A.a * d + c, A.b * d, A.c * d, A.d * d + c)
    return _exp_series(A)


def _exp_series(A: QMat2, terms: int = 18) -> QMat2:
    n = A.norm()
    k = 0
    while n > 0.5:
        n *= 0.5
        k += 1
    X = A * (0.5 ** k)
    result = IDENTITY
    term = IDENTITY
    for m in range(1, terms + 1):
        term = mul(term, X) * (1.0 / m)
        result = result + term
    for _ in range(k):
        result = mul(result, result)
    return result


def _left_matrix(q: Quaternion) -> np.ndarray:
    w, x, y, z = q.w, q.x, q.y, q.z
    return np.array(
        [
            [w, -x, -y, -z],
            [x, w, -z, y],
            [y, z, w, -x],
            [z, -y, x, w],
        ]
    )


def real_representation(A: QMat2) -> np.ndarray:
    """8x8 real matrix of psi -> A psi acting on H^2 = R^8."""
    R = np.empty((8, 8))
    R[:4, :4] = _left_matrix(A.a)
    R[:4, 4:] = _left_matrix(A.b)
    R[4:, :4] = _left_matrix(A.c)
    R[4:, 4:] = _left_matrix(A.d)
    return R


def inverse(A: QMat2, rtol: float = 1e-15) -> QMat2:
    """Inverse matrix.

    Fast path: if ``A* A = lam I`` for a real nonzero ``lam``, the inverse is
    ``A*/lam``.  Otherwise solve with the 8x8 real representation.
    """
    As = adjoint_star(A)
    P = mul(As, A)
    lam = 0.5 * real_trace(P)
    n2 = A.norm() ** 2
    if n2 == 0.0:
        raise DomainError("zero matrix is singular")
    if abs(lam) > 1e-8 * n2 and (P - IDENTITY * lam).norm() <= rtol * n2:
        return As * (1.0 / lam)
    R = real_representation(A)
    s = np.linalg.svd(R, compute_uv=False)
    if s[-1] <= 1e-13 * s[0]:
        raise DomainError("matrix is singular")
    rhs = np.zeros((8, 2))
    rhs[0, 0] = 1.0
    rhs[4, 1] = 1.0
    sol = np.linalg.solve(R, rhs)
    return QMat2(
        Quaternion.from_array(sol[:4, 0]),
        Quaternion.from_array(sol[:4, 1]),
        Quaternion.from_array(sol[4:, 0]),
        Quaternion.from_array(sol[4:, 1]),
    )


def from_real_representation(R: np.ndarray) -> QMat2:
    """Inverse of real_representation: the first column of each 4x4 block is the entry."""
    R = np.asarray(R, dtype=float)
    return QMat2(
        Quaternion.from_array(R[0:4, 0]),
        Quaternion.from_array(R[0:4, 4]),
        Quaternion.from_array(R[4:8, 0]),
        Quaternion.from_array(R[4:8, 4]),
    )


def vector_to_real(psi) -> np.ndarray:
    """Homogeneous vector (psi0, psi1) as a point of R^8."""
    return np.array([*psi[0], *psi[1]], dtype=float)


def vector_from_real(x: np.ndarray):
    return (Quaternion.from_array(x[:4]), Quaternion.from_array(x[4:]))
