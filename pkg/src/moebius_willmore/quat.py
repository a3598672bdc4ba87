"""Quaternions and the identification of imaginary quaternions with R^3.

Quaternions are stored as four plain floats ``w + x i + y j + z k``.  No
normalization happens on construction: Moebius matrices are projective and
their scale is handled by the callers.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

__all__ = ["Quaternion", "ImQuaternion", "mul", "exp_im", "rotate", "as_im"]


class Quaternion:
    __slots__ = ("w", "x", "y", "z")

    def __init__(self, w=0.0, x=0.0, y=0.0, z=0.0):
        self.w = float(w)
        self.x = float(x)
        self.y = float(y)
        self.z = float(z)

    # construction helpers
    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        w, x, y, z = arr
        return cls(w, x, y, z)

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def __iter__(self):
        yield self.w
        yield self.x
        yield self.y
        yield self.z

    # algebra
    def __add__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)
        return Quaternion(self.w + other, self.x, self.y, self.z)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)
        return Quaternion(self.w - other, self.x, self.y, self.z)

    def __rsub__(self, other):
        return Quaternion(other - self.w, -self.x, -self.y, -self.z)

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return mul(self, other)
        return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)

    def __rmul__(self, other):
        return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)

    def __truediv__(self, other):
        if isinstance(other, Quaternion):
            return self * other.inverse()
        return Quaternion(self.w / other, self.x / other, self.y / other, self.z / other)

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def inverse(self) -> "Quaternion":
        n2 = self.norm2()
        if n2 == 0.0:
            raise DomainError("zero quaternion has no inverse")
        return Quaternion(self.w / n2, -self.x / n2, -self.y / n2, -self.z / n2)

    @property
    def real(self) -> float:
        return self.w

    @property
    def imag(self) -> "ImQuaternion":
        return ImQuaternion(self.x, self.y, self.z)

    def max_abs(self) -> float:
        return max(abs(self.w), abs(self.x), abs(self.y), abs(self.z))

    def isclose(self, other, tol=1e-12) -> bool:
        return (self - other).max_abs() <= tol

    def __eq__(self, other):
        if not isinstance(other, Quaternion):
            return NotImplemented
        return self.w == other.w and self.x == other.x and self.y == other.y and self.z == other.z

    def __hash__(self):
        return hash((self.w, self.x, self.y, self.z))

    def __repr__(self):
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"


class ImQuaternion(Quaternion):
    """Imaginary quaternion, i.e. a point or vector of R^3.

    The real part is always exactly zero.  Sums, differences and real
    multiples stay imaginary; products with other quaternions do not.
    """

    __slots__ = ()

    def __init__(self, x=0.0, y=0.0, z=0.0):
        self.w = 0.0
        self.x = float(x)
        self.y = float(y)
        self.z = float(z)

    @classmethod
    def from_array(cls, arr) -> "ImQuaternion":
        x, y, z = arr
        return cls(x, y, z)

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __add__(self, other):
        if isinstance(other, ImQuaternion):
            return ImQuaternion(self.x + other.x, self.y + other.y, self.z + other.z)
        return Quaternion.__add__(self, other)

    def __sub__(self, other):
        if isinstance(other, ImQuaternion):
            return ImQuaternion(self.x - other.x, self.y - other.y, self.z - other.z)
        return Quaternion.__sub__(self, other)

    def __neg__(self):
        return ImQuaternion(-self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return mul(self, other)
        return ImQuaternion(self.x * other, self.y * other, self.z * other)

    def __rmul__(self, other):
        return ImQuaternion(self.x * other, self.y * other, self.z * other)

    def __truediv__(self, other):
        if isinstance(other, Quaternion):
            return mul(self, other.inverse())
        return ImQuaternion(self.x / other, self.y / other, self.z / other)

    def conj(self) -> "ImQuaternion":
        return ImQuaternion(-self.x, -self.y, -self.z)

    def inverse(self) -> "ImQuaternion":
        n2 = self.norm2()
        if n2 == 0.0:
            raise DomainError("zero vector has no inverse")
        return ImQuaternion(-self.x / n2, -self.y / n2, -self.z / n2)

    def dot(self, other: "ImQuaternion") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "ImQuaternion") -> "ImQuaternion":
        return ImQuaternion(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def normalized(self) -> "ImQuaternion":
        n = self.norm()
        if n == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return ImQuaternion(self.x / n, self.y / n, self.z / n)

    def __repr__(self):
        return f"ImQuaternion({self.x!r}, {self.y!r}, {self.z!r})"


def as_im(v) -> ImQuaternion:
    """Coerce a 3-sequence or quaternion with vanishing real part to ImQuaternion."""
    if isinstance(v, ImQuaternion):
        return v
    if isinstance(v, Quaternion):
        if abs(v.w) > 1e-9 * max(1.0, v.norm()):
            raise DomainError(f"quaternion has real part {v.w:.3e}; expected an imaginary one")
        return ImQuaternion(v.x, v.y, v.z)
    x, y, z = v
    return ImQuaternion(x, y, z)


def mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product."""
    aw, ax, ay, az = a.w, a.x, a.y, a.z
    bw, bx, by, bz = b.w, b.x, b.y, b.z
    return Quaternion(
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def exp_im(v: ImQuaternion) -> Quaternion:
    """exp(v) = cos|v| + sin|v| v/|v| for imaginary v."""
    n = v.norm()
    if n == 0.0:
        return Quaternion(1.0)
    s = math.sin(n) / n
    return Quaternion(math.cos(n), v.x * s, v.y * s, v.z * s)


def rotate(q: Quaternion, p: ImQuaternion) -> ImQuaternion:
    """Stretch rotation p -> q p conj(q); lengths scale by |q|^2."""
    if q.norm2() == 0.0:
        raise DomainError("rotation by the zero quaternion")
    r = mul(mul(q, p), q.conj())
    return ImQuaternion(r.x, r.y, r.z)
