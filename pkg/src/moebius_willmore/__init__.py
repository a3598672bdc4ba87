"""Moebius geometry of S^3 with quaternionic 2x2 matrices and the discrete
Willmore energy of triangle meshes."""

from .errors import (
    DegenerateError,
    DomainError,
    GeometryError,
    InconsistentOrientationError,
    MeshStructureError,
    NotApplicableError,
    ObjParseError,
    UnsupportedError,
)
from .kernels import BACKEND
from .quat import ImQuaternion, Quaternion
from .qmat2 import QMat2
from .moebius import MoebiusMap, PointS3
from .surface import SimplicialSurface

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DegenerateError",
    "DomainError",
    "GeometryError",
    "ImQuaternion",
    "InconsistentOrientationError",
    "MeshStructureError",
    "MoebiusMap",
    "NotApplicableError",
    "ObjParseError",
    "PointS3",
    "QMat2",
    "Quaternion",
    "SimplicialSurface",
    "UnsupportedError",
    "__version__",
]
