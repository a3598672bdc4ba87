"""Exception hierarchy shared by all modules."""


class GeometryError(ValueError):
    """Base class for every error raised by this package."""


class DomainError(GeometryError):
    """An argument is outside the domain of the operation."""


class DegenerateError(GeometryError):
    """Input is degenerate (coincident, concircular, ...)."""

    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


class InconsistentOrientationError(GeometryError):
    """Two oriented spheres admit no orientation preserving map between them."""


class UnsupportedError(GeometryError):
    """The operation is not defined for this kind of input."""


class NotApplicableError(GeometryError):
    """Quantity is undefined here, e.g. a boundary vertex or edge."""


class MeshStructureError(GeometryError):
    """Mesh connectivity is not an oriented manifold."""


class ObjParseError(GeometryError):
    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno
